#include "rdesplit/convergence.hpp"
#include "rdesplit/errors.hpp"
#include "rdesplit/parallel.hpp"

#include <doctest.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <sstream>

using namespace rdesplit;

namespace {

Problem zero_problem(DriverPtr driver) {
    return Problem{driver, zero_field(2, driver->dimension()), zero_z(2), Vector::Constant(2, 0.3), 1.0};
}

Problem sine_problem(DriverPtr driver) {
    auto field = sine_field_preset(2, driver->dimension(), 1);
    auto z = canonical_z(field, driver);
    Vector y0(2);
    y0 << 0.5, -0.3;
    return Problem{driver, std::move(field), std::move(z), y0, 1.0};
}

// A driver that is not a piecewise-linear lift.
struct LineDriver final : RoughDriver {
    int dimension() const override { return 2; }
    double alpha() const override { return 0.5; }
    double start_time() const override { return 0.0; }
    double end_time() const override { return 1.0; }
    Vector increment(double s, double t) const override { return Vector::Constant(2, t - s); }
    Matrix area(double s, double t) const override { return Matrix::Constant(2, 2, 0.5 * (t - s) * (t - s)); }
};

DriverPtr smooth_driver() { return lift_piecewise_linear(smooth_curve_path(2, 1.0, (1 << 14) + 1), 0.5); }
DriverPtr rough_driver(std::uint64_t seed) { return lift_piecewise_linear(synth_midpoint_path(seed, 0.45, 14, 2), 0.45); }

}  // namespace

TEST_CASE("fit_rate") {
    const std::array<double, 3> x{0, 1, 2};
    SUBCASE("exact geometric sequence") {
        const std::array<double, 3> d{0.1, 0.05, 0.025};
        CHECK(fit_rate(x, d) == doctest::Approx(1.0).epsilon(1e-12));
        const std::array<double, 3> h{0.4, 0.2, 0.1};
        CHECK(fit_rate(x, h) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("least squares against the closed-form regression") {
        const std::array<double, 3> d{0.1, 0.05, 0.026};
        // three equispaced abscissae: slope = (y_2 - y_0) / 2
        const double expected = (std::log2(0.1) - std::log2(0.026)) / 2.0;
        CHECK(fit_rate(x, d) == doctest::Approx(expected).epsilon(1e-12));
        CHECK(fit_rate(x, d) == doctest::Approx(0.97).epsilon(0.005));
    }
    SUBCASE("scale invariance") {
        const std::array<double, 4> xs{0, 1, 2, 3};
        const std::array<double, 4> d{0.3, 0.2, 0.07, 0.05};
        const double base = fit_rate(xs, d);
        for (double c : {1e-6, 0.5, 3.0, 1e8}) {
            std::array<double, 4> scaled = d;
            for (double& v : scaled) v *= c;
            CHECK(fit_rate(xs, scaled) == doctest::Approx(base).epsilon(1e-12));
        }
    }
    SUBCASE("zeros") {
        const std::array<double, 3> zeros{0, 0, 0};
        CHECK(is_exact_agreement(fit_rate(x, zeros)));
        const std::array<double, 3> mixed{0.1, 0.0, 0.02};
        CHECK_THROWS_AS(fit_rate(x, mixed), InvalidArgument);
        const std::array<double, 2> short_x{0, 1};
        CHECK_THROWS_AS(fit_rate(short_x, zeros), InvalidArgument);
        const std::array<double, 3> negative{0.1, -0.05, 0.02};
        CHECK_THROWS_AS(fit_rate(x, negative), InvalidArgument);
    }
}

TEST_CASE("zero field: every rate is exact agreement") {
    const auto problem = zero_problem(rough_driver(1));
    const auto dyadic = dyadic_sup_rate(problem, 8, 3);
    CHECK(is_exact_agreement(dyadic.slope));
    for (double d : dyadic.diffs) CHECK(d == 0.0);
    CHECK(is_exact_agreement(holder_rate(problem, 0.2, 8, 3).slope));
    const auto rational = rational_rate(problem, 3, 2, 8, 3);
    CHECK(is_exact_agreement(rational.slope));
    for (double d : rational.common_diffs) CHECK(d == 0.0);
}

TEST_CASE("rate report shape and preconditions") {
    const auto problem = sine_problem(smooth_driver());
    const auto r = dyadic_sup_rate(problem, 16, 4);
    CHECK(r.levels == std::vector<int>{16, 32, 64, 128});
    CHECK(r.target == doctest::Approx(0.5));
    CHECK(r.diffs.size() == 4);
    for (double d : r.diffs) CHECK(d > 0.0);
    CHECK(norm_kind_name(r) == "sup");

    const auto h = holder_rate(problem, 0.2, 16, 3);
    CHECK(h.target == doctest::Approx(0.3));
    CHECK(norm_kind_name(h) == "holder(0.2)");

    CHECK_THROWS_AS(dyadic_sup_rate(problem, 16, 2), InvalidArgument);
    CHECK_THROWS_AS(dyadic_sup_rate(problem, 2, 4), InvalidArgument);
    CHECK_THROWS_AS(holder_rate(problem, 0.5, 16, 3), InvalidArgument);
    CHECK_THROWS_AS(holder_rate(problem, 0.0, 16, 3), InvalidArgument);
    CHECK_THROWS_AS(rational_rate(problem, 2, 1, 16, 3), InvalidArgument);
    CHECK_THROWS_AS(rational_rate(problem, 6, 4, 16, 3), InvalidArgument);
    CHECK_THROWS_AS(rational_rate(problem, 5, 4, 18, 3), InvalidArgument);
    CHECK_THROWS_AS(rational_rate(problem, 5, 2, 16, 3), InvalidArgument);
}

TEST_CASE("common_time_indices") {
    const auto idx = common_time_indices(6, 3, 2);
    REQUIRE(idx.size() == 4);
    const std::vector<std::pair<int, int>> expected{{0, 0}, {2, 3}, {4, 6}, {6, 9}};
    CHECK(idx == expected);
    const Grid coarse(1.0, 6), fine(1.0, 9);
    for (auto [c, f] : idx) CHECK(coarse.point(c) == doctest::Approx(fine.point(f)).epsilon(1e-15));
    CHECK(common_time_indices(20, 5, 4).size() == 6);
    CHECK_THROWS_AS(common_time_indices(7, 3, 2), InvalidArgument);
}

TEST_CASE("hoelder diffs are controlled by sup diffs on the sampling mesh") {
    const auto problem = sine_problem(rough_driver(2));
    const double beta = 0.2;
    const auto r = holder_rate(problem, beta, 16, 4);
    for (std::size_t k = 0; k < r.diffs.size(); ++k) {
        const double mesh = r.step_sizes[k] / 4.0;
        CHECK(r.diffs[k] <= 2.0 * r.sup_diffs[k] * std::pow(mesh, -beta) * (1.0 + 1e-12));
        CHECK(r.diffs[k] > 0.0);
    }
}

TEST_CASE("dyadic telescoping at common evaluation times") {
    for (const auto& driver : {smooth_driver(), rough_driver(3)}) {
        const auto p = sine_problem(driver);
        const int N = 32;
        const auto a = solve_split(p.driver, p.field, p.z, p.y0, Grid(1.0, N));
        const auto b = solve_split(p.driver, p.field, p.z, p.y0, Grid(1.0, 2 * N));
        const auto c = solve_split(p.driver, p.field, p.z, p.y0, Grid(1.0, 4 * N));
        double ab = 0, bc = 0, ac = 0;
        for (int k = 0; k <= 4 * N; ++k) {
            const double t = k == 4 * N ? 1.0 : k / (4.0 * N);
            const Vector ya = a.eval_joined(t), yb = b.eval_joined(t), yc = c.eval_joined(t);
            ab = std::max(ab, max_norm(Vector(ya - yb)));
            bc = std::max(bc, max_norm(Vector(yb - yc)));
            ac = std::max(ac, max_norm(Vector(ya - yc)));
        }
        CHECK(ac <= ab + bc);
        CHECK(ac > 0.0);
    }
}

TEST_CASE("davie defect") {
    const auto driver = rough_driver(1);
    const auto p = sine_problem(driver);
    const auto traj = solve_split(p.driver, p.field, p.z, p.y0, Grid(1.0, 64));

    SUBCASE("adjacent pairs reduce to the Z-argument shift") {
        const auto& g = traj.grid();
        for (int k = 0; k < g.steps(); ++k) {
            const auto kk = static_cast<std::size_t>(k);
            const double s = g.point(k), t = g.point(k + 1);
            const Vector expected = p.z(traj.v()[kk], s, t) - p.z(traj.u()[kk], s, t);
            const Vector j = davie_increment(traj, p.field, p.z, *p.driver, k, k + 1);
            CHECK(max_norm(Vector(j - expected)) <= 1e-14);
        }
        CHECK(max_norm(davie_increment(traj, p.field, p.z, *p.driver, 5, 5)) == 0.0);
    }
    SUBCASE("report reproduces its own maximum") {
        const auto r = davie_defect(traj, p.field, p.z, *p.driver, p.gamma(), p.alpha());
        CHECK(r.pairs == 64 * 65 / 2);
        REQUIRE(r.k < r.m);
        const double dt = traj.grid().point(r.m) - traj.grid().point(r.k);
        const double ratio = max_norm(davie_increment(traj, p.field, p.z, *p.driver, r.k, r.m)) /
                             std::pow(dt, p.gamma() * p.alpha());
        CHECK(ratio == doctest::Approx(r.max_ratio).epsilon(1e-12));
        CHECK(r.h == doctest::Approx(1.0 / 64));
    }
    SUBCASE("zero problem") {
        const auto zp = zero_problem(driver);
        const auto zt = solve_split(zp.driver, zp.field, zp.z, zp.y0, Grid(1.0, 32));
        CHECK(davie_defect(zt, zp.field, zp.z, *zp.driver, 3.0, 0.45).max_ratio == 0.0);
    }
    SUBCASE("ratio is stable under refinement on the smooth preset") {
        const auto sp = sine_problem(smooth_driver());
        std::vector<double> ratios;
        for (int N : {64, 128, 256}) {
            const auto t = solve_split(sp.driver, sp.field, sp.z, sp.y0, Grid(1.0, N));
            ratios.push_back(davie_defect(t, sp.field, sp.z, *sp.driver, sp.gamma(), sp.alpha()).max_ratio);
        }
        const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
        CHECK(*hi <= 2.0 * *lo);
    }
}

TEST_CASE("compare_schemes and oracle errors") {
    const auto p = sine_problem(smooth_driver());
    const auto gap = compare_schemes(p, 32, 4);
    CHECK(gap.levels == std::vector<int>{32, 64, 128, 256});
    CHECK(gap.slope >= 1.0);

    const auto zp = Problem{p.driver, p.field, zero_z(2), p.y0, 1.0};
    for (double g : compare_schemes(zp, 32, 3).gaps) CHECK(g <= 1e-12);

    const auto errors = oracle_errors(p, {64, 128, 256});
    CHECK(errors[1] < errors[0]);
    CHECK(errors[2] < errors[1]);
    CHECK_THROWS_AS(oracle_errors(Problem{std::make_shared<const LineDriver>(), p.field, p.z, p.y0, 1.0}, {8}),
                    InvalidArgument);
}

TEST_CASE("rate CSV") {
    RateReport r;
    r.levels = {16, 32};
    r.step_sizes = {0.0625, 0.03125};
    r.diffs = {0.5, 0.0};
    std::ostringstream out;
    write_rate_csv(out, r);
    CHECK(out.str() == "level,N,h,diff,log2_diff\n0,16,0.0625,0.5,-1\n1,32,0.03125,0,-inf\n");
}

TEST_CASE("thread budget and parallel_for") {
    ::setenv("RDE_SPLIT_THREADS", "3", 1);
    CHECK(thread_budget() == 3);
    ::setenv("RDE_SPLIT_THREADS", "zero", 1);
    CHECK(thread_budget() >= 1);

    std::vector<std::atomic<int>> hits(100);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) CHECK(h.load() == 1);

    ::setenv("RDE_SPLIT_THREADS", "4", 1);
    try {
        parallel_for(20, [](std::size_t i) {
            if (i % 7 == 3) throw std::runtime_error(std::to_string(i));
        });
        FAIL("expected an exception");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()) == "3");
    }

    const auto p = sine_problem(rough_driver(2));
    ::setenv("RDE_SPLIT_THREADS", "1", 1);
    const auto serial = dyadic_sup_rate(p, 8, 4);
    ::setenv("RDE_SPLIT_THREADS", "8", 1);
    const auto threaded = dyadic_sup_rate(p, 8, 4);
    ::unsetenv("RDE_SPLIT_THREADS");
    CHECK(serial.diffs == threaded.diffs);
    CHECK(serial.slope == threaded.slope);
}
