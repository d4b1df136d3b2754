#include "rdesplit/errors.hpp"
#include "rdesplit/rough_path.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace rdesplit;

namespace {

SampledPath make_path(std::vector<double> times, std::vector<std::vector<double>> rows) {
    SampledPath p;
    p.times = std::move(times);
    p.values = Matrix(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t a = 0; a < rows[i].size(); ++a)
            p.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)) = rows[i][a];
    return p;
}

SampledPath random_path(std::mt19937_64& rng, int d, int segments) {
    std::uniform_real_distribution<double> gap(0.1, 1.0);
    std::normal_distribution<double> step(0.0, 1.0);
    SampledPath p;
    p.values = Matrix::Zero(segments + 1, d);
    p.times.push_back(0.0);
    for (int k = 1; k <= segments; ++k) {
        p.times.push_back(p.times.back() + gap(rng));
        for (int a = 0; a < d; ++a) p.values(k, a) = p.values(k - 1, a) + step(rng);
    }
    for (double& t : p.times) t /= p.times.back();
    return p;
}

// Linear interpolation written independently of the driver.
Vector interpolate(const SampledPath& p, double t) {
    std::size_t k = 0;
    while (k + 2 < p.times.size() && p.times[k + 1] < t) ++k;
    const double w = (t - p.times[k]) / (p.times[k + 1] - p.times[k]);
    return ((1 - w) * p.values.row(static_cast<Eigen::Index>(k)) + w * p.values.row(static_cast<Eigen::Index>(k + 1)))
        .transpose();
}

// Fine-mesh trapezoidal Riemann-Stieltjes sum of int_s^t X_{s,r} (x) dX_r.
Matrix riemann_area(const SampledPath& p, double s, double t, int pieces) {
    const auto d = p.values.cols();
    Matrix area = Matrix::Zero(d, d);
    const Vector xs = interpolate(p, s);
    Vector prev = xs;
    for (int i = 1; i <= pieces; ++i) {
        const Vector cur = interpolate(p, s + (t - s) * i / pieces);
        area += 0.5 * ((prev - xs) + (cur - xs)) * (cur - prev).transpose();
        prev = cur;
    }
    return area;
}

// Area overwritten by zero: breaks Chen's relation on purpose.
class ZeroAreaDriver final : public RoughDriver {
public:
    explicit ZeroAreaDriver(std::shared_ptr<const PiecewiseLinearDriver> inner) : inner_(std::move(inner)) {}
    int dimension() const override { return inner_->dimension(); }
    double alpha() const override { return inner_->alpha(); }
    double start_time() const override { return inner_->start_time(); }
    double end_time() const override { return inner_->end_time(); }
    Vector increment(double s, double t) const override { return inner_->increment(s, t); }
    Matrix area(double, double) const override { return Matrix::Zero(dimension(), dimension()); }

private:
    std::shared_ptr<const PiecewiseLinearDriver> inner_;
};

}  // namespace

TEST_CASE("uniform grid") {
    const Grid g = make_uniform_grid(1.0, 4);
    CHECK(g.points() == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    CHECK(make_uniform_grid(2.0, 1).points() == std::vector<double>{0.0, 2.0});
    CHECK_THROWS_AS(make_uniform_grid(1.0, 0), InvalidArgument);
    CHECK_THROWS_AS(make_uniform_grid(0.0, 4), InvalidArgument);
    CHECK_THROWS_AS(make_uniform_grid(-1.0, 4), InvalidArgument);

    const Grid odd = make_uniform_grid(0.7, 3000);
    CHECK(odd.point(0) == 0.0);
    CHECK(odd.point(3000) == 0.7);
    for (int j = 0; j < 3000; ++j) {
        CHECK(odd.point(j + 1) > odd.point(j));
        CHECK(std::abs(odd.point(j + 1) - odd.point(j) - odd.step_size()) <= 4e-16);
    }
}

TEST_CASE("lift of a single segment") {
    const auto drv = lift_piecewise_linear(make_path({0.0, 1.0}, {{0.0, 0.0}, {1.0, 2.0}}));
    const Vector x = drv->increment(0.0, 1.0);
    CHECK(x(0) == doctest::Approx(1.0));
    CHECK(x(1) == doctest::Approx(2.0));
    const Matrix a = drv->area(0.0, 1.0);
    CHECK(a(0, 0) == doctest::Approx(0.5));
    CHECK(a(0, 1) == doctest::Approx(1.0));
    CHECK(a(1, 0) == doctest::Approx(1.0));
    CHECK(a(1, 1) == doctest::Approx(2.0));
}

TEST_CASE("lift of a constant path vanishes") {
    const auto drv = lift_piecewise_linear(make_path({0.0, 0.3, 1.0}, {{1.5, -2.0}, {1.5, -2.0}, {1.5, -2.0}}));
    for (double s : {0.0, 0.2, 0.5})
        for (double t : {0.5, 0.9, 1.0}) {
            CHECK(max_norm(drv->increment(s, t)) == 0.0);
            CHECK(max_norm(drv->area(s, t)) == 0.0);
        }
}

TEST_CASE("L-shaped path area matches a fine Riemann sum") {
    const auto path = make_path({0.0, 0.5, 1.0}, {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}});
    const auto drv = lift_piecewise_linear(path);
    const Matrix oracle = riemann_area(path, 0.0, 1.0, 1'000'000);
    const Matrix area = drv->area(0.0, 1.0);
    CHECK(max_norm(Matrix(area - oracle)) <= 1e-6);
    // frozen from the oracle: asymmetric off-diagonal
    CHECK(area(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(area(0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(area(1, 0)) <= 1e-15);
    CHECK(area(1, 1) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(max_norm(Vector(drv->increment(0.0, 1.0) - Vector::Ones(2))) <= 1e-15);

    // an interior window straddling the corner
    const Matrix inner = riemann_area(path, 0.3, 0.8, 200'000);
    CHECK(max_norm(Matrix(drv->area(0.3, 0.8) - inner)) <= 1e-6);
}

TEST_CASE("lift preconditions") {
    CHECK_THROWS_AS(lift_piecewise_linear(make_path({0.0}, {{1.0}})), InvalidArgument);
    CHECK_THROWS_AS(lift_piecewise_linear(make_path({0.0, 0.0}, {{1.0}, {2.0}})), InvalidArgument);
    SampledPath mismatched = make_path({0.0, 1.0}, {{1.0}, {2.0}});
    mismatched.times.push_back(2.0);
    CHECK_THROWS_AS(lift_piecewise_linear(mismatched), InvalidArgument);
    const auto drv = lift_piecewise_linear(make_path({0.0, 1.0}, {{0.0}, {1.0}}));
    CHECK_THROWS_AS(drv->increment(0.0, 1.5), InvalidArgument);
}

TEST_CASE("synthetic midpoint path") {
    const auto a = synth_midpoint_path(7, 0.45, 10, 2);
    const auto b = synth_midpoint_path(7, 0.45, 10, 2);
    CHECK(a.times == b.times);
    CHECK((a.values.array() == b.values.array()).all());
    CHECK(synth_midpoint_path(7, 0.45, 1, 3).size() == 3);
    CHECK(synth_midpoint_path(7, 0.45, 1, 3).times == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(a.size() == 1025);
    CHECK_FALSE((synth_midpoint_path(8, 0.45, 10, 2).values.array() == a.values.array()).all());
    CHECK_THROWS_AS(synth_midpoint_path(7, 0.0, 4, 1), InvalidArgument);
    CHECK_THROWS_AS(synth_midpoint_path(7, 1.0, 4, 1), InvalidArgument);
    CHECK_THROWS_AS(synth_midpoint_path(7, 0.4, 0, 1), InvalidArgument);

    const auto g = synth_midpoint_path(7, 0.45, 10, 2, Displacement::Gaussian);
    CHECK(g.size() == 1025);
    CHECK_FALSE((g.values.array() == a.values.array()).all());
}

TEST_CASE("synthetic path has Hoelder exponent alpha") {
    const double alpha = 0.45;
    std::vector<double> above;
    std::vector<double> below;
    for (int levels = 6; levels <= 12; ++levels) {
        const auto p = synth_midpoint_path(11, alpha, levels, 2);
        above.push_back(hoelder_seminorm(p, alpha + 0.05));
        below.push_back(hoelder_seminorm(p, alpha - 0.05));
    }
    for (std::size_t k = 1; k < above.size(); ++k) CHECK(above[k] > above[k - 1]);
    // 2^{0.05} per level, compounding over six levels
    CHECK(above.back() / above.front() > std::pow(2.0, 0.05 * 6) * 0.9);
    // below alpha the seminorm saturates: the last two levels add little
    CHECK(below.back() / below[below.size() - 3] < 1.05);
    CHECK(above.back() / above[above.size() - 3] > 1.1);
}

TEST_CASE("chen defect") {
    std::mt19937_64 rng(3);
    const auto drv = lift_piecewise_linear(random_path(rng, 3, 40));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        double t[3] = {unit(rng), unit(rng), unit(rng)};
        std::sort(t, t + 3);
        CHECK(chen_defect(*drv, t[0], t[1], t[2]) <= 1e-12);
    }
    CHECK(chen_defect(*drv, 0.4, 0.4, 0.4) == 0.0);
    CHECK_THROWS_AS(chen_defect(*drv, 0.5, 0.4, 0.6), InvalidArgument);

    const ZeroAreaDriver broken(drv);
    const double s = 0.1, u = 0.45, t = 0.9;
    const double expected = max_norm(Matrix(drv->increment(s, u) * drv->increment(u, t).transpose()));
    CHECK(expected > 0.0);
    CHECK(chen_defect(broken, s, u, t) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("increment additivity and area scaling") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto path = random_path(rng, 2, 16);
        SampledPath doubled = path;
        doubled.values *= 2.0;
        const auto drv = lift_piecewise_linear(path);
        const auto drv2 = lift_piecewise_linear(doubled);
        for (int i = 0; i < 20; ++i) {
            double t[3] = {unit(rng), unit(rng), unit(rng)};
            std::sort(t, t + 3);
            const Vector gap = drv->increment(t[0], t[2]) - drv->increment(t[0], t[1]) - drv->increment(t[1], t[2]);
            CHECK(max_norm(gap) <= 1e-12);
            const Matrix a = drv->area(t[0], t[2]);
            const Matrix a2 = drv2->area(t[0], t[2]);
            CHECK(max_norm(Matrix(a2 - 4.0 * a)) <= 1e-12 * std::max(1.0, max_norm(a2)));
        }
    }
}

TEST_CASE("hoelder seminorm") {
    SampledPath line;
    line.values = Matrix(65, 1);
    for (int k = 0; k <= 64; ++k) {
        line.times.push_back(k / 64.0);
        line.values(k, 0) = k / 64.0;
    }
    CHECK(hoelder_seminorm(line, 0.5) == doctest::Approx(1.0).epsilon(1e-15));

    SampledPath flat = line;
    flat.values.setConstant(3.0);
    CHECK(hoelder_seminorm(flat, 0.5) == 0.0);

    const auto rough = synth_midpoint_path(2, 0.4, 8, 2);
    SampledPath doubled = rough;
    doubled.values *= 2.0;
    CHECK(hoelder_seminorm(doubled, 0.4) == doctest::Approx(2.0 * hoelder_seminorm(rough, 0.4)).epsilon(1e-14));

    // nondecreasing in beta on [0, 1]
    double previous = 0.0;
    for (double beta : {0.1, 0.2, 0.3, 0.4, 0.5, 0.7, 1.0}) {
        const double value = hoelder_seminorm(rough, beta);
        CHECK(value >= previous);
        previous = value;
    }

    SampledPath one_point;
    one_point.times = {0.0};
    one_point.values = Matrix::Zero(1, 1);
    CHECK_THROWS_AS(hoelder_seminorm(one_point, 0.5), InvalidArgument);
    CHECK_THROWS_AS(hoelder_seminorm(line, 0.0), InvalidArgument);
}

TEST_CASE("path csv round trip") {
    const auto path = synth_midpoint_path(4, 0.45, 6, 3);
    std::stringstream buffer;
    write_path_csv(buffer, path);
    CHECK(buffer.str().rfind("t,x1,x2,x3\n", 0) == 0);
    const auto back = read_path_csv(buffer);
    CHECK(back.times == path.times);
    CHECK((back.values.array() == path.values.array()).all());

    std::stringstream bad("t,x1\n0,1\n0,2\n");
    CHECK_THROWS_AS(read_path_csv(bad), InvalidArgument);
    std::stringstream bad_header("time,x1\n0,1\n");
    CHECK_THROWS_AS(read_path_csv(bad_header), InvalidArgument);
}
