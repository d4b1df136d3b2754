#include "rdesplit/convergence.hpp"

#include "rdesplit/errors.hpp"
#include "rdesplit/format.hpp"
#include "rdesplit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <ostream>

namespace rdesplit {

double Problem::gamma() const { return std::min(field.gamma(), 3.0); }

double fit_rate(std::span<const double> x, std::span<const double> diffs) {
    require(x.size() == diffs.size(), "fit_rate: levels and diffs differ in length");
    const auto zeros = static_cast<std::size_t>(std::count(diffs.begin(), diffs.end(), 0.0));
    for (double d : diffs) require(std::isfinite(d) && d >= 0.0, "fit_rate: diffs must be finite and nonnegative");
    if (!diffs.empty() && zeros == diffs.size()) return kExactAgreement;
    require(zeros == 0, "fit_rate: mixed zero and positive diffs");
    require(diffs.size() >= 2, "fit_rate: need at least 2 positive diffs");

    const double n = static_cast<double>(diffs.size());
    const double mean_x = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double mean_y = 0.0;
    for (double d : diffs) mean_y += std::log2(d);
    mean_y /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        sxy += (x[i] - mean_x) * (std::log2(diffs[i]) - mean_y);
        sxx += (x[i] - mean_x) * (x[i] - mean_x);
    }
    require(sxx > 0.0, "fit_rate: levels must not all coincide");
    return -sxy / sxx;
}

namespace {

Grid problem_grid(const Problem& problem, int N) { return Grid(problem.T, N); }

/// Solves at every N, in parallel; numeric failures name the offending N.
std::vector<SplitTrajectory> solve_levels(const Problem& problem, const std::vector<int>& Ns) {
    std::vector<std::optional<SplitTrajectory>> slots(Ns.size());
    parallel_for(Ns.size(), [&](std::size_t i) {
        try {
            slots[i].emplace(solve_split(problem.driver, problem.field, problem.z, problem.y0,
                                         problem_grid(problem, Ns[i])));
        } catch (const NumericFailure& e) {
            throw NumericFailure("level N=" + std::to_string(Ns[i]) + ": " + e.what(), e.step());
        }
    });
    std::vector<SplitTrajectory> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

std::vector<int> dyadic_levels(int base_N, int count) {
    std::vector<int> Ns;
    for (int k = 0; k < count; ++k) Ns.push_back(base_N << k);
    return Ns;
}

/// Times k h / 4 of the coarse grid, with the grid points taken exactly.
std::vector<double> quarter_points(const Grid& grid) {
    std::vector<double> ts;
    ts.reserve(4 * static_cast<std::size_t>(grid.steps()) + 1);
    for (int j = 0; j < grid.steps(); ++j) {
        const double a = grid.point(j);
        const double b = grid.point(j + 1);
        ts.push_back(a);
        ts.push_back(a + 0.25 * (b - a));
        ts.push_back(0.5 * (a + b));
        ts.push_back(a + 0.75 * (b - a));
    }
    ts.push_back(grid.final_time());
    return ts;
}

SampledPath joined_difference(const SplitTrajectory& coarse, const SplitTrajectory& fine) {
    SampledPath diff;
    diff.times = quarter_points(coarse.grid());
    diff.values = Matrix(static_cast<Eigen::Index>(diff.times.size()), coarse.field().state_dim());
    for (std::size_t i = 0; i < diff.times.size(); ++i)
        diff.values.row(static_cast<Eigen::Index>(i)) =
            (coarse.eval_joined(diff.times[i]) - fine.eval_joined(diff.times[i])).transpose();
    return diff;
}

void check_level_args(int base_N, int levels) {
    require(levels >= 3, "rates: need levels >= 3");
    require(base_N >= 4, "rates: need base_N >= 4");
    require(static_cast<long long>(base_N) << levels <= (1LL << 26), "rates: finest grid too large");
}

void finish(RateReport& report) {
    std::vector<double> x;
    for (int N : report.levels) x.push_back(std::log2(static_cast<double>(N)));
    report.slope = fit_rate(x, report.diffs);
}

}  // namespace

RateReport dyadic_sup_rate(const Problem& problem, int base_N, int levels) {
    check_level_args(base_N, levels);
    const auto trajectories = solve_levels(problem, dyadic_levels(base_N, levels + 1));

    RateReport report;
    report.norm_kind = NormKind::Sup;
    report.target = problem.gamma() * problem.alpha() - 1.0;
    report.sampling = "coarse grid points, half- and quarter-points of the joined paths";
    for (int k = 0; k < levels; ++k) {
        const auto& coarse = trajectories[static_cast<std::size_t>(k)];
        const auto& fine = trajectories[static_cast<std::size_t>(k + 1)];
        const SampledPath diff = joined_difference(coarse, fine);
        report.levels.push_back(coarse.grid().steps());
        report.step_sizes.push_back(coarse.grid().step_size());
        report.diffs.push_back(max_norm(diff.values));
    }
    finish(report);
    return report;
}

RateReport holder_rate(const Problem& problem, double beta, int base_N, int levels) {
    require(beta > 0.0 && beta < problem.alpha(), "holder_rate: need 0 < beta < alpha");
    check_level_args(base_N, levels);
    const auto trajectories = solve_levels(problem, dyadic_levels(base_N, levels + 1));

    RateReport report;
    report.norm_kind = NormKind::Holder;
    report.beta = beta;
    report.target = std::min(problem.alpha() - beta, problem.gamma() * problem.alpha() - 1.0);
    report.sampling = "quarter-step samples of the coarse grid, all pairs";
    std::vector<double> seminorms(static_cast<std::size_t>(levels));
    std::vector<double> sups(static_cast<std::size_t>(levels));
    parallel_for(static_cast<std::size_t>(levels), [&](std::size_t k) {
        const SampledPath diff = joined_difference(trajectories[k], trajectories[k + 1]);
        seminorms[k] = hoelder_seminorm(diff, beta);
        sups[k] = max_norm(diff.values);
    });
    for (int k = 0; k < levels; ++k) {
        const auto& grid = trajectories[static_cast<std::size_t>(k)].grid();
        report.levels.push_back(grid.steps());
        report.step_sizes.push_back(grid.step_size());
    }
    report.diffs = std::move(seminorms);
    report.sup_diffs = std::move(sups);
    finish(report);
    return report;
}

std::vector<std::pair<int, int>> common_time_indices(int N, int q_num, int q_den) {
    require(q_num > 0 && q_den > 0 && std::gcd(q_num, q_den) == 1, "common times: q must be in lowest terms");
    require(N % q_den == 0, "common times: N must be divisible by the denominator of q");
    std::vector<std::pair<int, int>> out;
    for (int j = 0; j <= N; j += q_den) out.emplace_back(j, j / q_den * q_num);
    return out;
}

RateReport rational_rate(const Problem& problem, int q_num, int q_den, int base_N, int levels) {
    require(q_den > 0 && q_num > q_den && q_num < 2 * q_den, "rational_rate: need 1 < q < 2");
    require(std::gcd(q_num, q_den) == 1, "rational_rate: q must be in lowest terms");
    require(base_N % q_den == 0, "rational_rate: base_N must be divisible by the denominator of q");
    check_level_args(base_N, levels);

    std::vector<int> Ns = dyadic_levels(base_N, levels);
    for (int k = 0; k < levels; ++k) Ns.push_back((base_N << k) / q_den * q_num);
    const auto trajectories = solve_levels(problem, Ns);

    RateReport report;
    report.norm_kind = NormKind::Sup;
    report.target = problem.gamma() * problem.alpha() - 1.0;
    report.sampling = "coarse grid points, half- and quarter-points of the joined paths";
    for (int k = 0; k < levels; ++k) {
        const auto& coarse = trajectories[static_cast<std::size_t>(k)];
        const auto& fine = trajectories[static_cast<std::size_t>(levels + k)];
        const auto common = common_time_indices(coarse.grid().steps(), q_num, q_den);
        require(!common.empty(), "rational_rate: no common times");
        double common_sup = 0.0;
        for (const auto& [jc, jf] : common)
            common_sup = std::max(common_sup, max_norm(Vector(coarse.u()[static_cast<std::size_t>(jc)] -
                                                              fine.u()[static_cast<std::size_t>(jf)])));
        report.levels.push_back(coarse.grid().steps());
        report.step_sizes.push_back(coarse.grid().step_size());
        report.diffs.push_back(max_norm(joined_difference(coarse, fine).values));
        report.common_diffs.push_back(common_sup);
    }
    finish(report);
    return report;
}

Vector davie_increment(const SplitTrajectory& traj, const VectorField& field, const SecondOrderMap& z,
                       const RoughDriver& driver, int k, int m) {
    const auto& u = traj.u();
    require(k >= 0 && k <= m && static_cast<std::size_t>(m) < u.size(), "davie: indices out of range");
    const double tk = traj.grid().point(k);
    const double tm = traj.grid().point(m);
    const auto kk = static_cast<std::size_t>(k);
    return u[static_cast<std::size_t>(m)] - u[kk] - field.value(u[kk]) * driver.increment(tk, tm) - z(u[kk], tk, tm);
}

DavieReport davie_defect(const SplitTrajectory& traj, const VectorField& field, const SecondOrderMap& z,
                         const RoughDriver& driver, double gamma, double alpha) {
    require(gamma * alpha > 0.0, "davie: gamma * alpha must be positive");
    const int N = traj.grid().steps();
    const double exponent = gamma * alpha;
    constexpr int kExhaustiveLimit = 4096;

    std::vector<int> indices;
    const int stride = N <= kExhaustiveLimit ? 1 : (N + kExhaustiveLimit - 1) / kExhaustiveLimit;
    for (int k = 0; k < N; k += stride) indices.push_back(k);
    indices.push_back(N);

    struct Best {
        double ratio = 0.0;
        int k = 0;
        int m = 0;
        std::size_t pairs = 0;
    };
    std::vector<Best> per_row(indices.size());
    parallel_for(indices.size(), [&](std::size_t a) {
        Best best;
        const int k = indices[a];
        for (std::size_t b = a + 1; b < indices.size(); ++b) {
            const int m = indices[b];
            const double span = traj.grid().point(m) - traj.grid().point(k);
            const Vector J = davie_increment(traj, field, z, driver, k, m);
            if (!all_finite(J)) throw NumericFailure("davie: non-finite defect", static_cast<std::size_t>(k));
            const double ratio = max_norm(J) / std::pow(span, exponent);
            ++best.pairs;
            if (ratio > best.ratio) best = {ratio, k, m, best.pairs};
        }
        per_row[a] = best;
    });

    DavieReport report;
    report.h = traj.grid().step_size();
    for (const auto& row : per_row) {
        report.pairs += row.pairs;
        if (row.ratio > report.max_ratio) {
            report.max_ratio = row.ratio;
            report.k = row.k;
            report.m = row.m;
        }
    }
    return report;
}

SchemeGapReport compare_schemes(const Problem& problem, int base_N, int levels) {
    require(levels >= 2 && base_N >= 1, "compare_schemes: need levels >= 2 and base_N >= 1");
    SchemeGapReport report;
    report.levels = dyadic_levels(base_N, levels);
    report.gaps.resize(report.levels.size());
    parallel_for(report.levels.size(), [&](std::size_t i) {
        const Grid grid = problem_grid(problem, report.levels[i]);
        const auto split = solve_split(problem.driver, problem.field, problem.z, problem.y0, grid);
        const auto milstein = solve_milstein(problem.driver, problem.field, problem.z, problem.y0, grid);
        report.gaps[i] = max_grid_difference(split.u(), milstein.values);
    });
    std::vector<double> x;
    for (int N : report.levels) x.push_back(std::log2(static_cast<double>(N)));
    report.slope = fit_rate(x, report.gaps);
    return report;
}

std::vector<double> oracle_errors(const Problem& problem, const std::vector<int>& Ns, int substeps) {
    const auto* linear = dynamic_cast<const PiecewiseLinearDriver*>(problem.driver.get());
    require(linear != nullptr, "oracle: needs a piecewise-linear driver");
    std::vector<double> errors(Ns.size());
    parallel_for(Ns.size(), [&](std::size_t i) {
        const Grid grid = problem_grid(problem, Ns[i]);
        const auto split = solve_split(problem.driver, problem.field, problem.z, problem.y0, grid);
        errors[i] = max_grid_difference(split.u(), ode_reference(*linear, problem.field, problem.y0, grid, substeps));
    });
    return errors;
}

std::string norm_kind_name(const RateReport& report) {
    return report.norm_kind == NormKind::Sup ? "sup" : "holder(" + format_double(report.beta) + ")";
}

void write_rate_csv(std::ostream& out, const RateReport& report) {
    out << "level,N,h,diff,log2_diff\n";
    for (std::size_t k = 0; k < report.diffs.size(); ++k) {
        const double d = report.diffs[k];
        out << k << "," << report.levels[k] << "," << format_double(report.step_sizes[k]) << "," << format_double(d)
            << "," << (d > 0.0 ? format_double(std::log2(d)) : std::string("-inf")) << "\n";
    }
}

}  // namespace rdesplit
