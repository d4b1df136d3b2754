#pragma once

#include "rdesplit/model.hpp"
#include "rdesplit/rough_path.hpp"
#include "rdesplit/splitting.hpp"

#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rdesplit {

/// Everything a solve needs except the grid.
struct Problem {
    DriverPtr driver;
    VectorField field;
    SecondOrderMap z;
    Vector y0;
    double T = 1.0;

    double alpha() const { return driver->alpha(); }
    /// Declared regularity, capped at 3 (larger gamma gives no better rates).
    double gamma() const;
};

/// Reported as the slope when every measured difference is exactly zero.
inline constexpr double kExactAgreement = std::numeric_limits<double>::infinity();
inline bool is_exact_agreement(double slope) { return slope == kExactAgreement; }

/// Least-squares slope of -log2(diff) against the level index x.
/// All-zero diffs give kExactAgreement; a mix of zero and positive diffs is ill-posed.
double fit_rate(std::span<const double> x, std::span<const double> diffs);

enum class NormKind { Sup, Holder };

struct RateReport {
    std::vector<int> levels;  // coarse N per level
    std::vector<double> step_sizes;
    std::vector<double> diffs;
    double slope = 0.0;
    double target = 0.0;
    NormKind norm_kind = NormKind::Sup;
    double beta = 0.0;  // Hoelder exponent, for NormKind::Holder
    /// holder_rate: sup norm of the same differences on the same samples.
    std::vector<double> sup_diffs;
    /// rational_rate: sup over the common grid times only.
    std::vector<double> common_diffs;
    std::string sampling;
};

/// Compares Y^h and Y^{h/2} for N = base_N 2^k, k < levels, at the coarse grid
/// points and the half- and quarter-points of the joined paths. Target gamma alpha - 1.
RateReport dyadic_sup_rate(const Problem& problem, int base_N, int levels);

/// Discrete C^beta seminorm of Y^h - Y^{h/2} on quarter-step samples of the coarse grid.
/// Target min(alpha - beta, gamma alpha - 1).
RateReport holder_rate(const Problem& problem, double beta, int base_N, int levels);

/// Compares Y^h and Y^{h/q}, q = q_num / q_den in (1, 2) in lowest terms. Target gamma alpha - 1.
RateReport rational_rate(const Problem& problem, int q_num, int q_den, int base_N, int levels);

/// (coarse index, fine index) pairs of the times shared by the N-step grid and the
/// N q_num / q_den step grid: every q_den coarse steps, every q_num fine steps.
std::vector<std::pair<int, int>> common_time_indices(int N, int q_num, int q_den);

struct DavieReport {
    double h = 0.0;
    double max_ratio = 0.0;
    int k = 0;
    int m = 0;
    std::size_t pairs = 0;
};

/// max over k < m of |J_{km}| / (t_m - t_k)^{gamma alpha}, with
/// J_{km} = u_m - u_k - f(u_k) X_{t_k,t_m} - Z(u_k)_{t_k,t_m}.
/// Exhaustive for N <= 4096, otherwise on a uniformly strided index subset.
DavieReport davie_defect(const SplitTrajectory& traj, const VectorField& field, const SecondOrderMap& z,
                         const RoughDriver& driver, double gamma, double alpha);

Vector davie_increment(const SplitTrajectory& traj, const VectorField& field, const SecondOrderMap& z,
                       const RoughDriver& driver, int k, int m);

struct SchemeGapReport {
    std::vector<int> levels;
    std::vector<double> gaps;  // max grid difference, split vs. Milstein
    double slope = 0.0;
};

SchemeGapReport compare_schemes(const Problem& problem, int base_N, int levels);

/// Grid error of solve_split against the RK4 reference at h / substeps, one entry per N.
std::vector<double> oracle_errors(const Problem& problem, const std::vector<int>& Ns, int substeps = 64);

/// "level,N,h,diff,log2_diff"
void write_rate_csv(std::ostream& out, const RateReport& report);
std::string norm_kind_name(const RateReport& report);

}  // namespace rdesplit
