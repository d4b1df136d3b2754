#pragma once

#include "rdesplit/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rdesplit {

/// Uniform time grid t_j = j * T / N on [0, T].
class Grid {
public:
    Grid(double T, int N);

    double final_time() const noexcept { return T_; }
    int steps() const noexcept { return N_; }
    double step_size() const noexcept { return h_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(N_) + 1; }

    /// t_j; the last point is exactly T.
    double point(int j) const;
    std::vector<double> points() const;

private:
    double T_;
    int N_;
    double h_;
};

Grid make_uniform_grid(double T, int N);

/// Discretely sampled path: strictly increasing times, one row of `values` per sample.
struct SampledPath {
    std::vector<double> times;
    Matrix values;  // samples x dimension

    int dimension() const noexcept { return static_cast<int>(values.cols()); }
    std::size_t size() const noexcept { return times.size(); }

    /// Throws InvalidArgument unless lengths match and times strictly increase.
    void validate() const;
};

/// A rough path (X, XX) of Hoelder exponent alpha. Implementations are immutable.
///
/// increment(s, t) is X_t - X_s and area(s, t) is the iterated integral
/// XX_{s,t} with entries XX^{ab} = int_s^t X^a_{s,r} dX^b_r.
class RoughDriver {
public:
    virtual ~RoughDriver() = default;

    virtual int dimension() const = 0;
    virtual double alpha() const = 0;
    virtual double start_time() const = 0;
    virtual double end_time() const = 0;

    virtual Vector increment(double s, double t) const = 0;
    virtual Matrix area(double s, double t) const = 0;

    /// Base-point evaluation, when the driver has one.
    virtual std::optional<Vector> value(double /*t*/) const { return std::nullopt; }
};

using DriverPtr = std::shared_ptr<const RoughDriver>;

/// Canonical lift of the linear interpolant of a sampled path.
///
/// Areas are assembled from per-segment closed forms so that Chen's relation
/// holds up to roundoff for every triple of query times.
class PiecewiseLinearDriver final : public RoughDriver {
public:
    PiecewiseLinearDriver(SampledPath path, double alpha);

    int dimension() const override { return static_cast<int>(path_.values.cols()); }
    double alpha() const override { return alpha_; }
    double start_time() const override { return path_.times.front(); }
    double end_time() const override { return path_.times.back(); }

    Vector increment(double s, double t) const override;
    Matrix area(double s, double t) const override;
    std::optional<Vector> value(double t) const override { return position(t); }

    const SampledPath& path() const noexcept { return path_; }

    /// Index k of the segment [t_k, t_{k+1}] containing t.
    std::size_t segment_of(double t) const;

private:
    Vector position(double t) const;
    Matrix area_from_start(double t) const;

    SampledPath path_;
    double alpha_;
    std::vector<Matrix> cumulative_area_;  // XX_{t_0, t_k}
};

/// Lifts `path` canonically; `alpha` is a label carried by the driver, not inferred.
std::shared_ptr<const PiecewiseLinearDriver> lift_piecewise_linear(SampledPath path, double alpha = 0.5);

enum class Displacement {
    Sign,      // +-1: the path is alpha-Hoelder with a scale-independent constant
    Gaussian,  // standard normal: Brownian-like, modulus carries a sqrt(log) factor
};

/// Midpoint-displacement path on [0, 1] with 2^levels + 1 samples. Level l moves each
/// new midpoint by 2^{-l * alpha} times an independent draw from `kind`.
SampledPath synth_midpoint_path(std::uint64_t seed, double alpha, int levels, int d,
                                Displacement kind = Displacement::Sign);

/// Smooth curve X^a_t = sin(2 pi (a + 1) t / T + 0.7 a) / (a + 1), sampled uniformly on [0, T].
SampledPath smooth_curve_path(int d, double T, int samples);

/// Returns a copy whose times are scaled by `factor`.
SampledPath rescale_time(SampledPath path, double factor);

/// || XX_{s,t} - XX_{s,u} - XX_{u,t} - X_{s,u} (x) X_{u,t} ||_max for s <= u <= t.
double chen_defect(const RoughDriver& driver, double s, double u, double t);

/// max over sample pairs of |X_{s,t}|_max / |t - s|^beta.
double hoelder_seminorm(const SampledPath& path, double beta);

/// CSV with header "t,x1,...,xd" and shortest round-trip decimal floats.
void write_path_csv(std::ostream& out, const SampledPath& path);
SampledPath read_path_csv(std::istream& in);

}  // namespace rdesplit
