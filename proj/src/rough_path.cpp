#include "rdesplit/rough_path.hpp"

#include "rdesplit/errors.hpp"
#include "rdesplit/format.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

namespace rdesplit {

Grid::Grid(double T, int N) : T_(T), N_(N), h_(0.0) {
    require(std::isfinite(T) && T > 0.0, "grid: final time must be positive");
    require(N >= 1, "grid: number of steps must be >= 1");
    h_ = T / N;
}

double Grid::point(int j) const {
    require(j >= 0 && j <= N_, "grid: index out of range");
    if (j == N_) return T_;
    return T_ * static_cast<double>(j) / static_cast<double>(N_);
}

std::vector<double> Grid::points() const {
    std::vector<double> out(size());
    for (int j = 0; j <= N_; ++j) out[static_cast<std::size_t>(j)] = point(j);
    return out;
}

Grid make_uniform_grid(double T, int N) { return Grid(T, N); }

void SampledPath::validate() const {
    require(times.size() == static_cast<std::size_t>(values.rows()),
            "sampled path: times and values differ in length");
    for (std::size_t k = 1; k < times.size(); ++k)
        require(times[k] > times[k - 1], "sampled path: times must be strictly increasing");
    for (double t : times) require(std::isfinite(t), "sampled path: non-finite time");
    require(values.allFinite(), "sampled path: non-finite value");
}

PiecewiseLinearDriver::PiecewiseLinearDriver(SampledPath path, double alpha)
    : path_(std::move(path)), alpha_(alpha) {
    path_.validate();
    require(path_.size() >= 2, "lift: path needs at least 2 samples");
    require(path_.dimension() >= 1, "lift: path dimension must be >= 1");
    require(alpha > 0.0 && alpha <= 1.0, "lift: alpha label must lie in (0, 1]");

    const auto d = path_.values.cols();
    cumulative_area_.reserve(path_.size());
    cumulative_area_.push_back(Matrix::Zero(d, d));
    for (std::size_t k = 0; k + 1 < path_.size(); ++k) {
        const Vector from_start = (path_.values.row(k) - path_.values.row(0)).transpose();
        const Vector delta = (path_.values.row(k + 1) - path_.values.row(k)).transpose();
        // int over [t_k, t_{k+1}] of X_{t_0, r} (x) dX_r for a linear piece
        cumulative_area_.push_back(cumulative_area_.back() + from_start * delta.transpose() +
                                   0.5 * delta * delta.transpose());
    }
}

std::size_t PiecewiseLinearDriver::segment_of(double t) const {
    const auto& ts = path_.times;
    require(t >= ts.front() && t <= ts.back(), "driver: time " + format_double(t) + " outside domain");
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    std::size_t k = static_cast<std::size_t>(std::distance(ts.begin(), it));
    k = k == 0 ? 0 : k - 1;
    return std::min(k, ts.size() - 2);
}

Vector PiecewiseLinearDriver::position(double t) const {
    const std::size_t k = segment_of(t);
    const double a = path_.times[k];
    const double b = path_.times[k + 1];
    const double w = (t - a) / (b - a);
    return (path_.values.row(k) + w * (path_.values.row(k + 1) - path_.values.row(k))).transpose();
}

Matrix PiecewiseLinearDriver::area_from_start(double t) const {
    const std::size_t k = segment_of(t);
    const double a = path_.times[k];
    const double b = path_.times[k + 1];
    const double w = (t - a) / (b - a);
    const Vector from_start = (path_.values.row(k) - path_.values.row(0)).transpose();
    const Vector partial = (w * (path_.values.row(k + 1) - path_.values.row(k))).transpose();
    return cumulative_area_[k] + from_start * partial.transpose() + 0.5 * partial * partial.transpose();
}

Vector PiecewiseLinearDriver::increment(double s, double t) const {
    if (s == t) {
        (void)segment_of(s);
        return Vector::Zero(dimension());
    }
    return position(t) - position(s);
}

Matrix PiecewiseLinearDriver::area(double s, double t) const {
    if (s == t) {
        (void)segment_of(s);
        return Matrix::Zero(dimension(), dimension());
    }
    // Chen: XX_{0,t} = XX_{0,s} + XX_{s,t} + X_{0,s} (x) X_{s,t}
    const Vector x0 = path_.values.row(0).transpose();
    const Vector xs = position(s);
    const Vector xt = position(t);
    return area_from_start(t) - area_from_start(s) - (xs - x0) * (xt - xs).transpose();
}

std::shared_ptr<const PiecewiseLinearDriver> lift_piecewise_linear(SampledPath path, double alpha) {
    return std::make_shared<const PiecewiseLinearDriver>(std::move(path), alpha);
}

namespace {

// Box-Muller on raw 64-bit draws keeps the sequence identical across standard libraries.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace

SampledPath synth_midpoint_path(std::uint64_t seed, double alpha, int levels, int d, Displacement kind) {
    require(alpha > 0.0 && alpha < 1.0, "synth: alpha must lie in (0, 1)");
    require(levels >= 1 && levels <= 26, "synth: levels must lie in [1, 26]");
    require(d >= 1, "synth: dimension must be >= 1");

    const std::size_t intervals = std::size_t{1} << levels;
    SampledPath path;
    path.times.resize(intervals + 1);
    for (std::size_t k = 0; k <= intervals; ++k)
        path.times[k] = static_cast<double>(k) / static_cast<double>(intervals);
    path.values = Matrix::Zero(static_cast<Eigen::Index>(intervals + 1), d);

    GaussianSource gauss(seed);
    auto draw = [&] {
        const double g = gauss();
        if (kind == Displacement::Gaussian) return g;
        return g < 0.0 ? -1.0 : 1.0;
    };
    for (int a = 0; a < d; ++a) path.values(static_cast<Eigen::Index>(intervals), a) = draw();

    for (int level = 1; level <= levels; ++level) {
        const std::size_t stride = intervals >> level;
        const double amplitude = std::pow(2.0, -level * alpha);
        for (std::size_t mid = stride; mid < intervals; mid += 2 * stride) {
            const auto i = static_cast<Eigen::Index>(mid);
            const auto left = static_cast<Eigen::Index>(mid - stride);
            const auto right = static_cast<Eigen::Index>(mid + stride);
            for (int a = 0; a < d; ++a)
                path.values(i, a) = 0.5 * (path.values(left, a) + path.values(right, a)) + amplitude * draw();
        }
    }
    return path;
}

SampledPath smooth_curve_path(int d, double T, int samples) {
    require(d >= 1, "smooth curve: dimension must be >= 1");
    require(T > 0.0, "smooth curve: final time must be positive");
    require(samples >= 2, "smooth curve: needs at least 2 samples");
    SampledPath path;
    path.times.resize(static_cast<std::size_t>(samples));
    path.values = Matrix::Zero(samples, d);
    const Grid grid(T, samples - 1);
    for (int k = 0; k < samples; ++k) {
        const double t = grid.point(k);
        path.times[static_cast<std::size_t>(k)] = t;
        for (int a = 0; a < d; ++a)
            path.values(k, a) = std::sin(2.0 * std::numbers::pi * (a + 1) * t / T + 0.7 * a) / (a + 1);
    }
    return path;
}

SampledPath rescale_time(SampledPath path, double factor) {
    require(factor > 0.0, "rescale: factor must be positive");
    for (double& t : path.times) t *= factor;
    return path;
}

double chen_defect(const RoughDriver& driver, double s, double u, double t) {
    require(s <= u && u <= t, "chen_defect: times must satisfy s <= u <= t");
    const Matrix defect = driver.area(s, t) - driver.area(s, u) - driver.area(u, t) -
                          driver.increment(s, u) * driver.increment(u, t).transpose();
    return max_norm(defect);
}

double hoelder_seminorm(const SampledPath& path, double beta) {
    require(beta > 0.0 && beta <= 1.0, "hoelder_seminorm: beta must lie in (0, 1]");
    require(path.size() >= 2, "hoelder_seminorm: path needs at least 2 samples");
    path.validate();

    const auto m = path.size();
    const auto d = static_cast<std::size_t>(path.values.cols());
    // Row-major copy so the inner loop walks contiguous memory.
    std::vector<double> rows(m * d);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t a = 0; a < d; ++a)
            rows[i * d + a] = path.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a));

    double best = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double* xi = &rows[i * d];
        for (std::size_t j = i + 1; j < m; ++j) {
            const double* xj = &rows[j * d];
            double diff = 0.0;
            for (std::size_t a = 0; a < d; ++a) diff = std::max(diff, std::abs(xj[a] - xi[a]));
            if (diff == 0.0) continue;
            best = std::max(best, diff / std::pow(path.times[j] - path.times[i], beta));
        }
    }
    return best;
}

void write_path_csv(std::ostream& out, const SampledPath& path) {
    out << "t";
    for (int a = 1; a <= path.dimension(); ++a) out << ",x" << a;
    out << "\n";
    for (std::size_t k = 0; k < path.size(); ++k) {
        out << format_double(path.times[k]);
        for (int a = 0; a < path.dimension(); ++a)
            out << "," << format_double(path.values(static_cast<Eigen::Index>(k), a));
        out << "\n";
    }
}

SampledPath read_path_csv(std::istream& in) {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), "path csv: missing header");
    const auto header = split(trim(line), ',');
    require(header.size() >= 2 && trim(header[0]) == "t", "path csv: header must start with 't'");
    const auto d = static_cast<int>(header.size() - 1);
    for (int a = 1; a <= d; ++a)
        require(trim(header[static_cast<std::size_t>(a)]) == "x" + std::to_string(a),
                "path csv: expected column x" + std::to_string(a));

    std::vector<double> times;
    std::vector<double> flat;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto cells = split(trim(line), ',');
        require(cells.size() == header.size(), "path csv: row has wrong number of columns");
        times.push_back(parse_double(cells[0]));
        for (int a = 1; a <= d; ++a) flat.push_back(parse_double(cells[static_cast<std::size_t>(a)]));
    }
    SampledPath path;
    path.times = std::move(times);
    path.values = Matrix(static_cast<Eigen::Index>(path.times.size()), d);
    for (std::size_t k = 0; k < path.times.size(); ++k)
        for (int a = 0; a < d; ++a)
            path.values(static_cast<Eigen::Index>(k), a) = flat[k * static_cast<std::size_t>(d) + a];
    path.validate();
    return path;
}

}  // namespace rdesplit
