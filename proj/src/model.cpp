#include "rdesplit/model.hpp"

#include "rdesplit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace rdesplit {

VectorField::VectorField(std::string name, int n, int d, double gamma, ValueFn value, GradientFn gradient,
                         double sup_value, double sup_gradient)
    : name_(std::move(name)),
      n_(n),
      d_(d),
      gamma_(gamma),
      value_(std::move(value)),
      gradient_(std::move(gradient)),
      sup_value_(sup_value),
      sup_gradient_(sup_gradient) {
    require(n >= 1 && d >= 1, "field: dimensions must be >= 1");
    require(gamma > 2.0, "field: declared gamma must exceed 2");
    require(static_cast<bool>(value_) && static_cast<bool>(gradient_), "field: evaluators must be set");
}

Matrix VectorField::value(const Vector& x) const {
    require(x.size() == n_, "field: state has wrong dimension");
    return value_(x);
}

FieldGradient VectorField::gradient(const Vector& x) const {
    require(x.size() == n_, "field: state has wrong dimension");
    return gradient_(x);
}

VectorField zero_field(int n, int d, double gamma) {
    return VectorField(
        "zero", n, d, gamma, [n, d](const Vector&) { return Matrix::Zero(n, d).eval(); },
        [n, d](const Vector&) { return FieldGradient(static_cast<std::size_t>(n), Matrix::Zero(n, d)); }, 0.0,
        0.0);
}

VectorField constant_field(Matrix value, double gamma) {
    const auto n = static_cast<int>(value.rows());
    const auto d = static_cast<int>(value.cols());
    const double sup = max_norm(value);
    return VectorField(
        "constant", n, d, gamma, [value](const Vector&) { return value; },
        [n, d](const Vector&) { return FieldGradient(static_cast<std::size_t>(n), Matrix::Zero(n, d)); }, sup,
        0.0);
}

VectorField linear_field(std::vector<Matrix> coefficients, double box_radius, double gamma) {
    require(!coefficients.empty(), "linear field: needs at least one coefficient matrix");
    require(box_radius > 0.0, "linear field: box radius must be positive");
    const auto n = static_cast<int>(coefficients.front().rows());
    const auto d = static_cast<int>(coefficients.size());
    double sup_grad = 0.0;
    double row_sum = 0.0;
    for (const auto& a : coefficients) {
        require(a.rows() == n && a.cols() == n, "linear field: coefficients must be n x n");
        sup_grad = std::max(sup_grad, max_norm(a));
        row_sum = std::max(row_sum, a.cwiseAbs().rowwise().sum().maxCoeff());
    }
    auto value = [coefficients, n, d](const Vector& y) {
        Matrix out(n, d);
        for (int a = 0; a < d; ++a) out.col(a) = coefficients[static_cast<std::size_t>(a)] * y;
        return out;
    };
    auto gradient = [coefficients, n, d](const Vector&) {
        FieldGradient g(static_cast<std::size_t>(n), Matrix::Zero(n, d));
        for (int m = 0; m < n; ++m)
            for (int a = 0; a < d; ++a) g[static_cast<std::size_t>(m)].col(a) = coefficients[static_cast<std::size_t>(a)].col(m);
        return g;
    };
    return VectorField("linear", n, d, gamma, std::move(value), std::move(gradient), box_radius * row_sum, sup_grad);
}

VectorField sine_field(Matrix amplitude, std::vector<Vector> weights, Matrix phase, double gamma) {
    const auto n = static_cast<int>(amplitude.rows());
    const auto d = static_cast<int>(amplitude.cols());
    require(phase.rows() == n && phase.cols() == d, "sine field: phase must be n x d");
    require(weights.size() == static_cast<std::size_t>(n * d), "sine field: need n * d weight vectors");
    double sup_grad = 0.0;
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < d; ++a) {
            const auto& w = weights[static_cast<std::size_t>(i * d + a)];
            require(w.size() == n, "sine field: weight vectors must have length n");
            sup_grad = std::max(sup_grad, std::abs(amplitude(i, a)) * w.cwiseAbs().maxCoeff());
        }
    auto value = [=](const Vector& y) {
        Matrix out(n, d);
        for (int i = 0; i < n; ++i)
            for (int a = 0; a < d; ++a)
                out(i, a) = amplitude(i, a) * std::sin(weights[static_cast<std::size_t>(i * d + a)].dot(y) + phase(i, a));
        return out;
    };
    auto gradient = [=](const Vector& y) {
        FieldGradient g(static_cast<std::size_t>(n), Matrix::Zero(n, d));
        for (int i = 0; i < n; ++i)
            for (int a = 0; a < d; ++a) {
                const auto& w = weights[static_cast<std::size_t>(i * d + a)];
                const double c = amplitude(i, a) * std::cos(w.dot(y) + phase(i, a));
                for (int m = 0; m < n; ++m) g[static_cast<std::size_t>(m)](i, a) = c * w(m);
            }
        return g;
    };
    return VectorField("sine", n, d, gamma, std::move(value), std::move(gradient), max_norm(amplitude), sup_grad);
}

namespace {

Matrix uniform_matrix(std::mt19937_64& rng, int rows, int cols, double lo, double hi) {
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    return m;
}

}  // namespace

VectorField linear_field_preset(int n, int d, std::uint64_t seed, double scale, double box_radius, double gamma) {
    std::mt19937_64 rng(seed);
    std::vector<Matrix> coefficients;
    for (int a = 0; a < d; ++a) coefficients.push_back(uniform_matrix(rng, n, n, -scale, scale));
    return linear_field(std::move(coefficients), box_radius, gamma);
}

VectorField sine_field_preset(int n, int d, std::uint64_t seed, double scale, double gamma) {
    std::mt19937_64 rng(seed);
    Matrix amplitude = uniform_matrix(rng, n, d, 0.5 * scale, scale);
    Matrix phase = uniform_matrix(rng, n, d, 0.0, 3.0);
    std::vector<Vector> weights;
    for (int k = 0; k < n * d; ++k) weights.push_back(uniform_matrix(rng, n, 1, -1.0, 1.0).col(0));
    return sine_field(std::move(amplitude), std::move(weights), std::move(phase), gamma);
}

double gradient_check(const VectorField& field, const std::vector<Vector>& points, double step) {
    require(step > 0.0, "gradient_check: step must be positive");
    double worst = 0.0;
    for (const auto& x : points) {
        const FieldGradient g = field.gradient(x);
        for (int m = 0; m < field.state_dim(); ++m) {
            Vector plus = x;
            Vector minus = x;
            plus(m) += step;
            minus(m) -= step;
            const Matrix fd = (field.value(plus) - field.value(minus)) / (2.0 * step);
            const Matrix& exact = g[static_cast<std::size_t>(m)];
            worst = std::max(worst, max_norm(fd - exact) / std::max(1.0, max_norm(exact)));
        }
    }
    return worst;
}

void validate_pairing(const VectorField& field, const RoughDriver& driver) {
    require(field.driver_dim() == driver.dimension(),
            "pairing: field expects driver dimension " + std::to_string(field.driver_dim()) + " but driver has " +
                std::to_string(driver.dimension()));
    require(field.gamma() > 1.0 / driver.alpha(), "pairing: need gamma > 1 / alpha");
}

Vector apply_gradient(const FieldGradient& grad, const Vector& direction, const Vector& increment) {
    require(grad.size() == static_cast<std::size_t>(direction.size()), "apply_gradient: direction has wrong size");
    const auto n = grad.empty() ? Eigen::Index{0} : grad.front().rows();
    Vector out = Vector::Zero(n);
    for (std::size_t m = 0; m < grad.size(); ++m) {
        const double dm = direction(static_cast<Eigen::Index>(m));
        if (dm != 0.0) out.noalias() += dm * (grad[m] * increment);
    }
    return out;
}

SecondOrderMap::SecondOrderMap(std::string name, int n, Fn fn) : name_(std::move(name)), n_(n), fn_(std::move(fn)) {
    require(n >= 1, "second-order map: dimension must be >= 1");
    require(static_cast<bool>(fn_), "second-order map: evaluator must be set");
}

Vector SecondOrderMap::operator()(const Vector& x, double s, double t) const {
    require(x.size() == n_, "second-order map: state has wrong dimension");
    if (s == t) return Vector::Zero(n_);
    return fn_(x, s, t);
}

namespace {

// sum_{m,a,b} grad[m](i, b) f(m, a) area(a, b)
Vector contract(const FieldGradient& grad, const Matrix& f, const Matrix& area) {
    const Matrix weighted = f * area;  // (m, b)
    const auto n = f.rows();
    Vector out = Vector::Zero(n);
    for (Eigen::Index m = 0; m < n; ++m) out.noalias() += grad[static_cast<std::size_t>(m)] * weighted.row(m).transpose();
    return out;
}

SecondOrderMap area_contraction(std::string name, const VectorField& field, DriverPtr driver, bool transpose) {
    require(driver != nullptr, "canonical_z: driver is null");
    require(field.driver_dim() == driver->dimension(), "canonical_z: field and driver dimensions differ");
    return SecondOrderMap(std::move(name), field.state_dim(),
                          [field, driver, transpose](const Vector& x, double s, double t) {
                              const Matrix area = driver->area(s, t);
                              return contract(field.gradient(x), field.value(x),
                                              transpose ? Matrix(area.transpose()) : area);
                          });
}

}  // namespace

SecondOrderMap canonical_z(const VectorField& field, DriverPtr driver) {
    return area_contraction("canonical", field, std::move(driver), false);
}

SecondOrderMap transposed_z(const VectorField& field, DriverPtr driver) {
    return area_contraction("transposed", field, std::move(driver), true);
}

SecondOrderMap zero_z(int n) {
    return SecondOrderMap("zero", n, [n](const Vector&, double, double) { return Vector::Zero(n).eval(); });
}

SecondOrderMap rough_z(int n, double exponent, double scale) {
    require(exponent > 0.0, "rough_z: exponent must be positive");
    return SecondOrderMap("rough", n, [=](const Vector&, double s, double t) {
        Vector out = Vector::Zero(n);
        out(0) = scale * std::pow(std::abs(t - s), exponent);
        return out;
    });
}

std::vector<TimeTriple> grid_triples(const Grid& grid) {
    const auto pts = grid.points();
    std::vector<TimeTriple> out;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t k = i + 1; k < pts.size(); ++k)
            for (std::size_t j = i; j <= k; ++j) out.push_back({pts[i], pts[j], pts[k]});
    return out;
}

std::vector<Vector> sample_box(int n, double radius, std::size_t count, std::uint64_t seed) {
    require(n >= 1 && radius > 0.0, "sample_box: need n >= 1 and radius > 0");
    std::mt19937_64 rng(seed);
    std::vector<Vector> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) out.push_back(uniform_matrix(rng, n, 1, -radius, radius).col(0));
    return out;
}

CheckReport check_z_bound(const SecondOrderMap& z, const std::vector<Vector>& xs, const Grid& grid, double alpha,
                          std::optional<double> time_exponent) {
    require(!xs.empty(), "check_z_bound: empty sample set");
    require(alpha > 0.0, "check_z_bound: alpha must be positive");
    const double theta = time_exponent.value_or(2.0 * alpha);
    const auto pts = grid.points();

    CheckReport report;
    report.condition = "Z_st";
    report.witness.x = xs.front();
    for (const auto& x : xs)
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t k = i + 1; k < pts.size(); ++k) {
                const double ratio = max_norm(z(x, pts[i], pts[k])) / std::pow(pts[k] - pts[i], theta);
                ++report.samples;
                if (ratio > report.max_ratio) {
                    report.max_ratio = ratio;
                    report.witness = {x, std::nullopt, pts[i], pts[i], pts[k]};
                }
            }
    return report;
}

CheckReport check_z_lipschitz(const SecondOrderMap& z, const std::vector<std::pair<Vector, Vector>>& pairs,
                              const Grid& grid, double alpha, double gamma, std::optional<double> time_exponent) {
    require(gamma > 2.0, "check_z_lipschitz: gamma must exceed 2");
    const double theta = time_exponent.value_or(2.0 * alpha);
    const auto pts = grid.points();

    CheckReport report;
    report.condition = "Z_xy";
    bool any = false;
    for (const auto& [x, y] : pairs) {
        const double dist = max_norm(Vector(x - y));
        if (dist == 0.0) continue;
        if (!any) report.witness = {x, y, 0.0, 0.0, 0.0};
        any = true;
        const double space = std::pow(dist, gamma - 2.0);
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t k = i + 1; k < pts.size(); ++k) {
                const Vector diff = z(x, pts[i], pts[k]) - z(y, pts[i], pts[k]);
                const double ratio = max_norm(diff) / (space * std::pow(pts[k] - pts[i], theta));
                ++report.samples;
                if (ratio > report.max_ratio) {
                    report.max_ratio = ratio;
                    report.witness = {x, y, pts[i], pts[i], pts[k]};
                }
            }
    }
    require(any, "check_z_lipschitz: every pair has x == y");
    return report;
}

double coboundary_mismatch(const SecondOrderMap& z, const VectorField& field, const RoughDriver& driver,
                           const Vector& x, double s, double u, double t) {
    require(s <= u && u <= t, "coboundary: times must satisfy s <= u <= t");
    const Vector delta_z = z(x, s, t) - z(x, s, u) - z(x, u, t);
    const Vector expected = apply_gradient(field.gradient(x), field.value(x) * driver.increment(s, u),
                                           driver.increment(u, t));
    return max_norm(Vector(delta_z - expected));
}

CheckReport check_z_cocycle(const SecondOrderMap& z, const VectorField& field, const RoughDriver& driver,
                            const std::vector<Vector>& xs, const std::vector<TimeTriple>& triples, double alpha,
                            std::optional<double> time_exponent) {
    require(!xs.empty(), "check_z_cocycle: empty sample set");
    require(field.driver_dim() == driver.dimension(), "check_z_cocycle: field and driver dimensions differ");
    const double theta = time_exponent.value_or(3.0 * alpha);
    for (const auto& tr : triples)
        require(tr.s <= tr.u && tr.u <= tr.t, "check_z_cocycle: triple must satisfy s <= u <= t");

    CheckReport report;
    report.condition = "Z_sut";
    report.witness.x = xs.front();
    for (const auto& x : xs) {
        const Matrix f = field.value(x);
        const FieldGradient grad = field.gradient(x);
        for (const auto& tr : triples) {
            if (tr.s == tr.t) continue;
            const Vector x_su = driver.increment(tr.s, tr.u);
            const Vector x_ut = driver.increment(tr.u, tr.t);
            const Vector z_su = z(x, tr.s, tr.u);
            const Vector delta_z = z(x, tr.s, tr.t) - z_su - z(x, tr.u, tr.t);
            const Vector expected = apply_gradient(grad, f * x_su, x_ut) + apply_gradient(grad, z_su, x_ut);
            const double ratio = max_norm(Vector(delta_z - expected)) / std::pow(tr.t - tr.s, theta);
            ++report.samples;
            if (ratio > report.max_ratio) {
                report.max_ratio = ratio;
                report.witness = {x, std::nullopt, tr.s, tr.u, tr.t};
            }
        }
    }
    return report;
}

}  // namespace rdesplit
