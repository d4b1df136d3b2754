#pragma once

#include "rdesplit/rough_path.hpp"
#include "rdesplit/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rdesplit {

// ---------------------------------------------------------------------------
// Coefficient field f : R^n -> R^{n x d}
// ---------------------------------------------------------------------------

/// Immutable coefficient field with a user-supplied gradient.
///
/// The declared regularity gamma and the sup bounds are metadata the caller
/// vouches for; gradient_check() validates the gradient numerically.
class VectorField {
public:
    using ValueFn = std::function<Matrix(const Vector&)>;
    using GradientFn = std::function<FieldGradient(const Vector&)>;

    VectorField(std::string name, int n, int d, double gamma, ValueFn value, GradientFn gradient,
                double sup_value, double sup_gradient);

    const std::string& name() const noexcept { return name_; }
    int state_dim() const noexcept { return n_; }
    int driver_dim() const noexcept { return d_; }
    double gamma() const noexcept { return gamma_; }
    double sup_value() const noexcept { return sup_value_; }
    double sup_gradient() const noexcept { return sup_gradient_; }

    Matrix value(const Vector& x) const;
    FieldGradient gradient(const Vector& x) const;

private:
    std::string name_;
    int n_;
    int d_;
    double gamma_;
    ValueFn value_;
    GradientFn gradient_;
    double sup_value_;
    double sup_gradient_;
};

VectorField zero_field(int n, int d, double gamma = 3.0);
VectorField constant_field(Matrix value, double gamma = 3.0);

/// f(y)_{:, a} = A_a y. Sup bounds are taken over the box |y|_max <= box_radius.
VectorField linear_field(std::vector<Matrix> coefficients, double box_radius, double gamma = 3.0);

/// f^i_a(y) = c_{ia} sin(<w_{ia}, y> + b_{ia}); bounded with all derivatives.
/// `weights[i * d + a]` is w_{ia} in R^n.
VectorField sine_field(Matrix amplitude, std::vector<Vector> weights, Matrix phase, double gamma = 3.0);

/// Deterministic presets with coefficients of size ~scale drawn from `seed`.
VectorField linear_field_preset(int n, int d, std::uint64_t seed, double scale = 0.5, double box_radius = 2.0,
                                double gamma = 3.0);
VectorField sine_field_preset(int n, int d, std::uint64_t seed, double scale = 1.0, double gamma = 3.0);

/// Max over `points` of |fd - grad|_max / max(1, |grad|_max), central differences at `step`.
double gradient_check(const VectorField& field, const std::vector<Vector>& points, double step = 1e-6);

/// Throws InvalidArgument unless dimensions agree and gamma > 1 / alpha.
void validate_pairing(const VectorField& field, const RoughDriver& driver);

/// sum_{m,b} grad[m](i, b) * direction^m * increment^b, i.e. grad f . direction applied to increment.
Vector apply_gradient(const FieldGradient& grad, const Vector& direction, const Vector& increment);

// ---------------------------------------------------------------------------
// Second-order map Z(x)_{s,t}
// ---------------------------------------------------------------------------

class SecondOrderMap {
public:
    using Fn = std::function<Vector(const Vector& x, double s, double t)>;

    SecondOrderMap(std::string name, int n, Fn fn);

    const std::string& name() const noexcept { return name_; }
    int state_dim() const noexcept { return n_; }

    /// Z(x)_{s,t}; exactly zero when s == t.
    Vector operator()(const Vector& x, double s, double t) const;

private:
    std::string name_;
    int n_;
    Fn fn_;
};

/// Z(x)^i_{s,t} = sum_{m,a,b} (d_m f^i_b)(x) f^m_a(x) XX^{ab}_{s,t}.
SecondOrderMap canonical_z(const VectorField& field, DriverPtr driver);

/// Same contraction against the transposed area XX^{ba}. Fails the cocycle condition
/// whenever the area is not symmetric and the field's A_a do not commute.
SecondOrderMap transposed_z(const VectorField& field, DriverPtr driver);

SecondOrderMap zero_z(int n);

/// Z(x)_{s,t} = scale |t - s|^exponent e_1: violates the |t-s|^{2 alpha} bound when exponent < 2 alpha.
SecondOrderMap rough_z(int n, double exponent, double scale = 1.0);

// ---------------------------------------------------------------------------
// Condition checkers (samplers: empirical constants with a witness)
// ---------------------------------------------------------------------------

struct Witness {
    Vector x;
    std::optional<Vector> y;  // second point, for the Lipschitz condition
    double s = 0.0;
    double u = 0.0;
    double t = 0.0;
};

struct CheckReport {
    std::string condition;
    double max_ratio = 0.0;
    std::size_t samples = 0;
    Witness witness;
    std::optional<double> box_radius;
};

struct TimeTriple {
    double s;
    double u;
    double t;
};

/// Every (t_i, t_j, t_k) with i <= j <= k and i < k.
std::vector<TimeTriple> grid_triples(const Grid& grid);

/// `count` points uniform in the box |x|_max <= radius.
std::vector<Vector> sample_box(int n, double radius, std::size_t count, std::uint64_t seed);

/// max |Z(x)_{s,t}| / |t - s|^{2 alpha} over xs and all grid pairs s < t.
CheckReport check_z_bound(const SecondOrderMap& z, const std::vector<Vector>& xs, const Grid& grid,
                          double alpha, std::optional<double> time_exponent = std::nullopt);

/// max |Z(x)_{s,t} - Z(y)_{s,t}| / (|x - y|^{gamma - 2} |t - s|^{2 alpha}); pairs with x == y are skipped.
CheckReport check_z_lipschitz(const SecondOrderMap& z, const std::vector<std::pair<Vector, Vector>>& pairs,
                              const Grid& grid, double alpha, double gamma,
                              std::optional<double> time_exponent = std::nullopt);

/// max |dZ(x)_{s,u,t} - (grad f f X_{s,u} (x) X_{u,t} + grad f Z(x)_{s,u} X_{u,t})| / |t - s|^{3 alpha}.
CheckReport check_z_cocycle(const SecondOrderMap& z, const VectorField& field, const RoughDriver& driver,
                            const std::vector<Vector>& xs, const std::vector<TimeTriple>& triples,
                            double alpha, std::optional<double> time_exponent = std::nullopt);

/// |dZ(x)_{s,u,t} - grad f f X_{s,u} (x) X_{u,t}|_max at a single point; zero for canonical Z on exact lifts.
double coboundary_mismatch(const SecondOrderMap& z, const VectorField& field, const RoughDriver& driver,
                           const Vector& x, double s, double u, double t);

}  // namespace rdesplit
