#pragma once

#include "rdesplit/model.hpp"
#include "rdesplit/rough_path.hpp"

#include <iosfwd>
#include <vector>

namespace rdesplit {

struct SplitStep {
    Vector v;       // stage-1 endpoint: u + f(u) X_{s,t}
    Vector u_next;  // v + Z(v)_{s,t}
};

/// One interval of the two-stage splitting scheme. f is evaluated at the entering value u.
SplitStep split_step(const Vector& u, double s, double t, const VectorField& field, const SecondOrderMap& z,
                     const RoughDriver& driver);

/// Grid values u_j and stage-1 endpoints v_{j+1} of the splitting scheme,
/// plus lazy evaluation of the twice-speed joined-up path.
class SplitTrajectory {
public:
    SplitTrajectory(Grid grid, std::vector<Vector> u, std::vector<Vector> v, DriverPtr driver, VectorField field,
                    SecondOrderMap z);

    const Grid& grid() const noexcept { return grid_; }
    const std::vector<Vector>& u() const noexcept { return u_; }
    /// v()[j] is v_{j+1}, the stage-1 endpoint of interval [t_j, t_{j+1}].
    const std::vector<Vector>& v() const noexcept { return v_; }
    const RoughDriver& driver() const noexcept { return *driver_; }
    const DriverPtr& driver_ptr() const noexcept { return driver_; }
    const VectorField& field() const noexcept { return field_; }
    const SecondOrderMap& z() const noexcept { return z_; }

    /// Joined-up path: the first stage runs on (t_j, t_{j+1/2}], the second on (t_{j+1/2}, t_{j+1}],
    /// each at twice the speed. Equals u_j at t_j and v_{j+1} at t_{j+1/2}.
    Vector eval_joined(double t) const;

private:
    Grid grid_;
    std::vector<Vector> u_;
    std::vector<Vector> v_;
    DriverPtr driver_;
    VectorField field_;
    SecondOrderMap z_;
};

struct MilsteinTrajectory {
    Grid grid;
    std::vector<Vector> values;
};

SplitTrajectory solve_split(DriverPtr driver, const VectorField& field, const SecondOrderMap& z, const Vector& y0,
                            const Grid& grid);

/// Second-order Euler scheme y_{j+1} = y_j + f(y_j) X_{t_j,t_{j+1}} + Z(y_j)_{t_j,t_{j+1}}.
MilsteinTrajectory solve_milstein(const DriverPtr& driver, const VectorField& field, const SecondOrderMap& z,
                                  const Vector& y0, const Grid& grid);

/// Classical RK4 for dY = f(Y) dX along a piecewise-linear driver, with steps of h / substeps
/// further split at every driver knot. Returns values at the grid points.
std::vector<Vector> ode_reference(const PiecewiseLinearDriver& driver, const VectorField& field, const Vector& y0,
                                  const Grid& grid, int substeps = 64);

/// max_j |a_j - b_j|_max over two equally long state sequences.
double max_grid_difference(const std::vector<Vector>& a, const std::vector<Vector>& b);

/// Header "j,t,u1..un,v1..vn"; the v cells of row 0 are empty.
void write_trajectory_csv(std::ostream& out, const SplitTrajectory& traj);

}  // namespace rdesplit
