#include "rdesplit/splitting.hpp"

#include "rdesplit/errors.hpp"
#include "rdesplit/format.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace rdesplit {

SplitStep split_step(const Vector& u, double s, double t, const VectorField& field, const SecondOrderMap& z,
                     const RoughDriver& driver) {
    require(s < t, "split_step: need s < t");
    if (!all_finite(u)) throw NumericFailure("split_step: non-finite state", 0);
    SplitStep out;
    out.v = u + field.value(u) * driver.increment(s, t);
    out.u_next = out.v + z(out.v, s, t);
    return out;
}

SplitTrajectory::SplitTrajectory(Grid grid, std::vector<Vector> u, std::vector<Vector> v, DriverPtr driver,
                                 VectorField field, SecondOrderMap z)
    : grid_(grid), u_(std::move(u)), v_(std::move(v)), driver_(std::move(driver)), field_(std::move(field)),
      z_(std::move(z)) {
    require(u_.size() == grid_.size(), "trajectory: need N + 1 grid values");
    require(v_.size() + 1 == grid_.size(), "trajectory: need N stage-1 values");
}

Vector SplitTrajectory::eval_joined(double t) const {
    const double T = grid_.final_time();
    require(t >= 0.0 && t <= T, "eval_joined: time outside [0, T]");
    const int N = grid_.steps();

    // j with t_j < t <= t_{j+1}, or an exact grid hit.
    int j = std::clamp(static_cast<int>(std::floor(t / grid_.step_size())), 0, N);
    while (j > 0 && grid_.point(j) > t) --j;
    while (j < N && grid_.point(j + 1) <= t) ++j;
    if (grid_.point(j) == t) return u_[static_cast<std::size_t>(j)];

    const double left = grid_.point(j);
    const double right = grid_.point(j + 1);
    const double half = 0.5 * (left + right);
    const auto idx = static_cast<std::size_t>(j);
    if (t <= half) {
        const double stage_time = t == half ? right : std::min(right, left + 2.0 * (t - left));
        return u_[idx] + field_.value(u_[idx]) * driver_->increment(left, stage_time);
    }
    const double stage_time = std::min(right, left + 2.0 * (t - half));
    return v_[idx] + z_(v_[idx], left, stage_time);
}

SplitTrajectory solve_split(DriverPtr driver, const VectorField& field, const SecondOrderMap& z, const Vector& y0,
                            const Grid& grid) {
    require(driver != nullptr, "solve_split: driver is null");
    validate_pairing(field, *driver);
    require(z.state_dim() == field.state_dim(), "solve_split: Z and field state dimensions differ");
    require(y0.size() == field.state_dim(), "solve_split: initial condition has wrong dimension");
    require(grid.final_time() <= driver->end_time() && driver->start_time() <= 0.0,
            "solve_split: grid exceeds the driver's domain");
    if (!all_finite(y0)) throw NumericFailure("solve_split: non-finite initial condition", 0);

    const auto N = static_cast<std::size_t>(grid.steps());
    std::vector<Vector> u;
    std::vector<Vector> v;
    u.reserve(N + 1);
    v.reserve(N);
    u.push_back(y0);
    for (std::size_t j = 0; j < N; ++j) {
        const auto jj = static_cast<int>(j);
        SplitStep step = split_step(u.back(), grid.point(jj), grid.point(jj + 1), field, z, *driver);
        if (!all_finite(step.u_next) || !all_finite(step.v))
            throw NumericFailure("solve_split: state left the finite range", j);
        v.push_back(std::move(step.v));
        u.push_back(std::move(step.u_next));
    }
    return SplitTrajectory(grid, std::move(u), std::move(v), std::move(driver), field, z);
}

MilsteinTrajectory solve_milstein(const DriverPtr& driver, const VectorField& field, const SecondOrderMap& z,
                                  const Vector& y0, const Grid& grid) {
    require(driver != nullptr, "solve_milstein: driver is null");
    validate_pairing(field, *driver);
    require(z.state_dim() == field.state_dim(), "solve_milstein: Z and field state dimensions differ");
    require(y0.size() == field.state_dim(), "solve_milstein: initial condition has wrong dimension");
    require(grid.final_time() <= driver->end_time() && driver->start_time() <= 0.0,
            "solve_milstein: grid exceeds the driver's domain");
    if (!all_finite(y0)) throw NumericFailure("solve_milstein: non-finite initial condition", 0);

    MilsteinTrajectory out{grid, {}};
    out.values.reserve(grid.size());
    out.values.push_back(y0);
    for (int j = 0; j < grid.steps(); ++j) {
        const Vector& y = out.values.back();
        const double s = grid.point(j);
        const double t = grid.point(j + 1);
        Vector next = y + field.value(y) * driver->increment(s, t) + z(y, s, t);
        if (!all_finite(next)) throw NumericFailure("solve_milstein: state left the finite range", static_cast<std::size_t>(j));
        out.values.push_back(std::move(next));
    }
    return out;
}

std::vector<Vector> ode_reference(const PiecewiseLinearDriver& driver, const VectorField& field, const Vector& y0,
                                  const Grid& grid, int substeps) {
    validate_pairing(field, driver);
    require(substeps >= 1, "ode_reference: substeps must be >= 1");
    require(y0.size() == field.state_dim(), "ode_reference: initial condition has wrong dimension");
    const auto& knots = driver.path().times;

    auto rk4 = [&field](const Vector& y, const Vector& velocity, double dt) {
        const Vector k1 = field.value(y) * velocity;
        const Vector k2 = field.value(y + 0.5 * dt * k1) * velocity;
        const Vector k3 = field.value(y + 0.5 * dt * k2) * velocity;
        const Vector k4 = field.value(y + dt * k3) * velocity;
        return Vector(y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    };

    std::vector<Vector> out;
    out.reserve(grid.size());
    out.push_back(y0);
    Vector y = y0;
    for (int j = 0; j < grid.steps(); ++j) {
        const double a = grid.point(j);
        const double b = grid.point(j + 1);
        std::vector<double> breaks;
        for (int k = 1; k < substeps; ++k) breaks.push_back(a + (b - a) * k / substeps);
        breaks.push_back(b);
        for (std::size_t k = driver.segment_of(a) + 1; k < knots.size() && knots[k] < b; ++k)
            if (knots[k] > a) breaks.push_back(knots[k]);
        std::sort(breaks.begin(), breaks.end());
        double tau = a;
        for (double next : breaks) {
            if (next <= tau) continue;
            // the driver is linear on [tau, next], so dX = velocity dt there
            const Vector velocity = driver.increment(tau, next) / (next - tau);
            y = rk4(y, velocity, next - tau);
            if (!all_finite(y))
                throw NumericFailure("ode_reference: state left the finite range", static_cast<std::size_t>(j));
            tau = next;
        }
        out.push_back(y);
    }
    return out;
}

double max_grid_difference(const std::vector<Vector>& a, const std::vector<Vector>& b) {
    require(a.size() == b.size(), "max_grid_difference: sequences differ in length");
    double worst = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) worst = std::max(worst, max_norm(Vector(a[j] - b[j])));
    return worst;
}

void write_trajectory_csv(std::ostream& out, const SplitTrajectory& traj) {
    const int n = traj.field().state_dim();
    out << "j,t";
    for (int i = 1; i <= n; ++i) out << ",u" << i;
    for (int i = 1; i <= n; ++i) out << ",v" << i;
    out << "\n";
    for (std::size_t j = 0; j < traj.u().size(); ++j) {
        out << j << "," << format_double(traj.grid().point(static_cast<int>(j)));
        for (int i = 0; i < n; ++i) out << "," << format_double(traj.u()[j](i));
        for (int i = 0; i < n; ++i) {
            out << ",";
            if (j > 0) out << format_double(traj.v()[j - 1](i));
        }
        out << "\n";
    }
}

}  // namespace rdesplit
