#pragma once

#include <Eigen/Dense>

#include <vector>

namespace rdesplit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// grad[m](i, a) = d f^i_a / d y^m, one n x d matrix per state coordinate.
using FieldGradient = std::vector<Matrix>;

// Max-entry norm, used for every defect and ratio in the library.
template <typename Derived>
double max_norm(const Eigen::MatrixBase<Derived>& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace rdesplit
