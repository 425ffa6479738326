#pragma once

// Reference computations that share no code with the library beyond SymMatrix.

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Dense>

#include "seclossy/matkernel.hpp"

namespace oracle {

using seclossy::Matrix;
using seclossy::SymMatrix;

inline Matrix inv(const Matrix& a) { return Eigen::FullPivLU<Matrix>(a).inverse(); }

inline double log_det(const Matrix& a) { return std::log(a.determinant()); }

inline double rel(const Matrix& a, const Matrix& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

inline double min_eig(const Matrix& a) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (a + a.transpose())).eigenvalues().minCoeff();
}

// Covariance of the first block given the second, from a joint covariance.
inline Matrix schur(const Matrix& joint, Eigen::Index n) {
  const Eigen::Index m = joint.rows() - n;
  return joint.topLeftCorner(n, n) -
         joint.topRightCorner(n, m) * inv(joint.bottomRightCorner(m, m)) * joint.bottomLeftCorner(m, n);
}

// K_{X|Y} for Y = X + N from the joint covariance of (X, Y).
inline Matrix cond_cov_xy(const Matrix& kx, const Matrix& sy) {
  const Eigen::Index n = kx.rows();
  Matrix joint(2 * n, 2 * n);
  joint << kx, kx, kx, kx + sy;
  return schur(joint, n);
}

// Same objective as the library, written with determinants.
inline double leakage(const Matrix& kx, const Matrix& sy, const Matrix& sz, const Matrix& v, const Matrix& u) {
  return 0.5 * (log_det(kx) - log_det(v)) - 0.5 * (log_det(u + sy) - log_det(v + sy)) +
         0.5 * (log_det(u + sz) - log_det(sz));
}

inline double scalar_leakage(double sx, double sy, double sz, double sv, double su) {
  return 0.5 * std::log(sx / sv) - 0.5 * std::log((su + sy) / (sv + sy)) + 0.5 * std::log((su + sz) / sz);
}

struct GridMin {
  double s_v = 0.0;
  double s_u = 0.0;
  double value = INFINITY;
};

// Uniform n x n grid over s_u in (0, sx] and s_v in (0, min(f, s_u)].
inline GridMin scalar_grid(double sx, double sy, double sz, double d, int n) {
  const double f = sy * d / (sy - d);
  GridMin best;
  for (int i = 1; i <= n; ++i) {
    const double su = sx * i / n;
    const double cap = std::min(f, su);
    for (int j = 1; j <= n; ++j) {
      const double sv = cap * j / n;
      const double val = scalar_leakage(sx, sy, sz, sv, su);
      if (val < best.value) {
        best = {sv, su, val};
      }
    }
  }
  return best;
}

// Uniform grid minimum of a one-variable function on (0, hi].
inline double grid_1d(const std::function<double(double)>& fn, double hi, int n) {
  double best = INFINITY;
  for (int i = 1; i <= n; ++i) {
    best = std::min(best, fn(hi * i / n));
  }
  return best;
}

// Central-difference gradient of fn at x in the symmetric basis, as a matrix of
// partial derivatives with off-diagonal entries halved to match the Frobenius pairing.
inline Matrix fd_gradient(const std::function<double(const Matrix&)>& fn, const Matrix& x, double h) {
  const Eigen::Index n = x.rows();
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      Matrix e = Matrix::Zero(n, n);
      e(i, j) = 1.0;
      e(j, i) = 1.0;
      const double diff = (fn(x + h * e) - fn(x - h * e)) / (2.0 * h);
      g(i, j) = g(j, i) = i == j ? diff : 0.5 * diff;
    }
  }
  return g;
}

}  // namespace oracle
