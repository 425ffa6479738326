#pragma once

#include <Eigen/Dense>

#include <optional>

namespace seclossy {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Dense real symmetric matrix. Symmetry is enforced on construction by
/// averaging with the transpose, so entries(i, j) == entries(j, i) bitwise.
class SymMatrix {
 public:
  /// Default is the 1x1 zero matrix, so dim() >= 1 always holds.
  SymMatrix() : m_(Matrix::Zero(1, 1)) {}
  explicit SymMatrix(const Matrix& m);

  static SymMatrix identity(Eigen::Index n);
  static SymMatrix zero(Eigen::Index n);
  static SymMatrix diagonal(const Vector& d);
  static SymMatrix scalar(double v) { return diagonal(Vector::Constant(1, v)); }

  Eigen::Index dim() const { return m_.rows(); }
  const Matrix& mat() const { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  double trace() const { return m_.trace(); }
  double norm() const { return m_.norm(); }

  /// t * this * t^T; t may be rectangular.
  SymMatrix congruence(const Matrix& t) const;

  friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
  friend SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
  friend SymMatrix operator-(const SymMatrix& a);
  friend SymMatrix operator*(double s, const SymMatrix& a);
  friend SymMatrix operator*(const SymMatrix& a, double s) { return s * a; }

 private:
  Matrix m_;
};

struct PsdCheckReport {
  double min_eigenvalue = 0.0;
  bool is_psd = false;
  bool is_pd = false;
  double tolerance_used = 0.0;
};

struct SimultaneousDiagonalization {
  Matrix w;  // non-singular, a = w^T diag(lambda_a) w, b = w^T diag(lambda_b) w
  Vector lambda_a;
  Vector lambda_b;
  double w_condition = 0.0;
};

/// Scale-aware cone tolerance: 1e-9 * (1 + max |eigenvalue|).
double default_psd_tolerance(const SymMatrix& a);

Vector eigenvalues(const SymMatrix& a);
double min_eigenvalue(const SymMatrix& a);
double max_abs_eigenvalue(const SymMatrix& a);

PsdCheckReport psd_check(const SymMatrix& a, std::optional<double> tol = std::nullopt);

/// Natural log of the determinant through a Cholesky factorization.
/// Throws NotPositiveDefinite when a pivot is not strictly positive.
double logdet(const SymMatrix& a);

/// True iff a <= b in the PSD order, i.e. min eig(b - a) >= -tol.
/// Without tol the default tolerance of (b - a) is used.
bool psd_order(const SymMatrix& a, const SymMatrix& b, std::optional<double> tol = std::nullopt);

SymMatrix spd_inverse(const SymMatrix& a);

/// Solves a * x = rhs for SPD a.
Matrix spd_solve(const SymMatrix& a, const Matrix& rhs);

/// (A + C B C^T)^{-1} = A^{-1} - A^{-1} C (B^{-1} + C^T A^{-1} C)^{-1} C^T A^{-1}.
SymMatrix woodbury_inverse(const SymMatrix& a, const Matrix& c, const SymMatrix& b);

SimultaneousDiagonalization simultaneous_diagonalize(const SymMatrix& a, const SymMatrix& b);

/// Entrywise 1/x for entries above zero_tol, 0 elsewhere.
Vector diag_pseudo_inverse(const Vector& lambda, double zero_tol);

/// Nearest PSD matrix in Frobenius norm (negative eigenvalues clipped to 0).
SymMatrix project_psd(const SymMatrix& a);

/// Symmetric square root of a PSD matrix (negative eigenvalues clipped).
SymMatrix psd_sqrt(const SymMatrix& a);

}  // namespace seclossy
