#include "seclossy/matkernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "seclossy/errors.hpp"

namespace seclossy {

namespace {

void require_square_nonempty(const Matrix& m) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw DimensionMismatch("symmetric matrix must be square with dim >= 1, got " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void require_same_dim(const SymMatrix& a, const SymMatrix& b, const char* what) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch(std::string(what) + ": dims " + std::to_string(a.dim()) + " and " +
                            std::to_string(b.dim()));
  }
}

Eigen::LLT<Matrix> factor_spd(const SymMatrix& a, const char* what) {
  Eigen::LLT<Matrix> llt(a.mat());
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite(std::string(what) + ": Cholesky factorization failed");
  }
  const auto diag = llt.matrixLLT().diagonal();
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (!(diag(i) > 0.0) || !std::isfinite(diag(i))) {
      throw NotPositiveDefinite(std::string(what) + ": non-positive pivot");
    }
  }
  return llt;
}

}  // namespace

SymMatrix::SymMatrix(const Matrix& m) {
  require_square_nonempty(m);
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::identity(Eigen::Index n) { return SymMatrix(Matrix::Identity(n, n)); }

SymMatrix SymMatrix::zero(Eigen::Index n) { return SymMatrix(Matrix::Zero(n, n)); }

SymMatrix SymMatrix::diagonal(const Vector& d) { return SymMatrix(Matrix(d.asDiagonal())); }

SymMatrix SymMatrix::congruence(const Matrix& t) const {
  if (t.cols() != dim()) {
    throw DimensionMismatch("congruence: transform has " + std::to_string(t.cols()) +
                            " columns, matrix dim " + std::to_string(dim()));
  }
  return SymMatrix(t * m_ * t.transpose());
}

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
  require_same_dim(a, b, "operator+");
  return SymMatrix(a.m_ + b.m_);
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
  require_same_dim(a, b, "operator-");
  return SymMatrix(a.m_ - b.m_);
}

SymMatrix operator-(const SymMatrix& a) { return SymMatrix(-a.m_); }

SymMatrix operator*(double s, const SymMatrix& a) { return SymMatrix(s * a.m_); }

Vector eigenvalues(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.mat(), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double min_eigenvalue(const SymMatrix& a) { return eigenvalues(a).minCoeff(); }

double max_abs_eigenvalue(const SymMatrix& a) { return eigenvalues(a).cwiseAbs().maxCoeff(); }

double default_psd_tolerance(const SymMatrix& a) { return 1e-9 * (1.0 + max_abs_eigenvalue(a)); }

PsdCheckReport psd_check(const SymMatrix& a, std::optional<double> tol) {
  const Vector ev = eigenvalues(a);
  PsdCheckReport report;
  report.min_eigenvalue = ev.minCoeff();
  report.tolerance_used = tol ? *tol : 1e-9 * (1.0 + ev.cwiseAbs().maxCoeff());
  report.is_psd = report.min_eigenvalue >= -report.tolerance_used;
  report.is_pd = report.min_eigenvalue > report.tolerance_used;
  return report;
}

double logdet(const SymMatrix& a) {
  const auto llt = factor_spd(a, "logdet");
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

bool psd_order(const SymMatrix& a, const SymMatrix& b, std::optional<double> tol) {
  require_same_dim(a, b, "psd_order");
  const SymMatrix diff = b - a;
  return psd_check(diff, tol).is_psd;
}

SymMatrix spd_inverse(const SymMatrix& a) {
  const auto llt = factor_spd(a, "spd_inverse");
  return SymMatrix(llt.solve(Matrix::Identity(a.dim(), a.dim())));
}

Matrix spd_solve(const SymMatrix& a, const Matrix& rhs) {
  if (rhs.rows() != a.dim()) {
    throw DimensionMismatch("spd_solve: right-hand side rows do not match");
  }
  return factor_spd(a, "spd_solve").solve(rhs);
}

SymMatrix woodbury_inverse(const SymMatrix& a, const Matrix& c, const SymMatrix& b) {
  if (c.rows() != a.dim() || c.cols() != b.dim()) {
    throw DimensionMismatch("woodbury_inverse: C must be dim(A) x dim(B)");
  }
  const SymMatrix a_inv = spd_inverse(a);
  const SymMatrix b_inv = spd_inverse(b);
  const Matrix a_inv_c = a_inv.mat() * c;
  const SymMatrix inner(b_inv.mat() + c.transpose() * a_inv_c);
  const Matrix inner_solve = factor_spd(inner, "woodbury_inverse inner factor").solve(a_inv_c.transpose());
  return SymMatrix(a_inv.mat() - a_inv_c * inner_solve);
}

SimultaneousDiagonalization simultaneous_diagonalize(const SymMatrix& a, const SymMatrix& b) {
  require_same_dim(a, b, "simultaneous_diagonalize");
  const Eigen::Index n = a.dim();
  for (const SymMatrix* m : {&a, &b}) {
    const Vector ev = eigenvalues(*m);
    if (!ev.allFinite() || ev.minCoeff() < -1e-9 * (1.0 + ev.cwiseAbs().maxCoeff())) {
      throw Degenerate("simultaneous_diagonalize: inputs must be PSD");
    }
  }

  SimultaneousDiagonalization out;
  Eigen::SelfAdjointEigenSolver<Matrix> whiten((a + b).mat());
  const Vector sigma = whiten.eigenvalues();
  const Matrix p = whiten.eigenvectors();
  const double scale = std::max(sigma.maxCoeff(), 0.0);
  if (scale == 0.0) {
    out.w = Matrix::Identity(n, n);
    out.lambda_a = Vector::Zero(n);
    out.lambda_b = Vector::Zero(n);
    out.w_condition = 1.0;
    return out;
  }

  // Whiten the numerical range of a + b with (a + b + eps I)^{1/2}; both inputs
  // vanish on the complement, where w gets unit-scale rows and lambda = 0.
  const double eps = 1e-12 * std::max(sigma.sum(), 0.0);
  std::vector<Eigen::Index> range;
  std::vector<Eigen::Index> null;
  for (Eigen::Index i = 0; i < n; ++i) {
    (sigma(i) > eps ? range : null).push_back(i);
  }
  const auto r = static_cast<Eigen::Index>(range.size());
  Matrix t(r, n);
  Vector root(r);
  for (Eigen::Index k = 0; k < r; ++k) {
    root(k) = std::sqrt(sigma(range[k]) + eps);
    t.row(k) = p.col(range[k]).transpose() / root(k);
  }
  const SymMatrix a_white = a.congruence(t);
  Eigen::SelfAdjointEigenSolver<Matrix> rot(a_white.mat());
  const Matrix q = rot.eigenvectors();
  const Matrix b_white = q.transpose() * b.congruence(t).mat() * q;

  out.w.resize(n, n);
  out.lambda_a = Vector::Zero(n);
  out.lambda_b = Vector::Zero(n);
  Matrix unwhiten(r, n);
  for (Eigen::Index k = 0; k < r; ++k) {
    unwhiten.row(k) = p.col(range[k]).transpose() * root(k);
  }
  out.w.topRows(r) = q.transpose() * unwhiten;
  for (Eigen::Index k = 0; k < r; ++k) {
    out.lambda_a(k) = std::max(rot.eigenvalues()(k), 0.0);
    out.lambda_b(k) = std::max(b_white(k, k), 0.0);
  }
  const double null_scale = std::sqrt(scale);
  for (std::size_t k = 0; k < null.size(); ++k) {
    out.w.row(r + static_cast<Eigen::Index>(k)) = null_scale * p.col(null[k]).transpose();
  }

  Eigen::JacobiSVD<Matrix> svd(out.w);
  const Vector sv = svd.singularValues();
  out.w_condition = sv(0) / sv(sv.size() - 1);
  if (!std::isfinite(out.w_condition) || out.w_condition > 1e15) {
    throw Degenerate("simultaneous_diagonalize: transform is numerically singular");
  }
  return out;
}

Vector diag_pseudo_inverse(const Vector& lambda, double zero_tol) {
  Vector out(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    out(i) = lambda(i) > zero_tol ? 1.0 / lambda(i) : 0.0;
  }
  return out;
}

SymMatrix project_psd(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.mat());
  const Vector clipped = es.eigenvalues().cwiseMax(0.0);
  return SymMatrix(es.eigenvectors() * clipped.asDiagonal() * es.eigenvectors().transpose());
}

SymMatrix psd_sqrt(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a.mat());
  const Vector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return SymMatrix(es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose());
}

}  // namespace seclossy
