#include "seclossy/sampling.hpp"

namespace seclossy {

SymMatrix random_spd(Eigen::Index n, Rng& rng, double lo, double hi) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(lo, hi);
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      g(i, j) = normal(rng);
    }
  }
  const Matrix q = Eigen::HouseholderQR<Matrix>(g).householderQ();
  Vector e(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    e(i) = unif(rng);
  }
  return SymMatrix(q * e.asDiagonal() * q.transpose());
}

Matrix random_gain(Eigen::Index rows, Eigen::Index cols, Rng& rng, double norm) {
  std::normal_distribution<double> normal;
  Matrix h(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      h(i, j) = normal(rng);
    }
  }
  const double s = Eigen::JacobiSVD<Matrix>(h).singularValues()(0);
  return h * (norm / s);
}

AlignedInstance random_aligned(Eigen::Index n, Rng& rng, double lo, double hi) {
  AlignedModel m(random_spd(n, rng), random_spd(n, rng), random_spd(n, rng));
  const Matrix root = psd_sqrt(cond_cov_xy(m)).mat();
  return {m, SymMatrix(root * random_spd(n, rng, lo, hi).mat() * root)};
}

GeneralInstance random_general(Eigen::Index n, Rng& rng) {
  std::uniform_int_distribution<Eigen::Index> rows(1, n + 1);
  std::uniform_real_distribution<double> unif(0.1, 0.5);
  std::uniform_real_distribution<double> scale(0.3, 0.8);
  const SymMatrix k = random_spd(n, rng, 0.2, 1.0);
  const Matrix hy = random_gain(rows(rng), n, rng, unif(rng));
  const Matrix hz = random_gain(rows(rng), n, rng, unif(rng));
  GeneralModel g(k, hy, hz);
  return {g, scale(rng) * general_cond_cov_xy(g)};
}

AuxiliaryPair random_chain_pair(const SymMatrix& k_x, Rng& rng) {
  const Eigen::Index n = k_x.dim();
  const Matrix root = psd_sqrt(k_x).mat();
  const SymMatrix w_u = random_spd(n, rng, 0.3, 0.95);
  const Matrix root_u = root * psd_sqrt(w_u).mat();
  const SymMatrix w_v = random_spd(n, rng, 0.1, 0.95);
  return {SymMatrix(root_u * w_v.mat() * root_u.transpose()), SymMatrix(root * w_u.mat() * root)};
}

}  // namespace seclossy
