#include "seclossy/examples.hpp"

#include <cmath>

#include "seclossy/errors.hpp"

namespace seclossy {

namespace {

// I(V;X) - I(V;Y) + I(X;Z) with U = phi and K_{X|V} = s.
double phi_branch(const ScalarChannel& c, double s) {
  return 0.5 * std::log(c.sigx2 / s) - 0.5 * std::log((c.sigx2 + c.sigy2) / (s + c.sigy2)) +
         0.5 * std::log((c.sigx2 + c.sigz2) / c.sigz2);
}

// I(V;X) + I(X;Z|V) with U = V and K_{X|V} = s.
double same_branch(const ScalarChannel& c, double s) {
  return 0.5 * std::log(c.sigx2 / s) + 0.5 * std::log((s + c.sigz2) / c.sigz2);
}

}  // namespace

double ScalarChannel::f() const { return sigy2 * d / (sigy2 - d); }

void ScalarChannel::validate() const {
  if (!(sigx2 > 0.0 && sigy2 > 0.0 && sigz2 > 0.0)) {
    throw NotPositiveDefinite("scalar channel variances must be positive");
  }
  if (!(d > 0.0) || d > cond_var() * (1.0 + 1e-12)) {
    throw InfeasibleDistortion("scalar channel needs 0 < d <= sigx2 sigy2 / (sigx2 + sigy2)");
  }
}

void ParallelModel::validate() const {
  sub1.validate();
  sub2.validate();
  if (!(sub1.sigy2 < sub1.sigz2)) {
    throw InvalidOrder("parallel model: first subchannel needs sigy2 < sigz2");
  }
  if (!(sub2.sigz2 < sub2.sigy2)) {
    throw InvalidOrder("parallel model: second subchannel needs sigz2 < sigy2");
  }
}

double scalar_ie_min(const ScalarChannel& c) {
  c.validate();
  if (!(c.sigy2 < c.sigz2)) {
    throw InvalidOrder("scalar_ie_min: requires sigy2 < sigz2");
  }
  return phi_branch(c, c.f());
}

double scalar_ie_ins(const ScalarChannel& c) {
  c.validate();
  if (!(c.sigy2 < c.sigz2)) {
    throw InvalidOrder("scalar_ie_ins: requires sigy2 < sigz2");
  }
  const double s = c.f();
  return 0.5 * std::log(c.sigx2 / s) - 0.5 * std::log((c.sigx2 + c.sigz2) / (s + c.sigz2)) +
         0.5 * std::log((c.sigx2 + c.sigz2) / c.sigz2);
}

ParallelValue parallel_ie_min(const ParallelModel& p) {
  p.validate();
  const double t1 = phi_branch(p.sub1, p.sub1.f());
  const double t2 = same_branch(p.sub2, p.sub2.f());
  return {t1 + t2, t1, t2};
}

ParallelValue parallel_ie_min_phi(const ParallelModel& p) {
  p.validate();
  const double t1 = phi_branch(p.sub1, p.sub1.f());
  const double t2 = phi_branch(p.sub2, p.sub2.f());
  return {t1 + t2, t1, t2};
}

ParallelValue parallel_ie_min_s(const ParallelModel& p) {
  p.validate();
  const double t1 = same_branch(p.sub1, p.sub1.f());
  const double t2 = same_branch(p.sub2, p.sub2.f());
  return {t1 + t2, t1, t2};
}

AlignedModel parallel_as_aligned(const ParallelModel& p) {
  p.validate();
  auto diag = [](double a, double b) { return SymMatrix::diagonal((Vector(2) << a, b).finished()); };
  return AlignedModel(diag(p.sub1.sigx2, p.sub2.sigx2), diag(p.sub1.sigy2, p.sub2.sigy2),
                      diag(p.sub1.sigz2, p.sub2.sigz2));
}

SymMatrix parallel_distortion(const ParallelModel& p) {
  return SymMatrix::diagonal((Vector(2) << p.sub1.d, p.sub2.d).finished());
}

ScalarChannel example1_default() { return ScalarChannel{1.0, 0.5, 1.0, 0.25}; }

ParallelModel example2_default() { return ParallelModel{{1.0, 0.5, 1.0, 0.25}, {1.0, 1.0, 0.5, 0.25}}; }

std::vector<std::string> preset_names() { return {"example1-default", "example2-default"}; }

}  // namespace seclossy
