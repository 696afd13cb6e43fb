#include "stabaaa/barycentric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stabaaa/errors.hpp"
#include "stabaaa/pencil.hpp"
#include "stabaaa/stability.hpp"

namespace stabaaa {

namespace {

constexpr cplx kJ(0.0, 1.0);

double weight_norm(const std::vector<cplx>& w) {
  double s = 0.0;
  for (const cplx& x : w) s += std::norm(x);
  return std::sqrt(s);
}

void require_order(const BarycentricModel& m, const char* what) {
  if (m.order() == 0) throw ValidationError(std::string(what) + ": model has no support points");
}

// Index i with s == +j*l_i (sign = +1) or s == -j*l_i (sign = -1), else -1.
int coincident_support(const BarycentricModel& m, cplx s, int* sign) {
  if (s.real() != 0.0) return -1;
  for (std::size_t i = 0; i < m.order(); ++i) {
    if (s.imag() == m.support()[i]) {
      *sign = 1;
      return static_cast<int>(i);
    }
    if (s.imag() == -m.support()[i]) {
      *sign = -1;
      return static_cast<int>(i);
    }
  }
  return -1;
}

}  // namespace

BarycentricModel::BarycentricModel(std::vector<double> support, std::vector<cplx> values,
                                   std::vector<cplx> weights)
    : support_(std::move(support)), values_(std::move(values)), weights_(std::move(weights)) {
  if (support_.size() != values_.size() || support_.size() != weights_.size()) {
    throw ValidationError("BarycentricModel: support, values and weights differ in length");
  }
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (!(support_[i] > 0.0) || !std::isfinite(support_[i])) {
      throw ValidationError("BarycentricModel: support frequencies must be positive and finite");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (support_[j] == support_[i]) throw ValidationError("BarycentricModel: repeated support point");
    }
  }
}

BarycentricModel BarycentricModel::constant(double c0) {
  BarycentricModel m;
  m.c0_ = c0;
  return m;
}

BarycentricModel BarycentricModel::with_weights(std::vector<cplx> weights) const {
  return BarycentricModel(support_, values_, std::move(weights));
}

std::vector<bool> BarycentricModel::active_support() const {
  const double tol = 1e-14 * weight_norm(weights_);
  std::vector<bool> active(weights_.size());
  for (std::size_t i = 0; i < weights_.size(); ++i) active[i] = std::abs(weights_[i]) > tol;
  return active;
}

Eigen::VectorXd BarycentricModel::weight_vector() const {
  Eigen::VectorXd x(2 * order());
  for (std::size_t i = 0; i < order(); ++i) {
    x(2 * i) = weights_[i].real();
    x(2 * i + 1) = weights_[i].imag();
  }
  return x;
}

cplx BarycentricModel::operator()(cplx s) const { return evaluate(*this, s); }

BarycentricModel make_model(std::vector<double> support, std::vector<cplx> values, const Eigen::VectorXd& x) {
  if (x.size() != static_cast<Eigen::Index>(2 * support.size())) {
    throw ValidationError("make_model: weight vector must have 2k entries");
  }
  std::vector<cplx> w(support.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = cplx(x(2 * i), x(2 * i + 1));
  return BarycentricModel(std::move(support), std::move(values), std::move(w));
}

cplx evaluate(const BarycentricModel& m, cplx s) {
  if (m.order() == 0) return m.constant_term();
  int sign = 0;
  const int hit = coincident_support(m, s, &sign);
  const std::vector<bool> active = m.active_support();
  if (hit >= 0 && active[hit]) {
    const cplx h = m.values()[hit];
    return sign > 0 ? h : std::conj(h);
  }
  cplx num(0.0), den(0.0);
  for (std::size_t i = 0; i < m.order(); ++i) {
    if (static_cast<int>(i) == hit) continue;  // inactive weight at its own node: w_i = 0
    const cplx w = m.weights()[i];
    const cplx hw = m.values()[i] * w;
    const cplx c1 = 1.0 / (s - kJ * m.support()[i]);
    const cplx c2 = 1.0 / (s + kJ * m.support()[i]);
    num += hw * c1 + std::conj(hw) * c2;
    den += w * c1 + std::conj(w) * c2;
  }
  if (den == 0.0) throw DomainError("evaluate: denominator vanishes (pole)");
  return num / den;
}

cplx evaluate_denominator(const BarycentricModel& m, cplx s) {
  require_order(m, "evaluate_denominator");
  int sign = 0;
  if (coincident_support(m, s, &sign) >= 0) throw DomainError("evaluate_denominator: s is a support point");
  cplx den(0.0);
  for (std::size_t i = 0; i < m.order(); ++i) {
    const cplx w = m.weights()[i];
    den += w / (s - kJ * m.support()[i]) + std::conj(w) / (s + kJ * m.support()[i]);
  }
  return den;
}

cplx evaluate_numerator(const BarycentricModel& m, cplx s) {
  require_order(m, "evaluate_numerator");
  int sign = 0;
  if (coincident_support(m, s, &sign) >= 0) throw DomainError("evaluate_numerator: s is a support point");
  cplx num(0.0);
  for (std::size_t i = 0; i < m.order(); ++i) {
    const cplx hw = m.values()[i] * m.weights()[i];
    num += hw / (s - kJ * m.support()[i]) + std::conj(hw) / (s + kJ * m.support()[i]);
  }
  return num;
}

cplx evaluate_denominator_derivative(const BarycentricModel& m, cplx s) {
  require_order(m, "evaluate_denominator_derivative");
  int sign = 0;
  if (coincident_support(m, s, &sign) >= 0) {
    throw DomainError("evaluate_denominator_derivative: s is a support point");
  }
  cplx d(0.0);
  for (std::size_t i = 0; i < m.order(); ++i) {
    const cplx w = m.weights()[i];
    const cplx a = s - kJ * m.support()[i];
    const cplx b = s + kJ * m.support()[i];
    d -= w / (a * a) + std::conj(w) / (b * b);
  }
  return d;
}

std::vector<cplx> evaluate_on(const BarycentricModel& m, const FrequencyDataset& ds) {
  std::vector<cplx> out(ds.size());
  for (std::size_t v = 0; v < ds.size(); ++v) out[v] = evaluate(m, cplx(0.0, ds.freqs()[v]));
  return out;
}

double feedthrough(const BarycentricModel& m) {
  if (m.order() == 0) return m.constant_term();
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < m.order(); ++i) {
    num += (m.values()[i] * m.weights()[i]).real();
    den += m.weights()[i].real();
  }
  if (den == 0.0) throw DomainError("feedthrough: sum of Re(w_i) is zero, model is improper");
  return num / den;
}

cplx DescriptorRealization::transfer(cplx s) const {
  const Eigen::MatrixXcd pencil = s * E - A;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(pencil);
  const Eigen::VectorXcd x = lu.solve(B);
  return C * x;
}

cplx RealDescriptorRealization::transfer(cplx s) const {
  const Eigen::MatrixXcd pencil = s * E.cast<cplx>() - A.cast<cplx>();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(pencil);
  const Eigen::VectorXcd x = lu.solve(B.cast<cplx>());
  return (C.cast<cplx>() * x)(0);
}

namespace {

Eigen::VectorXcd lambda_diagonal(const BarycentricModel& m) {
  const auto k = static_cast<Eigen::Index>(m.order());
  Eigen::VectorXcd lam(2 * k + 1);
  for (Eigen::Index i = 0; i < k; ++i) {
    lam(2 * i) = kJ * m.support()[i];
    lam(2 * i + 1) = -kJ * m.support()[i];
  }
  lam(2 * k) = 1.0;
  return lam;
}

Eigen::MatrixXcd descriptor_e(Eigen::Index n) {
  Eigen::MatrixXcd E = Eigen::MatrixXcd::Identity(n, n);
  E(n - 1, n - 1) = 0.0;
  return E;
}

}  // namespace

DescriptorRealization build_descriptor_realization(const BarycentricModel& m) {
  require_order(m, "build_descriptor_realization");
  const auto k = static_cast<Eigen::Index>(m.order());
  const Eigen::Index n = 2 * k + 1;
  DescriptorRealization r;
  r.B.resize(n);
  r.C.resize(n);
  for (Eigen::Index i = 0; i < k; ++i) {
    r.B(2 * i) = m.weights()[i];
    r.B(2 * i + 1) = std::conj(m.weights()[i]);
    r.C(2 * i) = m.values()[i];
    r.C(2 * i + 1) = std::conj(m.values()[i]);
  }
  r.B(2 * k) = 1.0;
  r.C(2 * k) = 0.0;
  const Eigen::RowVectorXcd R = Eigen::RowVectorXcd::Ones(n);
  r.A = Eigen::MatrixXcd(lambda_diagonal(m).asDiagonal()) - r.B * R;
  r.E = descriptor_e(n);
  r.kind = FieldKind::kComplex;
  return r;
}

DescriptorRealization build_unit_input_realization(const BarycentricModel& m) {
  require_order(m, "build_unit_input_realization");
  const auto k = static_cast<Eigen::Index>(m.order());
  const Eigen::Index n = 2 * k + 1;
  DescriptorRealization r;
  Eigen::RowVectorXcd R(n);
  r.C.resize(n);
  for (Eigen::Index i = 0; i < k; ++i) {
    const cplx w = m.weights()[i];
    const cplx hw = m.values()[i] * w;
    R(2 * i) = w;
    R(2 * i + 1) = std::conj(w);
    r.C(2 * i) = hw;
    r.C(2 * i + 1) = std::conj(hw);
  }
  R(2 * k) = 1.0;
  r.C(2 * k) = 0.0;
  r.B = Eigen::VectorXcd::Ones(n);
  r.A = Eigen::MatrixXcd(lambda_diagonal(m).asDiagonal()) - r.B * R;
  r.E = descriptor_e(n);
  r.kind = FieldKind::kComplex;
  return r;
}

RealDescriptorRealization build_real_realization(const BarycentricModel& m) {
  require_order(m, "build_real_realization");
  const auto k = static_cast<Eigen::Index>(m.order());
  const Eigen::Index n = 2 * k + 1;
  const double r2 = std::numbers::sqrt2;
  RealDescriptorRealization r;
  r.B.resize(n);
  r.C.resize(n);
  Eigen::RowVectorXd R = Eigen::RowVectorXd::Zero(n);
  Eigen::MatrixXd Lam = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < k; ++i) {
    const cplx w = m.weights()[i];
    const cplx h = m.values()[i];
    r.B(2 * i) = r2 * w.real();
    r.B(2 * i + 1) = r2 * w.imag();
    r.C(2 * i) = r2 * h.real();
    r.C(2 * i + 1) = -r2 * h.imag();
    R(2 * i) = r2;
    Lam(2 * i, 2 * i + 1) = -m.support()[i];
    Lam(2 * i + 1, 2 * i) = m.support()[i];
  }
  r.B(2 * k) = 1.0;
  r.C(2 * k) = 0.0;
  R(2 * k) = 1.0;
  Lam(2 * k, 2 * k) = 1.0;
  r.A = Lam - r.B * R;
  r.E = Eigen::MatrixXd::Identity(n, n);
  r.E(2 * k, 2 * k) = 0.0;
  return r;
}

PoleSet poles(const BarycentricModel& m) {
  require_order(m, "poles");
  const RealDescriptorRealization r = build_real_realization(m);
  const PencilSpectrum spec = bordered_pencil_spectrum(r.A);
  PoleSet ps;
  ps.finite_poles = spec.finite;
  ps.infinite_count = spec.infinite_count;
  return ps;
}

std::vector<cplx> denominator_zeros(const BarycentricModel& m) {
  require_order(m, "denominator_zeros");
  const DenominatorRealization den = build_denominator_realization(m);
  const Eigen::Index n = den.A.rows();
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n + 1, n + 1);
  S.topLeftCorner(n, n) = den.A;
  S.topRightCorner(n, 1) = den.B;
  S.bottomLeftCorner(1, n) = den.C;
  return bordered_pencil_spectrum(S).finite;
}

PoleSet pole_residue(const BarycentricModel& m, bool* clustered) {
  PoleSet ps = poles(m);
  double pmax = 0.0;
  for (const cplx& p : ps.finite_poles) pmax = std::max(pmax, std::abs(p));
  bool close = false;
  for (std::size_t i = 0; i < ps.finite_poles.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (std::abs(ps.finite_poles[i] - ps.finite_poles[j]) <= 1e-8 * pmax) close = true;
    }
  }
  if (clustered) *clustered = close;
  ps.residues.resize(ps.finite_poles.size());
  for (std::size_t i = 0; i < ps.finite_poles.size(); ++i) {
    const cplx p = ps.finite_poles[i];
    ps.residues[i] = evaluate_numerator(m, p) / evaluate_denominator_derivative(m, p);
  }
  ps.feedthrough = feedthrough(m);
  return ps;
}

cplx evaluate_pole_residue(const PoleSet& ps, cplx s) {
  if (ps.residues.size() != ps.finite_poles.size()) {
    throw ValidationError("evaluate_pole_residue: residues missing");
  }
  cplx acc(ps.feedthrough);
  for (std::size_t i = 0; i < ps.finite_poles.size(); ++i) acc += ps.residues[i] / (s - ps.finite_poles[i]);
  return acc;
}

}  // namespace stabaaa
