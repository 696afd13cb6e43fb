#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "stabaaa/dataset.hpp"

namespace stabaaa::testing {

/// H(s) = d + sum_i r_i / (s - p_i), poles and residues closed under conjugation.
struct PoleResidueSystem {
  std::vector<cplx> poles;
  std::vector<cplx> residues;
  double d = 0.0;

  cplx operator()(cplx s) const {
    cplx h(d, 0.0);
    for (std::size_t i = 0; i < poles.size(); ++i) h += residues[i] / (s - poles[i]);
    return h;
  }
  std::size_t degree() const { return poles.size(); }
};

struct SystemShape {
  int pairs = 3;
  int real_poles = 0;
  double w_lo = 0.05;  // natural frequencies, rad/s
  double w_hi = 0.9;
  double zeta_lo = 0.02;
  double zeta_hi = 0.3;
  double d_scale = 0.1;
};

inline PoleResidueSystem random_stable_system(std::mt19937_64& rng, const SystemShape& shape) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);
  PoleResidueSystem sys;
  const double lw = std::log(shape.w_lo), hw = std::log(shape.w_hi);
  for (int i = 0; i < shape.pairs; ++i) {
    const double w = std::exp(lw + (hw - lw) * u(rng));
    const double z = shape.zeta_lo + (shape.zeta_hi - shape.zeta_lo) * u(rng);
    const cplx p(-z * w, w * std::sqrt(1.0 - z * z));
    const cplx r = cplx(n(rng), n(rng)) * w * z;
    sys.poles.push_back(p);
    sys.residues.push_back(r);
    sys.poles.push_back(std::conj(p));
    sys.residues.push_back(std::conj(r));
  }
  for (int i = 0; i < shape.real_poles; ++i) {
    const double a = std::exp(lw + (hw - lw) * u(rng));
    sys.poles.emplace_back(-a, 0.0);
    sys.residues.emplace_back(n(rng) * a, 0.0);
  }
  sys.d = shape.d_scale * n(rng);
  return sys;
}

inline std::vector<double> logspace(double a, double b, std::size_t n) {
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    f[i] = std::pow(10.0, std::log10(a) + t * (std::log10(b) - std::log10(a)));
  }
  return f;
}

template <class F>
FrequencyDataset sample(const F& h, const std::vector<double>& freqs) {
  std::vector<cplx> v;
  v.reserve(freqs.size());
  for (double w : freqs) v.push_back(h(cplx(0.0, w)));
  return FrequencyDataset::from_samples(freqs, std::move(v));
}

/// Adds complex Gaussian noise of the given absolute level to every sample.
inline FrequencyDataset perturb(const FrequencyDataset& ds, double level, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, level);
  std::vector<cplx> v(ds.values());
  for (cplx& h : v) h += cplx(n(rng), n(rng));
  return FrequencyDataset::from_samples(ds.freqs(), std::move(v));
}

}  // namespace stabaaa::testing
