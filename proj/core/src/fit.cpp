#include "stabaaa/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "stabaaa/aaa.hpp"
#include "stabaaa/errors.hpp"
#include "stabaaa/pencil.hpp"

namespace stabaaa {

Algorithm parse_algorithm(const std::string& name) {
  if (name == "aaa") return Algorithm::kAaa;
  if (name == "stabaaa") return Algorithm::kStabAaa;
  if (name == "loewner") return Algorithm::kLoewner;
  if (name == "truncate-refit") return Algorithm::kTruncateRefit;
  throw ValidationError("unknown algorithm '" + name + "' (expected aaa, stabaaa, loewner or truncate-refit)");
}

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kAaa: return "aaa";
    case Algorithm::kStabAaa: return "stabaaa";
    case Algorithm::kLoewner: return "loewner";
    case Algorithm::kTruncateRefit: return "truncate-refit";
  }
  return "unknown";
}

const char* to_string(ModelKind k) {
  switch (k) {
    case ModelKind::kBarycentric: return "barycentric";
    case ModelKind::kPoleResidue: return "pole_residue";
    case ModelKind::kDescriptor: return "descriptor";
  }
  return "unknown";
}

std::size_t FittedModel::order() const {
  switch (kind()) {
    case ModelKind::kBarycentric: return barycentric().order();
    case ModelKind::kPoleResidue: return pole_residue().finite_poles.size();
    case ModelKind::kDescriptor: return static_cast<std::size_t>(descriptor().size());
  }
  return 0;
}

cplx FittedModel::operator()(cplx s) const {
  switch (kind()) {
    case ModelKind::kBarycentric: return evaluate(barycentric(), s);
    case ModelKind::kPoleResidue: return evaluate_pole_residue(pole_residue(), s);
    case ModelKind::kDescriptor: return descriptor().transfer(s);
  }
  return 0.0;
}

std::vector<cplx> FittedModel::evaluate_on(const FrequencyDataset& ds) const {
  std::vector<cplx> out;
  out.reserve(ds.size());
  for (double f : ds.freqs()) out.push_back((*this)(cplx(0.0, f)));
  return out;
}

ModelStability assess_stability(const FittedModel& m) {
  ModelStability st;
  if (m.kind() == ModelKind::kBarycentric) {
    StabilityReport rep = classify_stability(m.barycentric());
    st.stable = rep.stable;
    st.margin = rep.margin;
    st.poles = rep.finite_poles.finite_poles;
    st.unstable_count = rep.unstable_poles.size();
    st.infinite_count = rep.finite_poles.infinite_count;
    st.barycentric = std::move(rep);
    return st;
  }
  if (m.kind() == ModelKind::kPoleResidue) {
    st.poles = m.pole_residue().finite_poles;
  } else {
    const PencilSpectrum spec = complex_pencil_spectrum(m.descriptor().A, m.descriptor().E);
    st.poles = spec.finite;
    st.infinite_count = spec.infinite_count;
  }
  st.margin = -std::numeric_limits<double>::infinity();
  for (const cplx& p : st.poles) {
    st.margin = std::max(st.margin, p.real());
    if (!(p.real() < 0.0)) ++st.unstable_count;
  }
  st.stable = st.unstable_count == 0;
  return st;
}

PoleSet pole_residue_form(const FittedModel& m) {
  switch (m.kind()) {
    case ModelKind::kBarycentric: return pole_residue(m.barycentric());
    case ModelKind::kPoleResidue: return m.pole_residue();
    case ModelKind::kDescriptor: {
      const PencilSpectrum spec = complex_pencil_spectrum(m.descriptor().A, m.descriptor().E);
      PoleSet ps;
      ps.finite_poles = spec.finite;
      ps.infinite_count = spec.infinite_count;
      return ps;
    }
  }
  return {};
}

DescriptorRealization realization_of(const FittedModel& m) {
  switch (m.kind()) {
    case ModelKind::kBarycentric: {
      if (m.barycentric().order() == 0) {
        throw ValidationError("realization_of: an order-0 model has no state-space form");
      }
      const RealDescriptorRealization r = build_real_realization(m.barycentric());
      DescriptorRealization out;
      out.E = r.E.cast<cplx>();
      out.A = r.A.cast<cplx>();
      out.B = r.B.cast<cplx>();
      out.C = r.C.cast<cplx>();
      out.kind = FieldKind::kReal;
      return out;
    }
    case ModelKind::kPoleResidue: {
      const PoleSet& ps = m.pole_residue();
      const auto n = static_cast<Eigen::Index>(ps.finite_poles.size());
      DescriptorRealization out;
      out.E = Eigen::MatrixXcd::Identity(n + 1, n + 1);
      out.E(n, n) = 0.0;
      out.A = Eigen::MatrixXcd::Zero(n + 1, n + 1);
      out.B = Eigen::VectorXcd::Ones(n + 1);
      out.C.resize(n + 1);
      for (Eigen::Index i = 0; i < n; ++i) {
        out.A(i, i) = ps.finite_poles[static_cast<std::size_t>(i)];
        out.C(i) = ps.residues[static_cast<std::size_t>(i)];
      }
      out.A(n, n) = -1.0;
      out.C(n) = ps.feedthrough;
      return out;
    }
    case ModelKind::kDescriptor: return m.descriptor();
  }
  return {};
}

RealizationCheck check_realization(const FittedModel& m, const DescriptorRealization& r, std::uint64_t seed,
                                   int points) {
  RealizationCheck chk;
  chk.seed = seed;
  chk.points = points;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> exponent(-2.0, 2.0);
  for (int i = 0; i < points; ++i) {
    const cplx s(0.0, std::pow(10.0, exponent(rng)));
    const cplx h = m(s);
    chk.max_rel_diff = std::max(chk.max_rel_diff, std::abs(r.transfer(s) - h) / std::max(std::abs(h), 1e-300));
  }
  return chk;
}

FitResult run_fit(const FrequencyDataset& ds, const FitRequest& req) {
  req.stabaaa.validate();
  if (ds.size() < 2) throw ValidationError("fit: need at least 2 samples");
  const StabAaaConfig& cfg = req.stabaaa;
  FitResult res;
  res.algorithm = req.algorithm;
  switch (req.algorithm) {
    case Algorithm::kAaa: {
      const FitOutcome fit = aaa_fit(ds, cfg.tolerance, cfg.max_iter, cfg.error_mode, cfg.trace);
      res.model = FittedModel(fit.model);
      res.rounds = 1;
      res.final_eps = cfg.tolerance;
      res.met_tolerance = fit.converged;
      break;
    }
    case Algorithm::kStabAaa: {
      StabAaaOutcome out = stabaaa_fit(ds, cfg);
      res.model = FittedModel(out.model);
      res.rounds = out.rounds;
      res.sdp_calls = out.sdp_invocations;
      res.final_eps = out.final_eps;
      res.met_tolerance = out.met_tolerance;
      res.stabaaa = std::move(out);
      break;
    }
    case Algorithm::kLoewner: {
      LoewnerFitOptions opts;
      opts.rank_tol = req.loewner_rank_tol > 0.0 ? req.loewner_rank_tol : cfg.tolerance;
      res.model = FittedModel(loewner_fit(ds, opts).realization);
      break;
    }
    case Algorithm::kTruncateRefit: {
      const FitOutcome fit = aaa_fit(ds, cfg.tolerance, cfg.max_iter, cfg.error_mode, cfg.trace);
      res.model = FittedModel(truncate_refit(fit.model, ds));
      res.rounds = 1;
      res.final_eps = cfg.tolerance;
      break;
    }
  }
  res.stability = assess_stability(res.model);
  res.metrics = error_metrics(res.model.evaluate_on(ds), ds);
  const bool by_metrics = req.algorithm == Algorithm::kLoewner || req.algorithm == Algorithm::kTruncateRefit;
  if (by_metrics) res.met_tolerance = res.metrics.e_inf <= cfg.tolerance;
  return res;
}

}  // namespace stabaaa
