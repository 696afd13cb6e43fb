#include "stabaaa/stabilize.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>

namespace stabaaa {

void StabAaaConfig::validate() const {
  if (!(tolerance > 0.0)) throw ValidationError("stabaaa: tolerance must be positive");
  if (!(theta > 0.0 && theta < 1.0)) throw ValidationError("stabaaa: theta must lie in (0, 1)");
  if (m_max < 0) throw ValidationError("stabaaa: m_max must be non-negative");
}

Stabilization stabilize(const BarycentricModel& m, const RealQuasiLoewner& M, const Eigen::VectorXd& x_opt,
                        const SdpConfig& cfg) {
  const DenominatorRealization den = build_denominator_realization(m);
  const TransformedDenominator td = transform_denominator(den, M, x_opt);
  Stabilization st;
  st.problem = build_stability_sdp(td, cfg);
  st.solution = solve_sdp(st.problem);
  if (!lmi::has_solution(st.solution.status)) {
    throw StabilizationError(std::string("stability SDP ended with status ") + lmi::to_string(st.solution.status),
                             m);
  }
  st.check = check_certificate(st.problem, st.solution);
  st.model = m.with_weights(recover_weights(st.solution, st.problem));
  return st;
}

namespace {

void finish(StabAaaOutcome& out, const AaaState& state, const FrequencyDataset& ds) {
  out.model = state.model;
  out.support_indices = state.support_indices;
  out.test_indices = state.test_indices;
  out.test_error = max_test_error(state, ds);
  out.metrics = error_metrics(evaluate_on(state.model, ds), ds);
}

}  // namespace

StabAaaOutcome stabaaa_fit(const FrequencyDataset& ds, const StabAaaConfig& cfg) {
  cfg.validate();
  const std::size_t max_iter = cfg.max_iter == 0 ? default_max_iter(ds) : cfg.max_iter;
  AaaState state = aaa_initialize(ds, cfg.error_mode);
  StabAaaOutcome out;
  double eps_m = cfg.tolerance;
  std::optional<std::pair<AaaState, Stabilization>> last;  // most recent stabilized round

  for (int round = 1;; ++round) {
    if (cfg.restart && round > 1) state = aaa_initialize(ds, cfg.error_mode);
    const FitOutcome fit = aaa_resume(state, ds, eps_m, max_iter, cfg.trace);
    out.rounds = round;
    out.final_eps = eps_m;

    RoundRecord rec;
    rec.round = round;
    rec.eps = eps_m;
    rec.k = state.iteration();

    const StabilityReport report = classify_stability(state.model);
    rec.aaa_stable = report.stable;
    if (report.stable) {
      rec.test_error = fit.final_max_error;
      out.history.push_back(rec);
      out.stable = true;
      out.met_tolerance = fit.final_max_error <= cfg.tolerance;
      out.certificate.reset();
      finish(out, state, ds);
      return out;
    }

    Stabilization st;
    try {
      st = stabilize(state.model, state.loewner, state.x_opt, cfg.sdp);
      const StabilityReport after = classify_stability(st.model);
      if (!after.stable) {
        throw StabilizationError("stabilized model still has a pole with Re = " + std::to_string(after.margin),
                                 state.model);
      }
    } catch (const Error& e) {
      if (!last) {
        if (dynamic_cast<const StabilizationError*>(&e)) throw;
        if (dynamic_cast<const ConditioningError*>(&e)) {
          throw StabilizationError(std::string(e.what()) + "; retry with a larger tolerance", state.model);
        }
        throw StabilizationError(std::string("stabilization failed: ") + e.what(), state.model);
      }
      ++out.sdp_invocations;
      rec.sdp_used = true;
      rec.failure = e.what();
      out.history.push_back(rec);
      out.stable = true;
      out.met_tolerance = false;
      out.certificate = std::move(last->second);
      finish(out, last->first, ds);
      return out;
    }
    ++out.sdp_invocations;
    state.model = st.model;
    const double err = max_test_error(state, ds);
    rec.sdp_used = true;
    rec.sdp_objective = st.solution.r;
    rec.test_error = err;
    out.history.push_back(rec);

    const bool exhausted = state.iteration() >= max_iter || state.test_indices.size() < 2;
    if (err < cfg.tolerance || round > cfg.m_max || exhausted) {
      out.stable = true;
      out.met_tolerance = err < cfg.tolerance;
      out.certificate = std::move(st);
      finish(out, state, ds);
      return out;
    }
    last.emplace(state, std::move(st));
    eps_m *= cfg.theta;
  }
}

PoleSet truncate_refit(const BarycentricModel& m, const FrequencyDataset& ds) {
  if (ds.size() < 2) throw ValidationError("truncate_refit: need at least 2 samples");
  const PoleSet ps = poles(m);
  double pmax = 0.0;
  for (const cplx& p : ps.finite_poles) pmax = std::max(pmax, std::abs(p));
  const double tol = 1e-8 * std::max(pmax, 1e-300);

  // Keep stable poles: real ones as they are, complex ones by their Im > 0 member.
  std::vector<cplx> kept;
  for (const cplx& p : ps.finite_poles) {
    if (!(p.real() < 0.0)) continue;
    if (std::abs(p.imag()) <= tol) {
      kept.emplace_back(p.real(), 0.0);
    } else if (p.imag() > 0.0) {
      kept.push_back(p);
    }
  }
  if (kept.empty()) throw DegenerateDataError("truncate_refit: no stable poles remain");

  // Unknowns: one real residue per real pole, (Re r, Im r) per complex pair, constant d.
  Eigen::Index cols = 1;
  for (const cplx& p : kept) cols += p.imag() == 0.0 ? 1 : 2;
  const auto V = static_cast<Eigen::Index>(ds.size());
  Eigen::MatrixXd A(2 * V, cols);
  Eigen::VectorXd rhs(2 * V);
  for (Eigen::Index v = 0; v < V; ++v) {
    const cplx s(0.0, ds.freqs()[v]);
    Eigen::Index c = 0;
    for (const cplx& p : kept) {
      if (p.imag() == 0.0) {
        const cplx f = 1.0 / (s - p);
        A(v, c) = f.real();
        A(v + V, c) = f.imag();
        ++c;
      } else {
        const cplx f1 = 1.0 / (s - p) + 1.0 / (s - std::conj(p));
        const cplx f2 = cplx(0.0, 1.0) / (s - p) - cplx(0.0, 1.0) / (s - std::conj(p));
        A(v, c) = f1.real();
        A(v + V, c) = f1.imag();
        A(v, c + 1) = f2.real();
        A(v + V, c + 1) = f2.imag();
        c += 2;
      }
    }
    A(v, c) = 1.0;
    A(v + V, c) = 0.0;
    rhs(v) = ds.values()[v].real();
    rhs(v + V) = ds.values()[v].imag();
  }
  const Eigen::VectorXd sol = A.colPivHouseholderQr().solve(rhs);

  PoleSet out;
  Eigen::Index c = 0;
  for (const cplx& p : kept) {
    if (p.imag() == 0.0) {
      out.finite_poles.push_back(p);
      out.residues.emplace_back(sol(c), 0.0);
      ++c;
    } else {
      const cplx r(sol(c), sol(c + 1));
      out.finite_poles.push_back(p);
      out.residues.push_back(r);
      out.finite_poles.push_back(std::conj(p));
      out.residues.push_back(std::conj(r));
      c += 2;
    }
  }
  out.feedthrough = sol(c);
  return out;
}

}  // namespace stabaaa
