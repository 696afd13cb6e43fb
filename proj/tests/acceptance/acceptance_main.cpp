#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "stabaaa/aaa.hpp"
#include "stabaaa/barycentric.hpp"
#include "stabaaa/sdp.hpp"
#include "stabaaa/stability.hpp"
#include "stabaaa/stabilize.hpp"
#include "support/synthetic.hpp"

using namespace stabaaa;
using namespace stabaaa::testing;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

enum class Verdict { kPass, kFail, kSkip };

struct Outcome {
  Verdict verdict = Verdict::kFail;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double sym_eig_min(const MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double sym_eig_max(const MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(S.rows() - 1);
}

BarycentricModel random_model(std::mt19937_64& rng, std::size_t k) {
  std::uniform_real_distribution<double> u(0.05, 2.0);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> support;
  while (support.size() < k) {
    const double f = u(rng);
    if (std::none_of(support.begin(), support.end(), [&](double s) { return std::abs(s - f) < 1e-3; })) {
      support.push_back(f);
    }
  }
  std::vector<cplx> values, weights;
  for (std::size_t i = 0; i < k; ++i) {
    values.emplace_back(n(rng), n(rng));
    weights.emplace_back(n(rng), n(rng));
  }
  return BarycentricModel(std::move(support), std::move(values), std::move(weights));
}

// Data with lightly damped modes and 1e-4 perturbations on which unconstrained
// AAA returns an unstable model of modest order.
struct UnstableCase {
  FrequencyDataset data;
  FitOutcome fit;
};

std::vector<UnstableCase> unstable_cases(std::size_t count, double eps) {
  std::mt19937_64 rng(7);
  std::vector<UnstableCase> out;
  for (int tries = 1; out.size() < count && tries < 2000; ++tries) {
    SystemShape sh;
    sh.pairs = 2 + tries % 6;
    sh.zeta_lo = 0.002;
    sh.zeta_hi = 0.02;
    sh.real_poles = tries % 2;
    const auto sys = random_stable_system(rng, sh);
    const FrequencyDataset ds = perturb(normalize(sample(sys, logspace(0.01, 2.0, 300))).data, 1e-4, rng);
    FitOutcome fit = aaa_fit(ds, eps);
    if (classify_stability(fit.model).stable || fit.iterations > 20) continue;
    out.push_back({ds, std::move(fit)});
  }
  return out;
}

Outcome criterion_interpolation() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> order(2, 20);
  std::uniform_int_distribution<int> samples(200, 500);
  int fits_ok = 0, checked = 0;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int degree = order(rng);
    SystemShape sh;
    sh.pairs = degree / 2;
    sh.real_poles = degree % 2;
    const auto sys = random_stable_system(rng, sh);
    const FrequencyDataset ds = normalize(sample(sys, logspace(0.01, 2.0, static_cast<std::size_t>(samples(rng))))).data;
    const FitOutcome fit = aaa_fit(ds, 1e-8);
    const BarycentricModel& m = fit.model;
    const std::vector<bool> active = m.active_support();
    bool ok = true;
    for (std::size_t i = 0; i < m.order(); ++i) {
      if (!active[i]) continue;
      const double dev = std::abs(evaluate(m, cplx(0.0, m.support()[i])) - m.values()[i]);
      worst = std::max(worst, dev);
      ok = ok && dev <= 1e-10;
      ++checked;
    }
    fits_ok += ok;
  }
  return {fits_ok == 100 ? Verdict::kPass : Verdict::kFail,
          fmt("%d/100 fits interpolate, %d support points, max |H(jl)-h| = %.2e", fits_ok, checked, worst)};
}

Outcome criterion_realizations() {
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<std::size_t> order(1, 15);
  std::uniform_real_distribution<double> re(-1.0, 1.0), im(-2.5, 2.5);
  double worst = 0.0;
  int models_ok = 0;
  for (int t = 0; t < 50; ++t) {
    const BarycentricModel m = random_model(rng, order(rng));
    const DescriptorRealization cx = build_descriptor_realization(m);
    const DescriptorRealization unit = build_unit_input_realization(m);
    const RealDescriptorRealization real = build_real_realization(m);
    bool ok = true;
    for (int p = 0; p < 100; ++p) {
      const cplx s(re(rng), im(rng));
      const cplx h = evaluate(m, s);
      const double scale = std::max(std::abs(h), 1e-300);
      const double dev = std::max({std::abs(cx.transfer(s) - h), std::abs(unit.transfer(s) - h),
                                   std::abs(real.transfer(s) - h)}) / scale;
      worst = std::max(worst, dev);
      ok = ok && dev <= 1e-9;
    }
    models_ok += ok;
  }
  return {models_ok == 50 ? Verdict::kPass : Verdict::kFail,
          fmt("%d/50 models, 3 realizations x 100 points, max rel dev %.2e", models_ok, worst)};
}

// Oracle: the linearized error summed term by term in extended precision.
// Unit-norm weights and frequencies at least 1e-2 apart, as on sampled grids.
Outcome criterion_quasi_loewner() {
  using lcplx = std::complex<long double>;
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<std::size_t> nsup(1, 8), ntest(1, 30);
  std::uniform_real_distribution<double> f(0.01, 3.0);
  std::normal_distribution<double> n(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    SampleSet support, test;
    const std::size_t ls = nsup(rng), lt = ntest(rng);
    std::vector<double> freqs;
    while (freqs.size() < ls + lt) {
      const double c = f(rng);
      if (std::all_of(freqs.begin(), freqs.end(), [&](double o) { return std::abs(o - c) >= 1e-2; })) {
        freqs.push_back(c);
      }
    }
    for (std::size_t i = 0; i < ls + lt; ++i) {
      SampleSet& dst = i < ls ? support : test;
      dst.freqs.push_back(freqs[i]);
      dst.values.emplace_back(n(rng), n(rng));
    }
    const RealQuasiLoewner q = real_quasi_loewner(support, test);
    VectorXd x(2 * static_cast<Eigen::Index>(ls));
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = n(rng);
    x.normalize();
    const VectorXd lx = q.matrix * x;
    for (std::size_t l = 0; l < lt; ++l) {
      const lcplx s(0.0L, test.freqs[l]);
      const lcplx H(test.values[l]);
      lcplx e = 0.0L;
      for (std::size_t i = 0; i < ls; ++i) {
        const lcplx w(x(2 * static_cast<Eigen::Index>(i)), x(2 * static_cast<Eigen::Index>(i) + 1));
        const lcplx jl(0.0L, support.freqs[i]);
        const lcplx h(support.values[i]);
        e += (H - h) / (s - jl) * w + (H - std::conj(h)) / (s + jl) * std::conj(w);
      }
      const auto li = static_cast<Eigen::Index>(l), nt = static_cast<Eigen::Index>(lt);
      worst = std::max({worst, static_cast<double>(std::abs(lx(li) - e.real())),
                        static_cast<double>(std::abs(lx(li + nt) - e.imag()))});
    }
  }
  return {worst <= 1e-12 ? Verdict::kPass : Verdict::kFail,
          fmt("200 configurations, max |L x - [Re E; Im E]| = %.2e", worst)};
}

Outcome criterion_exact_recovery() {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> mdist(1, 10);
  int ok = 0;
  for (int t = 0; t < 100; ++t) {
    SystemShape sh;
    sh.pairs = mdist(rng);
    const auto sys = random_stable_system(rng, sh);
    const FrequencyDataset ds = normalize(sample(sys, logspace(0.01, 2.0, 300))).data;
    const FitOutcome fit = aaa_fit(ds, 1e-10);
    const ErrorReport e = error_metrics(evaluate_on(fit.model, ds), ds);
    ok += fit.converged && fit.iterations <= static_cast<std::size_t>(sh.pairs) + 2 && e.e_inf <= 1e-8;
  }
  return {ok >= 95 ? Verdict::kPass : Verdict::kFail, fmt("%d/100 trials with k <= m+2 and E_inf <= 1e-8", ok)};
}

Outcome criterion_stability() {
  const std::vector<UnstableCase> cases = unstable_cases(50, 1e-3);
  if (cases.size() < 50) return {Verdict::kFail, fmt("only %zu unstable problems constructed", cases.size())};
  int stable = 0, certified = 0;
  double worst_margin = -std::numeric_limits<double>::infinity();
  StabAaaConfig cfg;
  cfg.tolerance = 1e-3;
  cfg.m_max = 0;
  for (const UnstableCase& c : cases) {
    StabAaaOutcome out;
    try {
      out = stabaaa_fit(c.data, cfg);
    } catch (const Error&) {
      continue;
    }
    double margin = -std::numeric_limits<double>::infinity();
    for (const cplx& p : denominator_zeros(out.model)) margin = std::max(margin, p.real());
    margin = std::max(margin, classify_stability(out.model).margin);
    worst_margin = std::max(worst_margin, margin);
    stable += margin < 0.0;
    if (!out.certificate) continue;
    const StabilitySdp& p = out.certificate->problem;
    const SdpSolution& sol = out.certificate->solution;
    const MatrixXd& Y = sol.Y_solver;
    const MatrixXd R = p.A * Y + Y * p.A.transpose() - 2.0 * sol.g * p.B * p.B.transpose();
    Eigen::LLT<MatrixXd> llt(Y);
    if (llt.info() != Eigen::Success) continue;
    // Q A + A^T Q - 2g Q B B^T Q = Q R Q is congruent to L^{-1} R L^{-T}.
    MatrixXd S = llt.matrixL().solve(R);
    S = llt.matrixL().solve(S.transpose()).eval();
    const VectorXd c_rec = llt.solve(p.B);
    bool same_model = true;
    for (std::size_t i = 0; i < out.model.order(); ++i) {
      const cplx w(c_rec(2 * static_cast<Eigen::Index>(i)), c_rec(2 * static_cast<Eigen::Index>(i) + 1));
      same_model = same_model && std::abs(w - out.model.weights()[i]) <= 1e-9 * c_rec.norm();
    }
    certified += sym_eig_min(Y) >= p.delta_pd / 2 && sym_eig_max(R) <= -p.delta_lmi / 2 && sym_eig_max(S) < 0.0 &&
                 same_model;
  }
  const bool pass = stable == 50 && certified == 50;
  return {pass ? Verdict::kPass : Verdict::kFail,
          fmt("%d/50 stable (max Re pole %.3e), %d/50 certificates verified", stable, worst_margin, certified)};
}

Outcome criterion_inactive() {
  std::mt19937_64 rng(11);
  int found = 0, ok = 0;
  double worst = 0.0;
  while (found < 20) {
    SystemShape sh;
    sh.pairs = 1 + found % 8;
    const auto sys = random_stable_system(rng, sh);
    const FrequencyDataset ds = perturb(normalize(sample(sys, logspace(0.01, 2.0, 300))).data, 1e-5, rng);
    const FitOutcome fit = aaa_fit(ds, 1e-3);
    if (!classify_stability(fit.model).stable) continue;
    ++found;
    try {
      const DenominatorRealization den = build_denominator_realization(fit.model);
      const TransformedDenominator td = transform_denominator(den, fit.loewner_real, fit.x_opt);
      const StabilitySdp p = build_stability_sdp(td);
      const SdpSolution sol = solve_sdp(p);
      const std::vector<cplx> w = recover_weights(sol, p);
      VectorXd x(2 * static_cast<Eigen::Index>(w.size()));
      for (std::size_t i = 0; i < w.size(); ++i) {
        x(2 * static_cast<Eigen::Index>(i)) = w[i].real();
        x(2 * static_cast<Eigen::Index>(i) + 1) = w[i].imag();
      }
      const double rel = (x - fit.x_opt).norm() / fit.x_opt.norm();
      worst = std::max(worst, rel);
      ok += rel <= 1e-5;
    } catch (const Error&) {
      worst = std::numeric_limits<double>::infinity();
    }
  }
  return {ok == 20 ? Verdict::kPass : Verdict::kFail, fmt("%d/20 within 1e-5, max rel dev %.2e", ok, worst)};
}

// k = 1 oracle: Y = [[p, q], [q, t]] on a grid plus pattern search, g eliminated
// in closed form on the basis (B, B-perp) and r = (B - Yx)^T Y^{-1} (B - Yx).
struct KOneOracle {
  MatrixXd A;
  VectorXd B, x;
  double delta = 0.0, gain = 0.0, rho = 0.0;

  double objective(double lp, double lt, double u) const {
    const double p = std::exp(lp), t = std::exp(lt), q = std::tanh(u) * std::sqrt(p * t);
    MatrixXd Y(2, 2);
    Y << p, q, q, t;
    const double inf = std::numeric_limits<double>::infinity();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(Y, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) < delta) return inf;
    if (rho > 0.0 && es.eigenvalues()(1) > rho) return inf;
    const MatrixXd M = -(A * Y + Y * A.transpose()) - delta * MatrixXd::Identity(2, 2);
    const VectorXd ub = B.normalized();
    VectorXd nb(2);
    nb << -ub(1), ub(0);
    const double m_uu = ub.dot(M * ub), m_un = ub.dot(M * nb), m_nn = nb.dot(M * nb);
    if (!(m_nn > 0.0)) return inf;
    const double g = (m_un * m_un / m_nn - m_uu) / (2.0 * B.squaredNorm());
    if (g > gain) return inf;
    const VectorXd v = B - Y * x;
    return v.dot(Y.ldlt().solve(v));
  }

  double minimize() const {
    const double lo = std::log(delta), hi = std::log(rho);
    struct Point {
      double f, a, b, c;
    };
    std::vector<Point> best;
    const int np = 60, nu = 80;
    for (int i = 0; i < np; ++i) {
      const double a = lo + (hi - lo) * i / (np - 1);
      for (int j = 0; j < np; ++j) {
        const double b = lo + (hi - lo) * j / (np - 1);
        for (int k = 0; k < nu; ++k) {
          const double c = -8.0 + 16.0 * k / (nu - 1);
          const double f = objective(a, b, c);
          if (std::isfinite(f)) best.push_back({f, a, b, c});
        }
      }
    }
    if (best.empty()) return std::numeric_limits<double>::infinity();
    std::partial_sort(best.begin(), best.begin() + std::min<std::size_t>(8, best.size()), best.end(),
                      [](const Point& l, const Point& r) { return l.f < r.f; });
    best.resize(std::min<std::size_t>(8, best.size()));
    double result = best.front().f;
    for (Point pt : best) {
      double step = 0.5;
      while (step > 1e-12) {
        bool moved = false;
        for (int d = 0; d < 3; ++d) {
          for (double sgn : {-1.0, 1.0}) {
            Point cand = pt;
            (d == 0 ? cand.a : d == 1 ? cand.b : cand.c) += sgn * step;
            cand.f = objective(cand.a, cand.b, cand.c);
            if (cand.f < pt.f) {
              pt = cand;
              moved = true;
            }
          }
        }
        if (!moved) step *= 0.5;
      }
      result = std::min(result, pt.f);
    }
    return result;
  }
};

Outcome criterion_k_one() {
  std::mt19937_64 rng(707);
  std::uniform_real_distribution<double> lam(0.2, 2.0), angle(-1.5, 1.5);
  std::normal_distribution<double> n(0.0, 1.0);
  int ok = 0, active = 0;
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const double th = angle(rng);
    const BarycentricModel m({lam(rng)}, {cplx(n(rng), n(rng))}, {cplx(std::cos(th), std::sin(th))});
    const DenominatorRealization den = build_denominator_realization(m);
    MatrixXd M(8, 2);
    for (Eigen::Index i = 0; i < M.size(); ++i) M(i) = n(rng);
    const TransformedDenominator td = transform_denominator(den, M, m.weight_vector());
    const StabilitySdp p = build_stability_sdp(td);
    double r_ipm = std::numeric_limits<double>::quiet_NaN();
    try {
      const SdpSolution sol = solve_sdp(p);
      if (lmi::has_solution(sol.status)) r_ipm = sol.r;
    } catch (const Error&) {
    }
    const KOneOracle oracle{p.A, p.B, p.x, p.delta_pd, p.gain_bound, p.y_bound};
    const double r_bf = oracle.minimize();
    active += !classify_stability(m).stable;
    const double diff = std::abs(r_ipm - r_bf);
    worst = std::max(worst, std::isfinite(diff) ? diff : std::numeric_limits<double>::infinity());
    ok += diff <= 1e-4;
  }
  return {ok == 10 ? Verdict::kPass : Verdict::kFail,
          fmt("%d/10 match (%d with an unstable model), max |r_ipm - r_grid| = %.2e", ok, active, worst)};
}

// Strict feasibility at a width far below the solver default, confirmed by an
// eigenvalue re-check of the returned P.
bool spr_for_some_gain(const BarycentricModel& m) {
  const DenominatorRealization den = build_denominator_realization(m);
  const double delta = 1e-10 * std::max(1.0, den.A.norm());
  for (int e = -4; e <= 8; ++e) {
    const double g = std::pow(10.0, 0.5 * e);
    const SprCertificate c = verify_spr(den.A, den.B, den.C, g, delta);
    if (!c.feasible) continue;
    const MatrixXd Acl = den.A - g * den.B * den.C;
    const MatrixXd& P = c.P;
    if (sym_eig_min(P) >= delta / 2 && sym_eig_max(Acl.transpose() * P + P * Acl) <= -delta / 2 &&
        (P * den.B - den.C.transpose()).norm() <= 1e-8 * std::max(1.0, den.C.norm())) {
      return true;
    }
  }
  return false;
}

Outcome criterion_spr() {
  std::mt19937_64 rng(808);
  int stable_found = 0, stable_ok = 0;
  for (int tries = 0; stable_found < 20 && tries < 500; ++tries) {
    SystemShape sh;
    sh.pairs = 1 + tries % 6;
    const auto sys = random_stable_system(rng, sh);
    const FrequencyDataset ds = perturb(normalize(sample(sys, logspace(0.01, 2.0, 200))).data, 1e-5, rng);
    const FitOutcome fit = aaa_fit(ds, 1e-3);
    const StabilityReport rep = classify_stability(fit.model);
    if (!rep.stable || rep.cb_sign <= 0 || rep.characterization != Characterization::kExact) continue;
    ++stable_found;
    stable_ok += spr_for_some_gain(fit.model);
  }
  int unstable_ok = 0;
  const std::vector<UnstableCase> cases = unstable_cases(20, 1e-3);
  for (const UnstableCase& c : cases) unstable_ok += !spr_for_some_gain(c.fit.model);
  const bool pass = stable_found == 20 && stable_ok == 20 && cases.size() == 20 && unstable_ok == 20;
  return {pass ? Verdict::kPass : Verdict::kFail,
          fmt("stable: %d/%d SPR-feasible for some g; unstable: %d/%zu infeasible for every g", stable_ok,
              stable_found, unstable_ok, cases.size())};
}

Outcome criterion_iss() {
  const char* path = std::getenv("STABAAA_ISS_DATA");
  if (path == nullptr) return {Verdict::kSkip, "set STABAAA_ISS_DATA to a freq,re,im CSV (rad/s) to run"};
  const FrequencyDataset ds = normalize(load_dataset(std::filesystem::path(path), FrequencyUnit::kRadPerSecond)).data;
  const FitOutcome fit = aaa_fit(ds, 1e-4);
  StabAaaConfig cfg;
  cfg.tolerance = 1e-4;
  const StabAaaOutcome out = stabaaa_fit(ds, cfg);
  const double k = static_cast<double>(fit.iterations);
  const bool pass = std::abs(k - 31.0) <= 3.0 && out.stable && out.metrics.e_inf <= 2 * 5.38e-5 &&
                    out.metrics.e_inf >= 5.38e-5 / 2 && out.metrics.e_2 <= 2 * 1.96e-4 &&
                    out.metrics.e_2 >= 1.96e-4 / 2;
  return {pass ? Verdict::kPass : Verdict::kFail,
          fmt("aaa k = %zu; stabaaa E_inf = %.3e, E_2 = %.3e", fit.iterations, out.metrics.e_inf, out.metrics.e_2)};
}

Outcome criterion_timing() {
  std::mt19937_64 rng(3);
  SystemShape sh;
  sh.pairs = 20;
  sh.zeta_lo = 0.002;
  sh.zeta_hi = 0.05;
  const auto sys = random_stable_system(rng, sh);
  const FrequencyDataset ds = perturb(normalize(sample(sys, logspace(0.01, 2.0, 400))).data, 1e-4, rng);
  std::string detail;
  bool pass = true;
  for (std::size_t k : {10, 20, 31}) {
    const FitOutcome fit = aaa_fit(ds, 1e-12, k);
    const auto t0 = std::chrono::steady_clock::now();
    bool solved = false;
    try {
      const DenominatorRealization den = build_denominator_realization(fit.model);
      const StabilitySdp p = build_stability_sdp(transform_denominator(den, fit.loewner_real, fit.x_opt));
      solved = lmi::has_solution(solve_sdp(p).status);
    } catch (const Error&) {
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    pass = pass && solved && secs < 30.0;
    detail += fmt("%sk=%zu %.1f s%s", detail.empty() ? "" : ", ", fit.iterations, secs, solved ? "" : " (no solution)");
  }
  return {pass ? Verdict::kPass : Verdict::kFail, detail};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "interpolation property", criterion_interpolation},
      {2, "realization equivalence", criterion_realizations},
      {3, "quasi-Loewner oracle", criterion_quasi_loewner},
      {4, "exact recovery", criterion_exact_recovery},
      {5, "stability postcondition", criterion_stability},
      {6, "inactive-constraint recovery", criterion_inactive},
      {7, "k=1 brute-force SDP equivalence", criterion_k_one},
      {8, "SPR feasibility bidirectionality", criterion_spr},
      {9, "ISS benchmark reproduction", criterion_iss},
      {10, "SDP solve time", criterion_timing},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Verdict::kFail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const char* tag = o.verdict == Verdict::kPass ? "PASS" : o.verdict == Verdict::kSkip ? "SKIPPED" : "FAIL";
    failures += o.verdict == Verdict::kFail;
    std::printf("%s criterion %d (%s): %s [%.1f s]\n", tag, c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
