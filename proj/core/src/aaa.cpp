#include "stabaaa/aaa.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "stabaaa/errors.hpp"

namespace stabaaa {

namespace {

FitOutcome snapshot(const AaaState& state, bool converged, double max_err) {
  FitOutcome out;
  out.model = state.model;
  out.converged = converged;
  out.iterations = state.iteration();
  out.final_max_error = max_err;
  out.loewner_real = state.loewner;
  out.x_opt = state.x_opt;
  out.history = state.history;
  out.support_indices = state.support_indices;
  out.test_indices = state.test_indices;
  return out;
}

}  // namespace

AaaState aaa_initialize(const FrequencyDataset& ds, ErrorMode mode) {
  if (ds.size() < 2) throw ValidationError("aaa: need at least 2 samples");
  cplx mean(0.0);
  for (const cplx& h : ds.values()) mean += h;
  mean /= static_cast<double>(ds.size());

  AaaState state;
  state.model = BarycentricModel::constant(mean.real());
  state.test_indices.resize(ds.size());
  for (std::size_t v = 0; v < ds.size(); ++v) state.test_indices[v] = v;
  state.error_mode = mode;
  return state;
}

std::vector<double> test_errors(const AaaState& state, const FrequencyDataset& ds) {
  std::vector<double> err(state.test_indices.size());
  for (std::size_t t = 0; t < err.size(); ++t) {
    const std::size_t v = state.test_indices[t];
    const cplx h = ds.values()[v];
    const double e = std::abs(evaluate(state.model, cplx(0.0, ds.freqs()[v])) - h);
    err[t] = (state.error_mode == ErrorMode::kRelative && h != 0.0) ? e / std::abs(h) : e;
  }
  return err;
}

double max_test_error(const AaaState& state, const FrequencyDataset& ds) {
  const std::vector<double> err = test_errors(state, ds);
  return err.empty() ? 0.0 : *std::max_element(err.begin(), err.end());
}

std::size_t select_support(const AaaState& state, const FrequencyDataset& ds) {
  if (state.test_indices.empty()) throw SaturationError("select_support: test set is empty");
  const std::vector<double> err = test_errors(state, ds);
  // test_indices is ascending in frequency, so the first maximum is the lowest frequency.
  std::size_t best = 0;
  for (std::size_t t = 1; t < err.size(); ++t) {
    if (err[t] > err[best]) best = t;
  }
  return state.test_indices[best];
}

WeightSolution solve_weights(const Eigen::MatrixXd& M, RankCheck check) {
  const Eigen::Index n = M.cols();
  if (n == 0) throw ValidationError("solve_weights: empty matrix");
  if (!M.allFinite()) throw NumericalError("solve_weights: non-finite quasi-Loewner entries");

  WeightSolution sol;
  Eigen::VectorXd sv;
  Eigen::MatrixXd V;
  if (M.rows() >= n) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(M);
    const Eigen::MatrixXd R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(R, Eigen::ComputeFullV);
    sv = svd.singularValues();
    V = svd.matrixV();
  } else {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    sv = Eigen::VectorXd::Zero(n);
    sv.head(svd.singularValues().size()) = svd.singularValues();
    V = svd.matrixV();
  }
  sol.sigma_max = sv(0);
  sol.sigma_min = sv(n - 1);
  sol.x = V.col(n - 1);

  const double ratio = sol.sigma_max > 0.0 ? sol.sigma_min / sol.sigma_max : 0.0;
  if (check == RankCheck::kStrict && ratio < 1e-14) {
    throw ConditioningError("solve_weights: quasi-Loewner matrix is numerically rank deficient "
                            "(sigma_min/sigma_max = " + std::to_string(ratio) + ")",
                            ratio);
  }

  double alpha_sum = 0.0;
  for (Eigen::Index i = 0; i < n; i += 2) alpha_sum += sol.x(i);
  if (alpha_sum < 0.0) {
    sol.x = -sol.x;
  } else if (alpha_sum == 0.0) {
    Eigen::Index lead = 0;
    while (lead < n && sol.x(lead) == 0.0) ++lead;
    if (lead < n && sol.x(lead) < 0.0) sol.x = -sol.x;
  }
  sol.x.normalize();
  return sol;
}

WeightSolution solve_weights(const RealQuasiLoewner& M, RankCheck check) {
  return solve_weights(M.matrix, check);
}

void aaa_step(AaaState& state, const FrequencyDataset& ds) {
  if (state.test_indices.size() < 2) {
    throw SaturationError("aaa: test set exhausted after " + std::to_string(state.iteration()) +
                          " iterations");
  }
  const std::size_t chosen = select_support(state, ds);
  state.support_indices.push_back(chosen);
  std::erase(state.test_indices, chosen);

  SampleSet support, test;
  for (std::size_t v : state.support_indices) {
    support.freqs.push_back(ds.freqs()[v]);
    support.values.push_back(ds.values()[v]);
  }
  for (std::size_t v : state.test_indices) {
    test.freqs.push_back(ds.freqs()[v]);
    test.values.push_back(ds.values()[v]);
  }
  state.loewner = real_quasi_loewner(support, test);
  const WeightSolution sol = solve_weights(state.loewner, RankCheck::kDiagnose);
  state.x_opt = sol.x;
  state.model = make_model(support.freqs, support.values, sol.x);

  IterationRecord rec;
  rec.iter = state.iteration();
  rec.chosen_freq = ds.freqs()[chosen];
  rec.max_err = max_test_error(state, ds);
  rec.sigma_min = sol.sigma_min;
  rec.sigma_ratio = sol.sigma_max > 0.0 ? sol.sigma_min / sol.sigma_max : 0.0;
  state.history.push_back(rec);
}

FitOutcome aaa_resume(AaaState& state, const FrequencyDataset& ds, double eps, std::size_t max_iter,
                      const TraceCallback& trace) {
  if (!(eps > 0.0)) throw ValidationError("aaa: tolerance must be positive");
  if (max_iter < 1) throw ValidationError("aaa: max_iter must be at least 1");
  double err = max_test_error(state, ds);
  while (err > eps && state.iteration() < max_iter) {
    aaa_step(state, ds);
    err = state.history.back().max_err;
    if (trace) trace(state.history.back());
  }
  return snapshot(state, err <= eps, err);
}

std::size_t default_max_iter(const FrequencyDataset& ds) { return std::max<std::size_t>(1, ds.size() / 4); }

FitOutcome aaa_fit(const FrequencyDataset& ds, double eps, std::size_t max_iter, ErrorMode mode,
                   const TraceCallback& trace) {
  AaaState state = aaa_initialize(ds, mode);
  return aaa_resume(state, ds, eps, max_iter == 0 ? default_max_iter(ds) : max_iter, trace);
}

}  // namespace stabaaa
