#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <vector>

#include "stabaaa/barycentric.hpp"
#include "stabaaa/dataset.hpp"
#include "stabaaa/loewner.hpp"

namespace stabaaa {

enum class ErrorMode { kAbsolute, kRelative };

struct IterationRecord {
  std::size_t iter = 0;
  double chosen_freq = 0.0;
  double max_err = 0.0;    // max error of the updated model on the remaining test set
  double sigma_min = 0.0;  // least singular value of the quasi-Loewner matrix
  double sigma_ratio = 0.0;
};

/// Greedy loop state. Support indices are in selection order; test indices
/// are ascending and always complement the support indices.
struct AaaState {
  BarycentricModel model;
  std::vector<std::size_t> support_indices;
  std::vector<std::size_t> test_indices;
  std::vector<IterationRecord> history;
  RealQuasiLoewner loewner;  // matrix of the most recent least-squares step
  Eigen::VectorXd x_opt;     // its minimizer, unit norm, sum(alpha) > 0
  ErrorMode error_mode = ErrorMode::kAbsolute;

  std::size_t iteration() const { return support_indices.size(); }
};

/// Order-0 state: constant Re(mean h), every sample in the test set.
AaaState aaa_initialize(const FrequencyDataset& ds, ErrorMode mode = ErrorMode::kAbsolute);

/// Errors of the current model on the test set, parallel to state.test_indices.
std::vector<double> test_errors(const AaaState& state, const FrequencyDataset& ds);

/// Maximum of test_errors(), 0 for an empty test set.
double max_test_error(const AaaState& state, const FrequencyDataset& ds);

/// Dataset index of the test point with the largest error; ties go to the
/// lowest frequency. Throws SaturationError when the test set is empty.
std::size_t select_support(const AaaState& state, const FrequencyDataset& ds);

enum class RankCheck { kStrict, kDiagnose };

struct WeightSolution {
  Eigen::VectorXd x;  // [a_1, b_1, ..., a_l, b_l], unit norm
  double sigma_min = 0.0;
  double sigma_max = 0.0;
};

/// Right singular vector of the least singular value, signed so that
/// sum(alpha) > 0. kStrict throws ConditioningError when sigma_min/sigma_max < 1e-14.
WeightSolution solve_weights(const RealQuasiLoewner& M, RankCheck check = RankCheck::kStrict);
WeightSolution solve_weights(const Eigen::MatrixXd& M, RankCheck check = RankCheck::kStrict);

/// Moves the worst test point to the support set and re-solves the weights.
/// Throws SaturationError when fewer than two test points remain.
void aaa_step(AaaState& state, const FrequencyDataset& ds);

struct FitOutcome {
  BarycentricModel model;
  bool converged = false;
  std::size_t iterations = 0;    // k
  double final_max_error = 0.0;  // on the final test set
  RealQuasiLoewner loewner_real;
  Eigen::VectorXd x_opt;
  std::vector<IterationRecord> history;
  std::vector<std::size_t> support_indices;
  std::vector<std::size_t> test_indices;
};

using TraceCallback = std::function<void(const IterationRecord&)>;

/// Runs the greedy loop from `state` until the test-set error is <= eps or
/// the model has max_iter support points.
FitOutcome aaa_resume(AaaState& state, const FrequencyDataset& ds, double eps, std::size_t max_iter,
                      const TraceCallback& trace = {});

/// Default iteration cap floor(V/4), at least 1.
std::size_t default_max_iter(const FrequencyDataset& ds);

/// max_iter = 0 selects default_max_iter(ds).
FitOutcome aaa_fit(const FrequencyDataset& ds, double eps, std::size_t max_iter = 0,
                   ErrorMode mode = ErrorMode::kAbsolute, const TraceCallback& trace = {});

}  // namespace stabaaa
