#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stabaaa/aaa.hpp"
#include "stabaaa/errors.hpp"
#include "stabaaa/sdp.hpp"
#include "stabaaa/stability.hpp"

namespace stabaaa {

struct StabAaaConfig {
  double tolerance = 1e-3;  // target max error on the test set
  double theta = 0.1;       // tolerance decreasing factor, 0 < theta < 1
  int m_max = 5;            // retries after the first stabilization
  std::size_t max_iter = 0; // AAA support-point cap, 0 = floor(V/4)
  ErrorMode error_mode = ErrorMode::kAbsolute;
  bool restart = false;     // restart AAA from scratch instead of resuming
  SdpConfig sdp{};
  TraceCallback trace{};

  /// Throws ValidationError on out-of-range fields.
  void validate() const;
};

struct RoundRecord {
  int round = 0;
  double eps = 0.0;
  std::size_t k = 0;
  bool aaa_stable = false;
  bool sdp_used = false;
  double sdp_objective = 0.0;
  double test_error = 0.0;  // after stabilization when sdp_used
  std::string failure;      // set when this round's stabilization failed
};

/// One SDP projection of an unstable model onto the stable set.
struct Stabilization {
  BarycentricModel model;
  StabilitySdp problem;
  SdpSolution solution;
  CertificateCheck check;
};

struct StabAaaOutcome {
  BarycentricModel model;
  bool stable = false;
  bool met_tolerance = false;
  int rounds = 0;
  int sdp_invocations = 0;
  double final_eps = 0.0;
  double test_error = 0.0;  // max error on the final test set
  ErrorReport metrics;      // over the whole dataset
  std::vector<RoundRecord> history;
  std::optional<Stabilization> certificate;  // set when the returned model came from the SDP
  std::vector<std::size_t> support_indices;
  std::vector<std::size_t> test_indices;
};

/// Raised when the stabilization step cannot produce a stable model.
/// Carries the last unconstrained model for diagnosis.
class StabilizationError : public Error {
 public:
  StabilizationError(const std::string& what, BarycentricModel last) : Error(what), last_(std::move(last)) {}
  const BarycentricModel& last_model() const { return last_; }

 private:
  BarycentricModel last_;
};

/// Solves the convex stability program for the model defined by the quasi-
/// Loewner matrix M and its minimizer x_opt, then rebuilds the weights.
/// Throws ConditioningError, NumericalError, or StabilizationError.
Stabilization stabilize(const BarycentricModel& m, const RealQuasiLoewner& M, const Eigen::VectorXd& x_opt,
                        const SdpConfig& cfg = {});

/// Greedy fitting with stability enforcement and tolerance tightening.
/// When a later round cannot be stabilized, the previous stabilized model is
/// returned with met_tolerance = false. Throws StabilizationError when no
/// stable model was obtained.
StabAaaOutcome stabaaa_fit(const FrequencyDataset& ds, const StabAaaConfig& cfg);

/// Unstable poles discarded, residues and a real constant refitted by linear
/// least squares over the dataset with conjugate pairs kept conjugate.
/// Throws DegenerateDataError when no stable pole remains.
PoleSet truncate_refit(const BarycentricModel& m, const FrequencyDataset& ds);

}  // namespace stabaaa
