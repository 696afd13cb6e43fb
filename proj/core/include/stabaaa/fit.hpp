#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "stabaaa/barycentric.hpp"
#include "stabaaa/dataset.hpp"
#include "stabaaa/loewner.hpp"
#include "stabaaa/stability.hpp"
#include "stabaaa/stabilize.hpp"

namespace stabaaa {

enum class Algorithm { kAaa, kStabAaa, kLoewner, kTruncateRefit };

/// Accepts "aaa", "stabaaa", "loewner" and "truncate-refit". Throws ValidationError otherwise.
Algorithm parse_algorithm(const std::string& name);
const char* to_string(Algorithm a);

enum class ModelKind { kBarycentric, kPoleResidue, kDescriptor };

const char* to_string(ModelKind k);

/// A fitted transfer function in one of the supported representations.
class FittedModel {
 public:
  FittedModel() = default;
  explicit FittedModel(BarycentricModel m) : rep_(std::move(m)) {}
  explicit FittedModel(PoleSet ps) : rep_(std::move(ps)) {}
  explicit FittedModel(DescriptorRealization r) : rep_(std::move(r)) {}

  ModelKind kind() const { return static_cast<ModelKind>(rep_.index()); }
  const BarycentricModel& barycentric() const { return std::get<BarycentricModel>(rep_); }
  const PoleSet& pole_residue() const { return std::get<PoleSet>(rep_); }
  const DescriptorRealization& descriptor() const { return std::get<DescriptorRealization>(rep_); }

  /// Support points, pole count, or state dimension.
  std::size_t order() const;
  cplx operator()(cplx s) const;
  std::vector<cplx> evaluate_on(const FrequencyDataset& ds) const;

 private:
  std::variant<BarycentricModel, PoleSet, DescriptorRealization> rep_;
};

struct ModelStability {
  bool stable = false;
  double margin = 0.0;  // max Re over finite poles, -inf without poles
  std::vector<cplx> poles;
  std::size_t unstable_count = 0;
  int infinite_count = 0;
  std::optional<StabilityReport> barycentric;  // full report for barycentric models
};

/// stable <=> every finite pole has Re < 0.
ModelStability assess_stability(const FittedModel& m);

/// Finite poles, residues and constant term. Descriptor models carry poles only.
PoleSet pole_residue_form(const FittedModel& m);

/// A descriptor realization with the same transfer function. Barycentric
/// models use the all-real form (kind kReal); pole-residue models use
/// E = diag(I, 0), A = diag(p, -1), B = ones, C = [r, d].
DescriptorRealization realization_of(const FittedModel& m);

struct RealizationCheck {
  std::uint64_t seed = 0;
  int points = 0;
  double max_rel_diff = 0.0;  // max |H_r(s) - H(s)| / max(|H(s)|, 1e-300)
};

/// Compares r.transfer(s) with m(s) at random points s = j f, log10 f uniform
/// in [-2, 2].
RealizationCheck check_realization(const FittedModel& m, const DescriptorRealization& r, std::uint64_t seed,
                                   int points = 16);

struct FitRequest {
  Algorithm algorithm = Algorithm::kStabAaa;
  StabAaaConfig stabaaa{};  // tolerance, theta, m_max, max_iter and error mode apply to every greedy fit
  double loewner_rank_tol = 0.0;  // relative singular value cutoff, 0 = use the tolerance
};

struct FitResult {
  Algorithm algorithm = Algorithm::kStabAaa;
  FittedModel model;
  ModelStability stability;
  ErrorReport metrics;
  bool met_tolerance = false;  // greedy fits: test-set criterion; loewner, truncate-refit: e_inf <= tolerance
  int rounds = 0;
  int sdp_calls = 0;
  double final_eps = 0.0;
  std::optional<StabAaaOutcome> stabaaa;
};

/// Runs one fitting algorithm. truncate-refit starts from the AAA fit at the
/// requested tolerance.
FitResult run_fit(const FrequencyDataset& ds, const FitRequest& req);

}  // namespace stabaaa
