#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace stabaaa::lmi {

/// coef * (u_a u_b^T + u_b u_a^T), u_* being dictionary columns of the block.
struct LowRankTerm {
  int a = 0;
  int b = 0;
  double coef = 0.0;
};

/// One diagonal block of S(y) = F0 + sum_i y_i F_i. Each F_i restricted to the
/// block is a short sum of symmetric rank-2 terms over a shared dictionary.
struct Block {
  Eigen::MatrixXd constant;
  Eigen::MatrixXd dictionary;
  std::vector<std::vector<LowRankTerm>> terms;  // one list per decision variable

  Eigen::Index size() const { return constant.rows(); }
};

/// minimize c^T y  subject to  S(y) = F0 + sum_i y_i F_i >= 0 (block diagonal).
struct Problem {
  Eigen::VectorXd c;
  std::vector<Block> blocks;

  Eigen::Index num_vars() const { return c.size(); }
  /// Throws ValidationError on inconsistent shapes or out-of-range term indices.
  void validate() const;
};

struct Settings {
  int max_iter = 100;
  double gap_tol = 1e-8;      // relative duality gap
  double feas_tol = 1e-9;     // relative primal / dual residuals
  double infeas_tol = 1e-8;   // certificate accuracy for infeasibility
  double step_fraction = 0.98;
  double fallback_tol = 1e-3;  // gap and residuals of the best iterate accepted on breakdown
  int stall_window = 8;        // iterations without halving the gap before giving up
  std::ostream* log = nullptr;  // per-iteration progress when set
};

/// kNearOptimal: the iteration broke down or stalled; the best iterate is
/// returned with its gap and residuals within fallback_tol.
enum class Status { kOptimal, kNearOptimal, kMaxIterations, kInfeasible };

const char* to_string(Status s);

inline bool has_solution(Status s) { return s == Status::kOptimal || s == Status::kNearOptimal; }

struct Result {
  Status status = Status::kMaxIterations;
  Eigen::VectorXd y;
  std::vector<Eigen::MatrixXd> S;  // slack blocks F0 + sum y_i F_i
  std::vector<Eigen::MatrixXd> X;  // dual multipliers
  double objective = 0.0;          // c^T y
  double dual_objective = 0.0;     // -<F0, X>
  double gap = 0.0;                // <S, X>
  double rel_gap = 0.0;
  double primal_residual = 0.0;    // || S(y) - Z || relative
  double dual_residual = 0.0;      // || c + <F_i, X> || relative
  int iterations = 0;
};

/// F0 + sum_i y_i F_i for one block.
Eigen::MatrixXd assemble(const Block& block, const Eigen::VectorXd& y);

/// F_i of one block as a dense matrix.
Eigen::MatrixXd coefficient_matrix(const Block& block, Eigen::Index var);

/// Primal-dual interior-point method with Nesterov-Todd scaling and Mehrotra
/// predictor-corrector steps from an infeasible start. Throws NumericalError
/// when the iteration breaks down before any iterate meets fallback_tol.
Result solve(const Problem& p, const Settings& settings = {});

/// Sparse SDPA text: m, block count, block sizes, c, then "mat block i j value"
/// for the upper triangles of -F0 (mat 0) and F_1..F_m.
void write_sdpa(std::ostream& out, const Problem& p);

}  // namespace stabaaa::lmi
