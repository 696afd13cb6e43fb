#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "stabaaa/lmi_solver.hpp"
#include "stabaaa/stability.hpp"

namespace stabaaa {

/// Coordinates in which the convex program is posed. The program is
/// invariant under the change of variables T (congruent LMIs, identical
/// objective); only the strictness margins differ. kDenominator uses
/// (A, B, x_opt) of the denominator realization, kTransformed uses
/// (A_t, B_t, xbar).
enum class SdpCoordinates { kDenominator, kTransformed };

struct SdpConfig {
  SdpCoordinates coordinates = SdpCoordinates::kDenominator;
  double margin_scale = 1e-8;  // delta = margin_scale * max(1, ||A||_F)
  double gain_bound = 1e8;     // |g| <= gain_bound
  double y_bound_scale = 5e3;  // Y <= y_bound_scale * max(1, ||A||_F) I; 0 disables
  lmi::Settings solver{};
};

/// min r  s.t.  Y >= d_pd I,  A Y + Y A^T - 2 g B B^T <= -d_lmi I,
///              [[r, (B - Y x)^T], [B - Y x, Y]] >= 0,  |g| <= gain_bound.
///
/// Decision vector: upper triangle of Y row by row, then g, then r.
/// LMI blocks in order: Y (2k), Lyapunov (2k), Schur (2k+1), gain box (2),
/// then Y <= y_bound I (2k) when y_bound > 0.
struct StabilitySdp {
  Eigen::MatrixXd A;
  Eigen::VectorXd B;
  Eigen::VectorXd x;
  SdpCoordinates coordinates = SdpCoordinates::kDenominator;
  TransformedDenominator td;
  double delta_pd = 0.0;
  double delta_lmi = 0.0;
  double gain_bound = 1e8;
  double y_bound = 0.0;
  lmi::Problem problem;
  lmi::Settings settings;

  Eigen::Index dim() const { return A.rows(); }
  Eigen::Index num_vars() const { return dim() * (dim() + 1) / 2 + 2; }
  Eigen::Index y_index(Eigen::Index a, Eigen::Index b) const;
  Eigen::Index g_index() const { return num_vars() - 2; }
  Eigen::Index r_index() const { return num_vars() - 1; }

  Eigen::VectorXd pack(const Eigen::MatrixXd& Y, double g, double r) const;
  /// The four constraint blocks evaluated at (Y, g, r); all must be PSD.
  std::vector<Eigen::MatrixXd> constraint_blocks(const Eigen::MatrixXd& Y, double g, double r) const;
};

StabilitySdp build_stability_sdp(const TransformedDenominator& td, const SdpConfig& cfg = {});

struct SdpSolution {
  Eigen::MatrixXd Y;         // T coordinates
  Eigen::MatrixXd Y_solver;  // coordinates the problem was solved in
  double g = 0.0;
  double r = 0.0;
  lmi::Status status = lmi::Status::kMaxIterations;
  double duality_gap = 0.0;
  double rel_gap = 0.0;
  int iterations = 0;
  SdpCoordinates coordinates = SdpCoordinates::kDenominator;

  /// Y^{-1} in T coordinates, through a Cholesky solve.
  Eigen::MatrixXd Q() const;
};

/// Throws NumericalError on solver breakdown. An uncontrollable mode of (A, B)
/// on or right of the imaginary axis is reported as kInfeasible without
/// running the interior-point method.
SdpSolution solve_sdp(const StabilitySdp& p);

/// C^T = Y^{-1} B through a Cholesky solve, mapped back through T when the
/// program was posed in T coordinates; w_i = C[2i] + j C[2i+1].
/// Throws ValidationError unless the solver returned a solution and ConditioningError
/// when cond(Y) > 1e12.
std::vector<cplx> recover_weights(const SdpSolution& sol, const StabilitySdp& p);

struct CertificateCheck {
  double y_min_eig = 0.0;
  double lyapunov_max_eig = 0.0;  // of A Y + Y A^T - 2 g B B^T
  double kyp_max_eig = 0.0;       // of Q A + A^T Q - 2 g Q B B^T Q, Q = Y^{-1}
  double kyp_congruent_max_eig = 0.0;  // of L^{-1} (A Y + Y A^T - 2 g B B^T) L^{-T}, Y = L L^T
  double schur_gap = 0.0;         // r - (B - Y x)^T Q (B - Y x)
  bool passed = false;            // margins >= delta / 2 and kyp_congruent_max_eig < 0
};

/// Independent eigenvalue re-check of a solution in solver coordinates.
CertificateCheck check_certificate(const StabilitySdp& p, const SdpSolution& sol);

}  // namespace stabaaa
