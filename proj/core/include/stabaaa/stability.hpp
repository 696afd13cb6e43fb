#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "stabaaa/barycentric.hpp"
#include "stabaaa/loewner.hpp"

namespace stabaaa {

/// Minimal realization of the barycentric denominator D(s):
/// A = blkdiag([[0, l_i], [-l_i, 0]]), B = [2, 0, 2, 0, ...]^T, C = [a_1, b_1, ...].
struct DenominatorRealization {
  Eigen::MatrixXd A;
  Eigen::VectorXd B;
  Eigen::RowVectorXd C;

  cplx transfer(cplx s) const;
};

DenominatorRealization build_denominator_realization(const BarycentricModel& m);

/// Denominator realization in the coordinates T = V Sigma of the thin SVD
/// L_real = U Sigma V^T: A_t = T^{-1} A T, B_t = T^{-1} B, C_t = C T,
/// xbar = Sigma V^T x_opt.
struct TransformedDenominator {
  DenominatorRealization original;
  Eigen::VectorXd x_opt;
  Eigen::MatrixXd A_t;
  Eigen::VectorXd B_t;
  Eigen::RowVectorXd C_t;
  Eigen::VectorXd xbar;
  Eigen::MatrixXd T;
  Eigen::MatrixXd U;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd V;

  cplx transfer(cplx s) const;  // C_t (sI - A_t)^{-1} B_t
};

/// Throws ConditioningError when sigma_min / sigma_max of M is <= 1e-14.
TransformedDenominator transform_denominator(const DenominatorRealization& den, const Eigen::MatrixXd& M,
                                             const Eigen::VectorXd& x_opt);
TransformedDenominator transform_denominator(const DenominatorRealization& den, const RealQuasiLoewner& M,
                                             const Eigen::VectorXd& x_opt);

enum class Characterization { kExact, kSufficient };

struct StabilityReport {
  bool stable = false;
  PoleSet finite_poles;
  std::vector<cplx> unstable_poles;  // Re >= 0
  std::vector<cplx> borderline_poles;  // |Re| < 1e-10
  double margin = 0.0;               // max Re over finite poles
  int cb_sign = 0;                   // sign of C B = 2 sum(alpha)
  Characterization characterization = Characterization::kExact;  // kSufficient when #poles != 2k-1
};

/// stable <=> every finite pole has Re < 0 (strict).
StabilityReport classify_stability(const BarycentricModel& m);

struct SprCertificate {
  bool feasible = false;
  std::string reason;           // why infeasible, empty when feasible
  Eigen::MatrixXd P;            // KYP matrix, P B = C^T
  double g = 0.0;
  double delta = 0.0;           // margin requested
  double margin = 0.0;          // achieved t: P >= tI, -(A_cl^T P + P A_cl) >= tI
  double kyp_max_eig = 0.0;     // lambda_max(A_cl^T P + P A_cl)
  double p_min_eig = 0.0;       // lambda_min(P)
  double equality_residual = 0.0;  // || P B - C^T ||
};

/// Checks whether (A - gBC, B, C) is strictly positive real through the KYP
/// LMI. C B > 0 and a Hurwitz closed loop are checked first. delta <= 0
/// selects 1e-8 * max(1, ||A||_F). Throws NumericalError on solver failure.
SprCertificate verify_spr(const Eigen::MatrixXd& A, const Eigen::VectorXd& B, const Eigen::RowVectorXd& C,
                          double g, double delta = 0.0);

}  // namespace stabaaa
