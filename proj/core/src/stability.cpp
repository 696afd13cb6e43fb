#include "stabaaa/stability.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "stabaaa/errors.hpp"
#include "stabaaa/lmi_solver.hpp"

namespace stabaaa {

namespace {

cplx state_space_transfer(const Eigen::MatrixXd& A, const Eigen::VectorXd& B, const Eigen::RowVectorXd& C,
                          cplx s) {
  const Eigen::Index n = A.rows();
  const Eigen::MatrixXcd pencil = s * Eigen::MatrixXcd::Identity(n, n) - A.cast<cplx>();
  const Eigen::VectorXcd x = pencil.partialPivLu().solve(B.cast<cplx>());
  return (C.cast<cplx>() * x)(0);
}

double max_real_eigenvalue(const Eigen::MatrixXd& A) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  if (es.info() != Eigen::Success) throw NumericalError("eigenvalues: real Schur iteration failed");
  return es.eigenvalues().real().maxCoeff();
}

double sym_min_eig(const Eigen::MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double sym_max_eig(const Eigen::MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(S.rows() - 1);
}

}  // namespace

cplx DenominatorRealization::transfer(cplx s) const { return state_space_transfer(A, B, C, s); }

cplx TransformedDenominator::transfer(cplx s) const { return state_space_transfer(A_t, B_t, C_t, s); }

DenominatorRealization build_denominator_realization(const BarycentricModel& m) {
  if (m.order() == 0) throw ValidationError("build_denominator_realization: model has no support points");
  const auto k = static_cast<Eigen::Index>(m.order());
  DenominatorRealization d;
  d.A = Eigen::MatrixXd::Zero(2 * k, 2 * k);
  d.B = Eigen::VectorXd::Zero(2 * k);
  d.C = Eigen::RowVectorXd(2 * k);
  for (Eigen::Index i = 0; i < k; ++i) {
    d.A(2 * i, 2 * i + 1) = m.support()[i];
    d.A(2 * i + 1, 2 * i) = -m.support()[i];
    d.B(2 * i) = 2.0;
    d.C(2 * i) = m.weights()[i].real();
    d.C(2 * i + 1) = m.weights()[i].imag();
  }
  return d;
}

TransformedDenominator transform_denominator(const DenominatorRealization& den, const Eigen::MatrixXd& M,
                                             const Eigen::VectorXd& x_opt) {
  const Eigen::Index n = den.A.rows();
  if (M.cols() != n || x_opt.size() != n) throw ValidationError("transform_denominator: dimension mismatch");
  if (M.rows() < n) {
    throw ConditioningError("transform_denominator: quasi-Loewner matrix has fewer rows than columns", 0.0);
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double ratio = s(0) > 0.0 ? s(n - 1) / s(0) : 0.0;
  if (!(ratio > 1e-14)) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1e", ratio);
    throw ConditioningError(std::string("transform_denominator: quasi-Loewner matrix is numerically rank deficient "
                                        "(sigma_min/sigma_max = ") + buf + ")",
                            ratio);
  }
  TransformedDenominator td;
  td.original = den;
  td.x_opt = x_opt;
  td.U = svd.matrixU();
  td.sigma = s;
  td.V = svd.matrixV();
  td.T = td.V * s.asDiagonal();
  const Eigen::MatrixXd VtAV = td.V.transpose() * den.A * td.V;
  td.A_t = s.cwiseInverse().asDiagonal() * VtAV * s.asDiagonal();
  td.B_t = s.cwiseInverse().asDiagonal() * (td.V.transpose() * den.B);
  td.C_t = den.C * td.T;
  td.xbar = s.asDiagonal() * (td.V.transpose() * x_opt);
  return td;
}

TransformedDenominator transform_denominator(const DenominatorRealization& den, const RealQuasiLoewner& M,
                                             const Eigen::VectorXd& x_opt) {
  return transform_denominator(den, M.matrix, x_opt);
}

StabilityReport classify_stability(const BarycentricModel& m) {
  StabilityReport rep;
  if (m.order() == 0) {
    rep.stable = true;
    rep.margin = -std::numeric_limits<double>::infinity();
    return rep;
  }
  rep.finite_poles = poles(m);
  rep.margin = -std::numeric_limits<double>::infinity();
  for (const cplx& p : rep.finite_poles.finite_poles) {
    rep.margin = std::max(rep.margin, p.real());
    if (p.real() >= 0.0) rep.unstable_poles.push_back(p);
    if (std::abs(p.real()) < 1e-10) rep.borderline_poles.push_back(p);
  }
  rep.stable = rep.unstable_poles.empty();
  double alpha_sum = 0.0;
  for (const cplx& w : m.weights()) alpha_sum += w.real();
  rep.cb_sign = (alpha_sum > 0.0) - (alpha_sum < 0.0);
  const std::size_t expected = 2 * m.order() - 1;
  rep.characterization =
      rep.finite_poles.finite_poles.size() == expected ? Characterization::kExact : Characterization::kSufficient;
  return rep;
}

SprCertificate verify_spr(const Eigen::MatrixXd& A, const Eigen::VectorXd& B, const Eigen::RowVectorXd& C,
                          double g, double delta) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.size() != n || C.size() != n || n == 0) {
    throw ValidationError("verify_spr: inconsistent system dimensions");
  }
  SprCertificate cert;
  cert.g = g;
  cert.delta = delta > 0.0 ? delta : 1e-8 * std::max(1.0, A.norm());

  const double cb = C.dot(B);
  if (!(cb > 0.0)) {
    cert.reason = "CB <= 0";
    return cert;
  }
  const Eigen::MatrixXd Acl = A - g * B * C;
  if (max_real_eigenvalue(Acl) >= 0.0) {
    cert.reason = "closed loop A - gBC is not Hurwitz";
    return cert;
  }

  // P = Pp + N Z N^T satisfies P B = C^T for every symmetric Z.
  const double beta = B.squaredNorm();
  const Eigen::MatrixXd Pp = (C.transpose() * B.transpose() + B * C) / beta - cb * (B * B.transpose()) / (beta * beta);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(B);
  const Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd N = Q.rightCols(n - 1);
  const Eigen::Index r = n - 1;
  const Eigen::Index nz = r * (r + 1) / 2;
  const Eigen::Index t_var = nz;

  lmi::Problem prob;
  prob.c = Eigen::VectorXd::Zero(nz + 1);
  prob.c(t_var) = -1.0;

  lmi::Block bp;
  bp.constant = Pp;
  bp.dictionary.resize(n, r + n);
  bp.dictionary << N, Eigen::MatrixXd::Identity(n, n);
  bp.terms.resize(nz + 1);

  lmi::Block bk;
  bk.constant = -(Acl.transpose() * Pp + Pp * Acl);
  bk.dictionary.resize(n, 2 * r + n);
  bk.dictionary << N, Acl.transpose() * N, Eigen::MatrixXd::Identity(n, n);
  bk.terms.resize(nz + 1);

  Eigen::Index var = 0;
  for (Eigen::Index a = 0; a < r; ++a) {
    for (Eigen::Index b = a; b < r; ++b, ++var) {
      const int ia = static_cast<int>(a), ib = static_cast<int>(b), rr = static_cast<int>(r);
      if (a == b) {
        bp.terms[var].push_back({ia, ia, 0.5});
        bk.terms[var].push_back({rr + ia, ia, -1.0});
      } else {
        bp.terms[var].push_back({ia, ib, 1.0});
        bk.terms[var].push_back({rr + ia, ib, -1.0});
        bk.terms[var].push_back({rr + ib, ia, -1.0});
      }
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const int ip = static_cast<int>(r + i), ik = static_cast<int>(2 * r + i);
    bp.terms[t_var].push_back({ip, ip, -0.5});
    bk.terms[t_var].push_back({ik, ik, -0.5});
  }

  lmi::Block box;
  box.constant = Eigen::MatrixXd::Ones(1, 1);
  box.dictionary = Eigen::MatrixXd::Ones(1, 1);
  box.terms.resize(nz + 1);
  box.terms[t_var].push_back({0, 0, -0.5});

  prob.blocks = {std::move(bp), std::move(bk), std::move(box)};
  lmi::Settings settings;
  settings.gap_tol = 1e-9;
  const lmi::Result res = lmi::solve(prob, settings);

  Eigen::MatrixXd P = Pp;
  var = 0;
  for (Eigen::Index a = 0; a < r; ++a) {
    for (Eigen::Index b = a; b < r; ++b, ++var) {
      const Eigen::MatrixXd outer = N.col(a) * N.col(b).transpose();
      P += res.y(var) * (a == b ? outer : Eigen::MatrixXd(outer + outer.transpose()));
    }
  }
  P = 0.5 * (P + P.transpose());
  cert.P = P;
  cert.margin = res.y(t_var);
  cert.p_min_eig = sym_min_eig(P);
  cert.kyp_max_eig = sym_max_eig(Acl.transpose() * P + P * Acl);
  cert.equality_residual = (P * B - C.transpose()).norm();

  const bool verified = cert.p_min_eig >= cert.delta / 2 && cert.kyp_max_eig <= -cert.delta / 2 &&
                        cert.equality_residual <= 1e-8 * std::max(1.0, C.norm());
  if (!lmi::has_solution(res.status) && !verified) {
    throw NumericalError(std::string("verify_spr: LMI solver ended with status ") + lmi::to_string(res.status));
  }
  cert.feasible = cert.margin >= cert.delta && verified;
  if (!cert.feasible) cert.reason = "KYP LMI infeasible at the requested margin";
  return cert;
}

}  // namespace stabaaa
