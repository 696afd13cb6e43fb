#include "stabaaa/sdp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "stabaaa/errors.hpp"

namespace stabaaa {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

double sym_eig_min(const MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double sym_eig_max(const MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(S.rows() - 1);
}

// PBH test: an eigenvalue of A with Re >= 0 at which [A - lambda I, B] loses rank.
bool has_uncontrollable_unstable_mode(const MatrixXd& A, const VectorXd& B) {
  const Index n = A.rows();
  Eigen::EigenSolver<MatrixXd> es(A, false);
  if (es.info() != Eigen::Success) throw NumericalError("sdp: eigenvalues of A failed");
  const double scale = std::max({1.0, A.norm(), B.norm()});
  for (Index i = 0; i < n; ++i) {
    const cplx lam = es.eigenvalues()(i);
    if (lam.real() < -1e-12 * scale) continue;
    Eigen::MatrixXcd pbh(n, n + 1);
    pbh.leftCols(n) = A.cast<cplx>() - lam * Eigen::MatrixXcd::Identity(n, n);
    pbh.col(n) = B.cast<cplx>();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pbh);
    if (svd.singularValues()(n - 1) <= 1e-10 * scale) return true;
  }
  return false;
}

}  // namespace

Index StabilitySdp::y_index(Index a, Index b) const {
  if (a > b) std::swap(a, b);
  const Index n = dim();
  return a * n - a * (a - 1) / 2 + (b - a);
}

VectorXd StabilitySdp::pack(const MatrixXd& Y, double g, double r) const {
  const Index n = dim();
  VectorXd v(num_vars());
  for (Index a = 0; a < n; ++a) {
    for (Index b = a; b < n; ++b) v(y_index(a, b)) = Y(a, b);
  }
  v(g_index()) = g;
  v(r_index()) = r;
  return v;
}

std::vector<MatrixXd> StabilitySdp::constraint_blocks(const MatrixXd& Y, double g, double r) const {
  const Index n = dim();
  std::vector<MatrixXd> out(4);
  out[0] = Y - delta_pd * MatrixXd::Identity(n, n);
  out[1] = -(A * Y + Y * A.transpose() - 2.0 * g * B * B.transpose()) - delta_lmi * MatrixXd::Identity(n, n);
  out[2].resize(n + 1, n + 1);
  const VectorXd v = B - Y * x;
  out[2](0, 0) = r;
  out[2].block(1, 0, n, 1) = v;
  out[2].block(0, 1, 1, n) = v.transpose();
  out[2].bottomRightCorner(n, n) = Y;
  out[3] = MatrixXd::Zero(2, 2);
  out[3](0, 0) = gain_bound - g;
  out[3](1, 1) = gain_bound + g;
  return out;
}

StabilitySdp build_stability_sdp(const TransformedDenominator& td, const SdpConfig& cfg) {
  StabilitySdp p;
  p.td = td;
  p.coordinates = cfg.coordinates;
  if (cfg.coordinates == SdpCoordinates::kDenominator) {
    p.A = td.original.A;
    p.B = td.original.B;
    p.x = td.x_opt;
  } else {
    p.A = td.A_t;
    p.B = td.B_t;
    p.x = td.xbar;
  }
  const Index n = p.A.rows();
  if (n == 0 || p.B.size() != n || p.x.size() != n) throw ValidationError("build_stability_sdp: bad dimensions");
  p.delta_pd = p.delta_lmi = cfg.margin_scale * std::max(1.0, p.A.norm());
  p.gain_bound = cfg.gain_bound;
  p.y_bound = cfg.y_bound_scale * std::max(1.0, p.A.norm());
  p.settings = cfg.solver;

  const Index m = p.num_vars();
  const Index ig = p.g_index(), ir = p.r_index();
  const int ni = static_cast<int>(n);
  lmi::Problem& prob = p.problem;
  prob.c = VectorXd::Zero(m);
  prob.c(ir) = 1.0;

  lmi::Block b0;
  b0.constant = -p.delta_pd * MatrixXd::Identity(n, n);
  b0.dictionary = MatrixXd::Identity(n, n);
  b0.terms.resize(m);

  lmi::Block b1;
  b1.constant = -p.delta_lmi * MatrixXd::Identity(n, n);
  b1.dictionary.resize(n, 2 * n + 1);
  b1.dictionary << MatrixXd::Identity(n, n), p.A, p.B;
  b1.terms.resize(m);

  lmi::Block b2;
  b2.constant = MatrixXd::Zero(n + 1, n + 1);
  b2.constant.block(1, 0, n, 1) = p.B;
  b2.constant.block(0, 1, 1, n) = p.B.transpose();
  b2.dictionary = MatrixXd::Identity(n + 1, n + 1);
  b2.terms.resize(m);

  for (Index a = 0; a < n; ++a) {
    for (Index b = a; b < n; ++b) {
      auto& t0 = b0.terms[p.y_index(a, b)];
      auto& t1 = b1.terms[p.y_index(a, b)];
      auto& t2 = b2.terms[p.y_index(a, b)];
      const int ia = static_cast<int>(a), ib = static_cast<int>(b);
      if (a == b) {
        t0.push_back({ia, ia, 0.5});
        t1.push_back({ni + ia, ia, -1.0});
        t2.push_back({1 + ia, 1 + ia, 0.5});
        t2.push_back({1 + ia, 0, -p.x(a)});
      } else {
        t0.push_back({ia, ib, 1.0});
        t1.push_back({ni + ia, ib, -1.0});
        t1.push_back({ni + ib, ia, -1.0});
        t2.push_back({1 + ia, 1 + ib, 1.0});
        t2.push_back({1 + ia, 0, -p.x(b)});
        t2.push_back({1 + ib, 0, -p.x(a)});
      }
    }
  }
  b1.terms[ig].push_back({2 * ni, 2 * ni, 1.0});
  b2.terms[ir].push_back({0, 0, 0.5});

  lmi::Block b3;
  b3.constant = p.gain_bound * MatrixXd::Identity(2, 2);
  b3.dictionary = MatrixXd::Identity(2, 2);
  b3.terms.resize(m);
  b3.terms[ig].push_back({0, 0, -0.5});
  b3.terms[ig].push_back({1, 1, 0.5});

  prob.blocks = {std::move(b0), std::move(b1), std::move(b2), std::move(b3)};
  if (p.y_bound > 0.0) {
    lmi::Block b4;
    b4.constant = p.y_bound * MatrixXd::Identity(n, n);
    b4.dictionary = MatrixXd::Identity(n, n);
    b4.terms = prob.blocks[0].terms;
    for (auto& list : b4.terms) {
      for (auto& t : list) t.coef = -t.coef;
    }
    prob.blocks.push_back(std::move(b4));
  }
  return p;
}

MatrixXd SdpSolution::Q() const {
  Eigen::LLT<MatrixXd> llt(Y);
  if (llt.info() != Eigen::Success) throw NumericalError("SdpSolution::Q: Y is not positive definite");
  return llt.solve(MatrixXd::Identity(Y.rows(), Y.cols()));
}

SdpSolution solve_sdp(const StabilitySdp& p) {
  const Index n = p.dim();
  SdpSolution sol;
  sol.coordinates = p.coordinates;
  if (has_uncontrollable_unstable_mode(p.A, p.B)) {
    sol.status = lmi::Status::kInfeasible;
    sol.Y = sol.Y_solver = MatrixXd::Zero(n, n);
    return sol;
  }
  const lmi::Result res = lmi::solve(p.problem, p.settings);
  sol.status = res.status;
  sol.duality_gap = res.gap;
  sol.rel_gap = res.rel_gap;
  sol.iterations = res.iterations;
  sol.g = res.y(p.g_index());
  sol.r = res.y(p.r_index());
  sol.Y_solver.resize(n, n);
  for (Index a = 0; a < n; ++a) {
    for (Index b = a; b < n; ++b) sol.Y_solver(a, b) = sol.Y_solver(b, a) = res.y(p.y_index(a, b));
  }
  if (p.coordinates == SdpCoordinates::kTransformed) {
    sol.Y = sol.Y_solver;
  } else {
    // Y_t = T^{-1} Y T^{-T} with T^{-1} = Sigma^{-1} V^T.
    const MatrixXd Tinv = p.td.sigma.cwiseInverse().asDiagonal() * p.td.V.transpose();
    sol.Y = Tinv * sol.Y_solver * Tinv.transpose();
    sol.Y = 0.5 * (sol.Y + sol.Y.transpose());
  }
  return sol;
}

std::vector<cplx> recover_weights(const SdpSolution& sol, const StabilitySdp& p) {
  if (!lmi::has_solution(sol.status)) {
    throw ValidationError(std::string("recover_weights: SDP status is ") + lmi::to_string(sol.status));
  }
  const Index n = p.dim();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sol.Y_solver, Eigen::EigenvaluesOnly);
  const double emin = es.eigenvalues()(0), emax = es.eigenvalues()(n - 1);
  if (!(emin > 0.0) || emax / emin > 1e12) {
    throw ConditioningError("recover_weights: Y is near-singular", emin > 0.0 ? emin / emax : 0.0);
  }
  Eigen::LLT<MatrixXd> llt(sol.Y_solver);
  VectorXd c = llt.solve(p.B);
  if (p.coordinates == SdpCoordinates::kTransformed) {
    // C = C_t T^{-1} = C_t Sigma^{-1} V^T.
    c = p.td.V * (p.td.sigma.cwiseInverse().asDiagonal() * c);
  }
  std::vector<cplx> w(static_cast<std::size_t>(n / 2));
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = cplx(c(2 * i), c(2 * i + 1));
  return w;
}

CertificateCheck check_certificate(const StabilitySdp& p, const SdpSolution& sol) {
  CertificateCheck chk;
  const MatrixXd& Y = sol.Y_solver;
  const Index n = p.dim();
  chk.y_min_eig = sym_eig_min(Y);
  const MatrixXd R = p.A * Y + Y * p.A.transpose() - 2.0 * sol.g * p.B * p.B.transpose();
  chk.lyapunov_max_eig = sym_eig_max(R);
  if (!(chk.y_min_eig > 0.0)) return chk;
  Eigen::LLT<MatrixXd> llt(Y);
  const MatrixXd Q = llt.solve(MatrixXd::Identity(n, n));
  const VectorXd QB = Q * p.B;
  chk.kyp_max_eig = sym_eig_max(Q * p.A + p.A.transpose() * Q - 2.0 * sol.g * QB * QB.transpose());
  // Same inertia as the KYP matrix, without forming Q explicitly.
  MatrixXd S = R;
  llt.matrixL().solveInPlace(S);
  llt.matrixL().solveInPlace(S.transpose());
  chk.kyp_congruent_max_eig = sym_eig_max(S);
  const VectorXd v = p.B - Y * p.x;
  chk.schur_gap = sol.r - v.dot(llt.solve(v));
  chk.passed = chk.y_min_eig >= p.delta_pd / 2 && chk.lyapunov_max_eig <= -p.delta_lmi / 2 &&
               chk.kyp_congruent_max_eig < 0.0;
  return chk;
}

}  // namespace stabaaa
