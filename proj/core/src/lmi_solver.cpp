#include "stabaaa/lmi_solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "stabaaa/errors.hpp"

namespace stabaaa::lmi {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Diagonal shift and pivot drop tolerance for the Jacobi-scaled Schur matrix.
constexpr double kSchurShift = 1e-14;
constexpr double kSchurDropTol = 1e-14;

struct FlatTerm {
  Index var;
  int a;
  int b;
  double coef;
};

// Terms of one block grouped by variable; only variables present in the block are listed.
struct FlatBlock {
  std::vector<Index> vars;
  std::vector<std::size_t> begin;  // begin[k]..begin[k+1] are the terms of vars[k]
  std::vector<FlatTerm> terms;
};

FlatBlock flatten(const Block& blk) {
  FlatBlock fb;
  for (Index i = 0; i < static_cast<Index>(blk.terms.size()); ++i) {
    if (blk.terms[i].empty()) continue;
    fb.vars.push_back(i);
    fb.begin.push_back(fb.terms.size());
    for (const LowRankTerm& t : blk.terms[i]) fb.terms.push_back({i, t.a, t.b, t.coef});
  }
  fb.begin.push_back(fb.terms.size());
  return fb;
}

// <F_i, K> for every variable, accumulated into out.
void accumulate_inner(const Block& blk, const FlatBlock& fb, const MatrixXd& K, VectorXd& out) {
  if (fb.terms.empty()) return;
  const MatrixXd GK = blk.dictionary.transpose() * K * blk.dictionary;
  for (const FlatTerm& t : fb.terms) out(t.var) += 2.0 * t.coef * GK(t.a, t.b);
}

// sum_i y_i F_i for one block.
MatrixXd apply_adjoint(const Block& blk, const FlatBlock& fb, const VectorXd& y) {
  const Index q = blk.dictionary.cols();
  MatrixXd Cq = MatrixXd::Zero(q, q);
  for (const FlatTerm& t : fb.terms) Cq(t.a, t.b) += y(t.var) * t.coef;
  const MatrixXd K = blk.dictionary * Cq * blk.dictionary.transpose();
  return K + K.transpose();
}

MatrixXd sym(const MatrixXd& A) { return 0.5 * (A + A.transpose()); }

// Largest alpha with L L^T + alpha * D >= 0, where L is the Cholesky factor.
double max_step(const MatrixXd& L, const MatrixXd& D) {
  const MatrixXd T1 = L.triangularView<Eigen::Lower>().solve(D);
  const MatrixXd T = L.triangularView<Eigen::Lower>().solve(T1.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym(T), Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

struct Scaling {
  MatrixXd LX;  // chol(X)
  MatrixXd V;   // right singular vectors of LZ^T LX
  VectorXd d;   // NT-scaled point
  MatrixXd G;   // W = G G^T
  MatrixXd W;
};

bool nt_scaling(const MatrixXd& X, const MatrixXd& Z, Scaling& s) {
  Eigen::LLT<MatrixXd> cx(X), cz(Z);
  if (cx.info() != Eigen::Success || cz.info() != Eigen::Success) return false;
  s.LX = cx.matrixL();
  const MatrixXd LZ = cz.matrixL();
  Eigen::BDCSVD<MatrixXd> svd(LZ.transpose() * s.LX, Eigen::ComputeFullU | Eigen::ComputeFullV);
  s.d = svd.singularValues();
  if (!(s.d.minCoeff() > 0.0)) return false;
  s.V = svd.matrixV();
  s.G = s.LX * s.V * s.d.cwiseSqrt().cwiseInverse().asDiagonal();
  s.W = s.G * s.G.transpose();
  return true;
}

double frob_inner(const MatrixXd& A, const MatrixXd& B) { return (A.array() * B.array()).sum(); }

// Blocked in-place Cholesky of the lower triangle. Pivots at or below tol times
// the original diagonal entry are replaced by a huge value, which drops the
// corresponding direction from the solution. Returns the number of replaced pivots.
int cholesky_drop_tiny(MatrixXd& M, double tol) {
  constexpr Index kBlock = 64;
  constexpr double kHuge = 1e64;
  const Index n = M.rows();
  const VectorXd diag = M.diagonal();
  int dropped = 0;
  for (Index k = 0; k < n; k += kBlock) {
    const Index bs = std::min(kBlock, n - k);
    for (Index j = k; j < k + bs; ++j) {
      double d = M(j, j) - M.row(j).segment(k, j - k).squaredNorm();
      if (!(d > tol * diag(j))) {
        d = kHuge * kHuge;
        ++dropped;
      }
      const double ljj = std::sqrt(d);
      M(j, j) = ljj;
      const Index below = k + bs - j - 1;
      if (below > 0) {
        M.col(j).segment(j + 1, below) -=
            M.block(j + 1, k, below, j - k) * M.row(j).segment(k, j - k).transpose();
        M.col(j).segment(j + 1, below) /= ljj;
      }
    }
    const Index rest = n - k - bs;
    if (rest == 0) break;
    auto L11 = M.block(k, k, bs, bs).triangularView<Eigen::Lower>();
    auto A21 = M.block(k + bs, k, rest, bs);
    L11.transpose().solveInPlace<Eigen::OnTheRight>(A21);
    M.block(k + bs, k + bs, rest, rest).selfadjointView<Eigen::Lower>().rankUpdate(A21, -1.0);
  }
  return dropped;
}

}  // namespace

const char* to_string(Status s) {
  switch (s) {
    case Status::kOptimal:
      return "optimal";
    case Status::kNearOptimal:
      return "near_optimal";
    case Status::kMaxIterations:
      return "max_iters";
    case Status::kInfeasible:
      return "infeasible";
  }
  return "unknown";
}

void Problem::validate() const {
  const Index m = num_vars();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const Block& blk = blocks[b];
    const std::string where = "lmi block " + std::to_string(b) + ": ";
    if (blk.constant.rows() != blk.constant.cols()) throw ValidationError(where + "constant not square");
    if (blk.dictionary.rows() != blk.size()) throw ValidationError(where + "dictionary row count mismatch");
    if (static_cast<Index>(blk.terms.size()) != m) throw ValidationError(where + "term list size != num_vars");
    for (const auto& list : blk.terms) {
      for (const LowRankTerm& t : list) {
        if (t.a < 0 || t.b < 0 || t.a >= blk.dictionary.cols() || t.b >= blk.dictionary.cols()) {
          throw ValidationError(where + "dictionary index out of range");
        }
      }
    }
  }
}

MatrixXd coefficient_matrix(const Block& block, Index var) {
  MatrixXd F = MatrixXd::Zero(block.size(), block.size());
  for (const LowRankTerm& t : block.terms.at(var)) {
    const auto ua = block.dictionary.col(t.a);
    const auto ub = block.dictionary.col(t.b);
    F += t.coef * (ua * ub.transpose() + ub * ua.transpose());
  }
  return F;
}

MatrixXd assemble(const Block& block, const VectorXd& y) {
  return block.constant + apply_adjoint(block, flatten(block), y);
}

Result solve(const Problem& p, const Settings& settings) {
  p.validate();
  const Index m = p.num_vars();
  const std::size_t nb = p.blocks.size();
  std::vector<FlatBlock> flat(nb);
  for (std::size_t b = 0; b < nb; ++b) flat[b] = flatten(p.blocks[b]);

  double total_dim = 0.0, norm_f0 = 0.0;
  for (const Block& blk : p.blocks) {
    total_dim += static_cast<double>(blk.size());
    norm_f0 += blk.constant.squaredNorm();
  }
  norm_f0 = std::sqrt(norm_f0);
  const double norm_c = p.c.norm();

  // Infeasible start X = xi I, Z = eta I, y = 0.
  std::vector<MatrixXd> X(nb), Z(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    const Block& blk = p.blocks[b];
    const double n = static_cast<double>(blk.size());
    double max_fi = 0.0, xi_ratio = 0.0;
    for (Index i = 0; i < m; ++i) {
      if (blk.terms[i].empty()) continue;
      const double fn = coefficient_matrix(blk, i).norm();
      max_fi = std::max(max_fi, fn);
      xi_ratio = std::max(xi_ratio, (1.0 + std::abs(p.c(i))) / (1.0 + fn));
    }
    const double xi = std::max({10.0, std::sqrt(n), n * xi_ratio});
    const double eta = std::max({10.0, std::sqrt(n), blk.constant.norm(), max_fi});
    X[b] = xi * MatrixXd::Identity(blk.size(), blk.size());
    Z[b] = eta * MatrixXd::Identity(blk.size(), blk.size());
  }
  VectorXd y = VectorXd::Zero(m);

  Result res;
  std::vector<Scaling> sc(nb);
  std::vector<MatrixXd> Rd(nb);
  int stalls = 0;
  int last_progress = 0;  // last iteration that halved max(absolute gap, residual norms)
  double progress_merit = std::numeric_limits<double>::infinity();

  auto fill_result = [&](Status status, int iters) {
    res.status = status;
    res.y = y;
    res.S.resize(nb);
    for (std::size_t b = 0; b < nb; ++b) res.S[b] = assemble(p.blocks[b], y);
    res.X = X;
    res.iterations = iters;
    return res;
  };

  // Best iterate seen so far among those with small residuals, ranked by relative gap.
  Result best;
  bool have_best = false;
  auto record_best = [&](int iter) {
    if (res.primal_residual > settings.fallback_tol || res.dual_residual > settings.fallback_tol) return;
    if (have_best && res.rel_gap >= best.rel_gap) return;
    best = res;
    best.y = y;
    best.X = X;
    best.iterations = iter;
    have_best = true;
  };

  // Returned on numerical breakdown or when the iteration limit is reached.
  auto fallback = [&](const std::string& why, int iter) {
    if (have_best && best.rel_gap <= settings.fallback_tol) {
      best.status = Status::kNearOptimal;
      best.S.resize(nb);
      for (std::size_t b = 0; b < nb; ++b) best.S[b] = assemble(p.blocks[b], best.y);
      return best;
    }
    throw NumericalError("lmi: " + why + " at iteration " + std::to_string(iter) + " (rel gap " +
                         std::to_string(have_best ? best.rel_gap : res.rel_gap) + ")");
  };

  for (int iter = 0; iter <= settings.max_iter; ++iter) {
    // Residuals and measures.
    VectorXd FX = VectorXd::Zero(m);
    double f0x = 0.0, xz = 0.0, rd_norm = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      const Block& blk = p.blocks[b];
      accumulate_inner(blk, flat[b], X[b], FX);
      f0x += frob_inner(blk.constant, X[b]);
      xz += frob_inner(X[b], Z[b]);
      Rd[b] = blk.constant + apply_adjoint(blk, flat[b], y) - Z[b];
      rd_norm += Rd[b].squaredNorm();
    }
    const VectorXd Rp = FX - p.c;  // b - A(X) with b = -c, A_i = -F_i
    const double obj = p.c.dot(y);
    const double dobj = -f0x;
    const double mu = xz / total_dim;
    res.objective = obj;
    res.dual_objective = dobj;
    res.gap = xz;
    res.rel_gap = std::max(std::abs(obj - dobj), xz) / (1.0 + std::abs(obj) + std::abs(dobj));
    res.primal_residual = std::sqrt(rd_norm) / (1.0 + norm_f0);
    res.dual_residual = Rp.norm() / (1.0 + norm_c);
    if (settings.log) {
      *settings.log << "lmi " << iter << ": obj " << obj << " dobj " << dobj << " rel_gap " << res.rel_gap
                    << " pres " << res.primal_residual << " dres " << res.dual_residual << "\n";
    }

    if (res.rel_gap <= settings.gap_tol && res.primal_residual <= settings.feas_tol &&
        res.dual_residual <= settings.feas_tol) {
      return fill_result(Status::kOptimal, iter);
    }
    record_best(iter);
    const double merit =
        std::max({std::abs(obj - dobj), xz, res.primal_residual * (1.0 + norm_f0), res.dual_residual * (1.0 + norm_c)});
    if (merit < 0.5 * progress_merit) {
      progress_merit = merit;
      last_progress = iter;
    }
    if (f0x < 0.0 && FX.norm() <= settings.infeas_tol * -f0x) {
      return fill_result(Status::kInfeasible, iter);
    }
    if (iter == settings.max_iter) break;

    bool ok = true;
    for (std::size_t b = 0; b < nb && ok; ++b) ok = nt_scaling(X[b], Z[b], sc[b]);
    if (!ok) {
      return fallback("iterate lost positive definiteness", iter);
    }

    // Schur complement M_ij = <F_i, W F_j W>.
    MatrixXd M = MatrixXd::Zero(m, m);
    for (std::size_t b = 0; b < nb; ++b) {
      const FlatBlock& fb = flat[b];
      if (fb.terms.empty()) continue;
      const MatrixXd& U = p.blocks[b].dictionary;
      const MatrixXd Gw = U.transpose() * sc[b].W * U;
      const std::size_t nv = fb.vars.size();
      for (std::size_t ki = 0; ki < nv; ++ki) {
        const Index i = fb.vars[ki];
        for (std::size_t kj = ki; kj < nv; ++kj) {
          const Index j = fb.vars[kj];
          double acc = 0.0;
          for (std::size_t ti = fb.begin[ki]; ti < fb.begin[ki + 1]; ++ti) {
            const FlatTerm& s = fb.terms[ti];
            for (std::size_t tj = fb.begin[kj]; tj < fb.begin[kj + 1]; ++tj) {
              const FlatTerm& t = fb.terms[tj];
              acc += s.coef * t.coef * (Gw(s.a, t.a) * Gw(s.b, t.b) + Gw(s.a, t.b) * Gw(s.b, t.a));
            }
          }
          M(std::min(i, j), std::max(i, j)) += 2.0 * acc;
        }
      }
    }
    // Jacobi-scaled Schur system, factorized in place from its upper triangle.
    const VectorXd dscale = M.diagonal().cwiseMax(std::numeric_limits<double>::min()).cwiseSqrt().cwiseInverse();
    M.array().colwise() *= dscale.array();
    M.array().rowwise() *= dscale.transpose().array();
    M.triangularView<Eigen::StrictlyLower>() = M.transpose();
    M.diagonal().array() += kSchurShift;
    cholesky_drop_tiny(M, kSchurDropTol);
    if (!M.diagonal().allFinite()) return fallback("Schur complement factorization failed", iter);

    // Solves for (dX, dy, dZ) given the scaled complementarity right-hand side Rc.
    auto direction = [&](const std::vector<MatrixXd>& Rc, std::vector<MatrixXd>& dX, VectorXd& dy,
                         std::vector<MatrixXd>& dZ) -> bool {
      VectorXd rhs = Rp;
      for (std::size_t b = 0; b < nb; ++b) {
        accumulate_inner(p.blocks[b], flat[b], Rc[b] - sc[b].W * Rd[b] * sc[b].W, rhs);
      }
      VectorXd t = dscale.cwiseProduct(rhs);
      M.triangularView<Eigen::Lower>().solveInPlace(t);
      M.triangularView<Eigen::Lower>().transpose().solveInPlace(t);
      dy = dscale.cwiseProduct(t);
      if (!dy.allFinite()) return false;
      dX.resize(nb);
      dZ.resize(nb);
      for (std::size_t b = 0; b < nb; ++b) {
        dZ[b] = sym(Rd[b] + apply_adjoint(p.blocks[b], flat[b], dy));
        dX[b] = sym(Rc[b] - sc[b].W * dZ[b] * sc[b].W);
      }
      return true;
    };

    auto step_lengths = [&](const std::vector<MatrixXd>& dX, const std::vector<MatrixXd>& dZ, double& ap,
                            double& ad) {
      ap = std::numeric_limits<double>::infinity();
      ad = ap;
      for (std::size_t b = 0; b < nb; ++b) {
        ap = std::min(ap, max_step(sc[b].LX, dX[b]));
        Eigen::LLT<MatrixXd> cz(Z[b]);
        ad = std::min(ad, max_step(cz.matrixL(), dZ[b]));
      }
    };

    // Predictor (affine scaling): Rc = -X.
    std::vector<MatrixXd> Rc(nb), dX, dZ;
    VectorXd dy;
    for (std::size_t b = 0; b < nb; ++b) Rc[b] = -X[b];
    if (!direction(Rc, dX, dy, dZ)) return fallback("non-finite search direction", iter);
    double ap = 0.0, ad = 0.0;
    step_lengths(dX, dZ, ap, ad);
    ap = std::min(1.0, ap);
    ad = std::min(1.0, ad);
    double xz_aff = 0.0;
    for (std::size_t b = 0; b < nb; ++b) xz_aff += frob_inner(X[b] + ap * dX[b], Z[b] + ad * dZ[b]);
    const double mu_aff = xz_aff / total_dim;
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    // Corrector with second-order term in the NT-scaled space.
    for (std::size_t b = 0; b < nb; ++b) {
      const Scaling& s = sc[b];
      const Index n = s.d.size();
      const VectorXd sq = s.d.cwiseSqrt();
      const MatrixXd T1 = s.LX.triangularView<Eigen::Lower>().solve(dX[b]);
      const MatrixXd TX = s.LX.triangularView<Eigen::Lower>().solve(T1.transpose());
      const MatrixXd dXs = sq.asDiagonal() * (s.V.transpose() * TX * s.V) * sq.asDiagonal();
      const MatrixXd dZs = s.G.transpose() * dZ[b] * s.G;
      MatrixXd rhs = -0.5 * (dXs * dZs + dZs * dXs);
      for (Index i = 0; i < n; ++i) rhs(i, i) += sigma * mu - s.d(i) * s.d(i);
      MatrixXd Rh(n, n);
      for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) Rh(i, j) = 2.0 * rhs(i, j) / (s.d(i) + s.d(j));
      }
      Rc[b] = sym(s.G * sym(Rh) * s.G.transpose());
    }
    if (!direction(Rc, dX, dy, dZ)) return fallback("non-finite search direction", iter);
    step_lengths(dX, dZ, ap, ad);
    ap = std::min(1.0, settings.step_fraction * ap);
    ad = std::min(1.0, settings.step_fraction * ad);

    for (std::size_t b = 0; b < nb; ++b) {
      X[b] = sym(X[b] + ap * dX[b]);
      Z[b] = sym(Z[b] + ad * dZ[b]);
    }
    y += ad * dy;

    stalls = (ap < 1e-8 && ad < 1e-8) ? stalls + 1 : 0;
    if (stalls >= 3) return fallback("step length collapsed", iter + 1);
    if (have_best && iter - last_progress >= settings.stall_window) return fallback("progress stalled", iter);
  }
  if (have_best) {
    best.status = Status::kMaxIterations;
    best.S.resize(nb);
    for (std::size_t b = 0; b < nb; ++b) best.S[b] = assemble(p.blocks[b], best.y);
    return best;
  }
  return fill_result(Status::kMaxIterations, settings.max_iter);
}

void write_sdpa(std::ostream& out, const Problem& p) {
  p.validate();
  const auto old_precision = out.precision(17);
  out << p.num_vars() << "\n" << p.blocks.size() << "\n";
  for (std::size_t b = 0; b < p.blocks.size(); ++b) out << (b ? " " : "") << p.blocks[b].size();
  out << "\n";
  for (Index i = 0; i < p.num_vars(); ++i) out << (i ? " " : "") << p.c(i);
  out << "\n";
  auto dump = [&](Index mat, std::size_t b, const MatrixXd& F) {
    for (Index i = 0; i < F.rows(); ++i) {
      for (Index j = i; j < F.cols(); ++j) {
        if (F(i, j) != 0.0) out << mat << " " << b + 1 << " " << i + 1 << " " << j + 1 << " " << F(i, j) << "\n";
      }
    }
  };
  for (std::size_t b = 0; b < p.blocks.size(); ++b) dump(0, b, -p.blocks[b].constant);
  for (Index i = 0; i < p.num_vars(); ++i) {
    for (std::size_t b = 0; b < p.blocks.size(); ++b) {
      if (!p.blocks[b].terms[i].empty()) dump(i + 1, b, coefficient_matrix(p.blocks[b], i));
    }
  }
  out.precision(old_precision);
}

}  // namespace stabaaa::lmi
