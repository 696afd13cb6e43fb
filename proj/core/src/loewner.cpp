#include "stabaaa/loewner.hpp"

#include <Eigen/SVD>
#include <algorithm>

#include "stabaaa/errors.hpp"

namespace stabaaa {

namespace {

constexpr cplx kJ(0.0, 1.0);

void check_sizes(const SampleSet& s, const char* what) {
  if (s.freqs.size() != s.values.size()) throw ValidationError(std::string(what) + ": size mismatch");
}

}  // namespace

LoewnerPair loewner_pair(const SampleSet& left, const SampleSet& right) {
  check_sizes(left, "loewner_pair(left)");
  check_sizes(right, "loewner_pair(right)");
  const auto nl = static_cast<Eigen::Index>(left.freqs.size());
  const auto nr = static_cast<Eigen::Index>(right.freqs.size());
  LoewnerPair p;
  p.left_pts = left.freqs;
  p.right_pts = right.freqs;
  p.V = Eigen::Map<const Eigen::VectorXcd>(left.values.data(), nl);
  p.W = Eigen::Map<const Eigen::RowVectorXcd>(right.values.data(), nr);
  p.L.resize(nl, nr);
  p.Ls.resize(nl, nr);
  for (Eigen::Index i = 0; i < nl; ++i) {
    const cplx mu = kJ * left.freqs[i];
    for (Eigen::Index l = 0; l < nr; ++l) {
      if (left.freqs[i] == right.freqs[l]) {
        throw ValidationError("loewner_pair: left and right points coincide at " +
                              std::to_string(left.freqs[i]));
      }
      const cplx eta = kJ * right.freqs[l];
      const cplx diff = mu - eta;
      p.L(i, l) = (p.V(i) - p.W(l)) / diff;
      p.Ls(i, l) = (mu * p.V(i) - eta * p.W(l)) / diff;
    }
  }
  return p;
}

LoewnerRom loewner_rom(const LoewnerPair& pair, double rank_tol) {
  const Eigen::Index nl = pair.L.rows(), nr = pair.L.cols();
  if (nl != nr) throw ValidationError("loewner_rom: left and right sets must have equal size");
  if (nl == 0) throw ValidationError("loewner_rom: empty Loewner pair");

  Eigen::MatrixXcd row(nl, 2 * nr);
  row << pair.L, pair.Ls;
  Eigen::MatrixXcd col(2 * nl, nr);
  col << pair.L, pair.Ls;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd_row(row, Eigen::ComputeThinU);
  Eigen::BDCSVD<Eigen::MatrixXcd> svd_col(col, Eigen::ComputeThinV);

  LoewnerRom rom;
  rom.singular_values = svd_row.singularValues();
  const double s1 = rom.singular_values.size() ? rom.singular_values(0) : 0.0;
  if (!(s1 > 0.0)) throw DegenerateDataError("loewner_rom: Loewner matrices vanish");

  const Eigen::VectorXd& sc = svd_col.singularValues();
  Eigen::Index r_row = 0, r_col = 0;
  while (r_row < rom.singular_values.size() && rom.singular_values(r_row) > rank_tol * s1) ++r_row;
  while (r_col < sc.size() && sc(r_col) > rank_tol * sc(0)) ++r_col;
  const Eigen::Index r = std::min(r_row, r_col);
  if (r == 0) throw DegenerateDataError("loewner_rom: all singular values below tolerance");

  const double l1 = Eigen::JacobiSVD<Eigen::MatrixXcd>(pair.L).singularValues()(0);
  rom.degenerate = !(l1 > rank_tol * s1);

  const Eigen::MatrixXcd Yr = svd_row.matrixU().leftCols(r);
  const Eigen::MatrixXcd Xr = svd_col.matrixV().leftCols(r);
  rom.realization.E = -(Yr.adjoint() * pair.L * Xr);
  rom.realization.A = -(Yr.adjoint() * pair.Ls * Xr);
  rom.realization.B = Yr.adjoint() * pair.V;
  rom.realization.C = pair.W * Xr;
  rom.realization.kind = FieldKind::kComplex;
  rom.order = r;
  return rom;
}

LoewnerRom loewner_fit(const FrequencyDataset& ds, const LoewnerFitOptions& opts) {
  if (ds.size() < 2) throw ValidationError("loewner_fit: need at least 2 samples");
  SampleSet left, right;
  for (std::size_t v = 0; v < ds.size(); ++v) {
    SampleSet& dst = (v % 2 == 0) ? right : left;
    dst.freqs.push_back(ds.freqs()[v]);
    dst.values.push_back(ds.values()[v]);
    if (opts.include_conjugates) {
      dst.freqs.push_back(-ds.freqs()[v]);
      dst.values.push_back(std::conj(ds.values()[v]));
    }
  }
  // Equal partition sizes: drop the trailing right point of an odd-length dataset.
  while (right.freqs.size() > left.freqs.size()) {
    right.freqs.pop_back();
    right.values.pop_back();
  }
  return loewner_rom(loewner_pair(left, right), opts.rank_tol);
}

RealQuasiLoewner real_quasi_loewner(const SampleSet& support, const SampleSet& test) {
  check_sizes(support, "real_quasi_loewner(support)");
  check_sizes(test, "real_quasi_loewner(test)");
  const auto ell = static_cast<Eigen::Index>(support.freqs.size());
  const auto nt = static_cast<Eigen::Index>(test.freqs.size());
  RealQuasiLoewner q;
  q.support_freqs = support.freqs;
  q.support_values = support.values;
  q.test_freqs = test.freqs;
  q.test_values = test.values;
  q.matrix.resize(2 * nt, 2 * ell);

  for (Eigen::Index l = 0; l < nt; ++l) {
    const double zeta = test.freqs[l];
    const double reH = test.values[l].real(), imH = test.values[l].imag();
    for (Eigen::Index i = 0; i < ell; ++i) {
      const double lam = support.freqs[i];
      if (lam == zeta) {
        throw ValidationError("real_quasi_loewner: support and test sets share frequency " +
                              std::to_string(lam));
      }
      const double reh = support.values[i].real(), imh = support.values[i].imag();
      const double dm = zeta - lam;
      const double dp = zeta + lam;
      const double dre = reH - reh;
      q.matrix(l, 2 * i) = (imH - imh) / dm + (imH + imh) / dp;
      q.matrix(l, 2 * i + 1) = dre / dm - dre / dp;
      q.matrix(l + nt, 2 * i) = -dre / dm - dre / dp;
      q.matrix(l + nt, 2 * i + 1) = (imH - imh) / dm - (imH + imh) / dp;
    }
  }
  return q;
}

}  // namespace stabaaa
