#pragma once

#include <Eigen/Dense>
#include <vector>

#include "stabaaa/barycentric.hpp"
#include "stabaaa/dataset.hpp"

namespace stabaaa {

/// Samples H(j*f) at angular frequencies f; f may be negative (conjugate points).
struct SampleSet {
  std::vector<double> freqs;
  std::vector<cplx> values;
};

/// Loewner and shifted Loewner matrices for left points j*mu_i and right points j*eta_l:
///   L(i,l)  = (V_i - W_l) / (j mu_i - j eta_l)
///   Ls(i,l) = (j mu_i V_i - j eta_l W_l) / (j mu_i - j eta_l)
struct LoewnerPair {
  Eigen::MatrixXcd L;
  Eigen::MatrixXcd Ls;
  std::vector<double> left_pts;
  std::vector<double> right_pts;
  Eigen::VectorXcd V;     // left values
  Eigen::RowVectorXcd W;  // right values
};

/// Throws ValidationError when a left point coincides with a right point.
LoewnerPair loewner_pair(const SampleSet& left, const SampleSet& right);

struct LoewnerRom {
  DescriptorRealization realization;  // E = -L_r, A = -Ls_r, B = V_r, C = W_r
  Eigen::Index order = 0;
  bool degenerate = false;            // rank(L) = 0 at the truncation tolerance
  Eigen::VectorXd singular_values;    // of [L, Ls]
};

/// Raw model (E, A, B, C) = (-L, -Ls, V, W), projected onto the dominant
/// subspaces of [L, Ls] and [L; Ls]; singular values above rank_tol * sigma_1
/// are kept. Throws DegenerateDataError when none survive.
LoewnerRom loewner_rom(const LoewnerPair& pair, double rank_tol = 1e-12);

struct LoewnerFitOptions {
  double rank_tol = 1e-12;
  bool include_conjugates = true;  // add (-f, h*) to both partitions
};

/// Alternating odd/even partition of the dataset into right/left points.
LoewnerRom loewner_fit(const FrequencyDataset& ds, const LoewnerFitOptions& opts = {});

/// Real quasi-Loewner matrix of the linearized AAA least-squares problem,
/// 2(V - l) x 2l, rows [Re E(j zeta_l); Im E(j zeta_l)], columns [a_1, b_1, ...].
struct RealQuasiLoewner {
  Eigen::MatrixXd matrix;
  std::vector<double> support_freqs;
  std::vector<cplx> support_values;
  std::vector<double> test_freqs;
  std::vector<cplx> test_values;
};

/// Throws ValidationError when a support frequency equals a test frequency.
RealQuasiLoewner real_quasi_loewner(const SampleSet& support, const SampleSet& test);

}  // namespace stabaaa
