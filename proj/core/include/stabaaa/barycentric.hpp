#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <vector>

#include "stabaaa/dataset.hpp"

namespace stabaaa {

/// Real-valued barycentric model
///
///   H(s) = sum_i [h_i w_i/(s - j l_i) + (h_i w_i)*/(s + j l_i)]
///        / sum_i [w_i/(s - j l_i) + w_i*/(s + j l_i)]
///
/// over k support frequencies l_i > 0. The conjugate partner -j l_i of every
/// support point is implicit, so H(s*) = H(s)* holds by construction. An
/// order-0 model is the real constant c0.
class BarycentricModel {
 public:
  BarycentricModel() = default;
  /// Throws ValidationError on size mismatch or non-positive / repeated support.
  BarycentricModel(std::vector<double> support, std::vector<cplx> values, std::vector<cplx> weights);

  static BarycentricModel constant(double c0);

  std::size_t order() const { return support_.size(); }
  const std::vector<double>& support() const { return support_; }
  const std::vector<cplx>& values() const { return values_; }
  const std::vector<cplx>& weights() const { return weights_; }
  double constant_term() const { return c0_; }

  BarycentricModel with_weights(std::vector<cplx> weights) const;

  /// Weights with |w_i| above 1e-14 * ||w||; only those support points interpolate.
  std::vector<bool> active_support() const;

  /// Real weight vector [a_1, b_1, ..., a_k, b_k].
  Eigen::VectorXd weight_vector() const;

  cplx operator()(cplx s) const;

 private:
  std::vector<double> support_;
  std::vector<cplx> values_;
  std::vector<cplx> weights_;
  double c0_ = 0.0;
};

/// Builds a model from the real vector [a_1, b_1, ..., a_k, b_k].
BarycentricModel make_model(std::vector<double> support, std::vector<cplx> values,
                            const Eigen::VectorXd& x);

/// N(s)/D(s). Returns the stored h_i (or h_i*) at s = +-j l_i when w_i is active.
/// Throws DomainError when D(s) vanishes.
cplx evaluate(const BarycentricModel& m, cplx s);

/// D(s). Throws DomainError at a support point.
cplx evaluate_denominator(const BarycentricModel& m, cplx s);

/// N(s). Throws DomainError at a support point.
cplx evaluate_numerator(const BarycentricModel& m, cplx s);

/// dD/ds. Throws DomainError at a support point.
cplx evaluate_denominator_derivative(const BarycentricModel& m, cplx s);

/// Evaluates at every j*lambda of the dataset.
std::vector<cplx> evaluate_on(const BarycentricModel& m, const FrequencyDataset& ds);

/// H(infinity) = sum Re(h_i w_i) / sum Re(w_i).
double feedthrough(const BarycentricModel& m);

enum class FieldKind { kComplex, kReal };

/// Descriptor system (E, A, B, C) with transfer function C (sE - A)^{-1} B.
struct DescriptorRealization {
  Eigen::MatrixXcd E;
  Eigen::MatrixXcd A;
  Eigen::VectorXcd B;
  Eigen::RowVectorXcd C;
  FieldKind kind = FieldKind::kComplex;

  Eigen::Index size() const { return A.rows(); }
  cplx transfer(cplx s) const;
};

/// All-real descriptor system; imaginary parts are never materialized.
struct RealDescriptorRealization {
  Eigen::MatrixXd E;
  Eigen::MatrixXd A;
  Eigen::VectorXd B;
  Eigen::RowVectorXd C;
  FieldKind kind = FieldKind::kReal;

  Eigen::Index size() const { return A.rows(); }
  cplx transfer(cplx s) const;
};

/// A = Lambda - B R with Lambda = diag(j l_1, -j l_1, ..., 1), B = [w_1, w_1*, ..., 1],
/// C = [h_1, h_1*, ..., 0], R = ones, E = diag(1, ..., 1, 0). Requires k >= 1.
DescriptorRealization build_descriptor_realization(const BarycentricModel& m);

/// Unit input map variant: B = ones, R = [w_1, w_1*, ..., 1], C = [h_1 w_1, (h_1 w_1)*, ..., 0].
DescriptorRealization build_unit_input_realization(const BarycentricModel& m);

/// Real form: B = sqrt2 [Re w_1, Im w_1, ..., 1], C = sqrt2 [Re h_1, -Im h_1, ..., 0],
/// R = [sqrt2, 0, ..., 1], Lambda = blkdiag(l_i [[0,-1],[1,0]], 1), A = Lambda - B R.
RealDescriptorRealization build_real_realization(const BarycentricModel& m);

struct PoleSet {
  std::vector<cplx> finite_poles;
  int infinite_count = 0;
  std::vector<cplx> residues;  // parallel to finite_poles when filled
  double feedthrough = 0.0;
};

/// Finite poles from the pencil (A, E) of the real realization.
PoleSet poles(const BarycentricModel& m);

/// Zeros of D(s) from the pencil ([[A, B], [C, 0]], diag(I, 0)) of the
/// denominator realization.
std::vector<cplx> denominator_zeros(const BarycentricModel& m);

/// Poles with residues r_i = N(p_i) / D'(p_i) and the constant term H(infinity).
/// `clustered` is set when two poles are closer than 1e-8 * max |p|.
PoleSet pole_residue(const BarycentricModel& m, bool* clustered = nullptr);

/// sum_i r_i / (s - p_i) + d.
cplx evaluate_pole_residue(const PoleSet& ps, cplx s);

}  // namespace stabaaa
