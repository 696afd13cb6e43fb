#include "stabaaa/pencil.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <optional>

#include "stabaaa/errors.hpp"

namespace stabaaa {

namespace {

using cd = std::complex<double>;

void drop_huge(PencilSpectrum& spec) {
  if (spec.finite.empty()) return;
  std::vector<double> mags;
  mags.reserve(spec.finite.size());
  for (const cd& z : spec.finite) mags.push_back(std::abs(z));
  auto mid = mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2);
  std::nth_element(mags.begin(), mid, mags.end());
  const double median = *mid;
  if (median == 0.0) return;
  const auto before = spec.finite.size();
  std::erase_if(spec.finite, [&](const cd& z) { return std::abs(z) > 1e12 * median; });
  spec.infinite_count += static_cast<int>(before - spec.finite.size());
}

std::vector<cd> standard_eigenvalues(const Eigen::MatrixXd& M) {
  std::vector<cd> out;
  if (M.rows() == 0) return out;
  if (!M.allFinite()) throw NumericalError("eigenvalues: non-finite matrix entries");
  Eigen::EigenSolver<Eigen::MatrixXd> es(M, false);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigenvalues: real Schur iteration did not converge (n = " +
                         std::to_string(M.rows()) + ")");
  }
  const auto& ev = es.eigenvalues();
  out.assign(ev.data(), ev.data() + ev.size());
  return out;
}

std::vector<cd> standard_eigenvalues(const Eigen::MatrixXcd& M) {
  std::vector<cd> out;
  if (M.rows() == 0) return out;
  if (!M.allFinite()) throw NumericalError("eigenvalues: non-finite matrix entries");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eigenvalues: complex Schur iteration did not converge (n = " +
                         std::to_string(M.rows()) + ")");
  }
  const auto& ev = es.eigenvalues();
  out.assign(ev.data(), ev.data() + ev.size());
  return out;
}

// Finite spectrum of (A, diag(I_n, 0)) with a single algebraic row. Empty when
// neither the index-1 nor the index-2 reduction applies.
template <class Matrix>
std::optional<PencilSpectrum> bordered_spectrum(const Matrix& A) {
  using Scalar = typename Matrix::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
  const Eigen::Index n = A.rows() - 1;
  if (n == 0) return PencilSpectrum{{}, 1};

  const Matrix A11 = A.topLeftCorner(n, n);
  const Vector a12 = A.topRightCorner(n, 1);
  const RowVector a21 = A.bottomLeftCorner(1, n);
  const Scalar a22 = A(n, n);
  const double scale = std::max(A.norm(), 1e-300);

  PencilSpectrum spec;
  if (std::abs(a22) > 1e-14 * scale) {
    spec.finite = standard_eigenvalues(Matrix(A11 - a12 * a21 / a22));
    spec.infinite_count = 1;
  } else {
    const Scalar c = (a21 * a12)(0, 0);
    if (std::abs(c) <= 1e-13 * a21.norm() * a12.norm() || c == Scalar(0)) return std::nullopt;
    // Orthonormal basis of ker(a21): trailing columns of the Householder Q of a21^H.
    Eigen::HouseholderQR<Matrix> qr(Matrix(a21.adjoint()));
    const Matrix Q = qr.householderQ() * Matrix::Identity(n, n);
    const Matrix N = Q.rightCols(n - 1);
    const Matrix A11N = A11 * N;
    const Matrix PA = A11N - a12 * (a21 * A11N) / c;
    spec.finite = standard_eigenvalues(Matrix(N.adjoint() * PA));
    spec.infinite_count = 2;
  }
  drop_huge(spec);
  return spec;
}

bool is_bordered_identity(const Eigen::MatrixXcd& E) {
  const Eigen::Index n = E.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (E(i, j) != cd(i == j && i < n - 1 ? 1.0 : 0.0)) return false;
    }
  }
  return n > 0;
}

}  // namespace

PencilSpectrum bordered_pencil_spectrum(const Eigen::MatrixXd& A) {
  if (A.rows() == 0 || A.cols() != A.rows()) throw ValidationError("pencil: matrix must be square and non-empty");
  if (auto spec = bordered_spectrum(A)) return *spec;
  Eigen::MatrixXd E = Eigen::MatrixXd::Identity(A.rows(), A.rows());
  E(A.rows() - 1, A.rows() - 1) = 0.0;
  return qz_spectrum(A, E);
}

PencilSpectrum qz_spectrum(const Eigen::MatrixXd& A, const Eigen::MatrixXd& E) {
  if (A.rows() != A.cols() || E.rows() != A.rows() || E.cols() != A.cols()) {
    throw ValidationError("pencil: shape mismatch");
  }
  PencilSpectrum spec;
  if (A.rows() == 0) return spec;
  if (!A.allFinite() || !E.allFinite()) throw NumericalError("QZ: non-finite pencil entries");
  Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges(A, E, false);
  if (ges.info() != Eigen::Success) {
    throw NumericalError("QZ: iteration did not converge (n = " + std::to_string(A.rows()) + ")");
  }
  const double tol = 1e-12 * std::max(A.norm(), E.norm());
  const auto alphas = ges.alphas();
  const auto betas = ges.betas();
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    if (std::abs(betas(i)) < tol) {
      ++spec.infinite_count;
    } else {
      spec.finite.push_back(alphas(i) / betas(i));
    }
  }
  drop_huge(spec);
  return spec;
}

PencilSpectrum complex_pencil_spectrum(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& E) {
  if (A.rows() != A.cols() || E.rows() != A.rows() || E.cols() != A.cols()) {
    throw ValidationError("pencil: shape mismatch");
  }
  PencilSpectrum spec;
  const Eigen::Index n = A.rows();
  if (n == 0) return spec;
  if (!A.allFinite() || !E.allFinite()) throw NumericalError("pencil: non-finite entries");
  if (is_bordered_identity(E)) {
    if (auto structured = bordered_spectrum(A)) return *structured;
  }
  const double scale = A.norm() / std::max(E.norm(), 1e-300);
  const cd shifts[] = {cd(0.3183, 0.1931), cd(-0.7071, 0.5772), cd(1.4142, -0.8660), cd(0.0, 2.7183)};
  for (const cd& unit_shift : shifts) {
    const cd sigma = unit_shift * std::max(scale, 1e-300);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A - sigma * E);
    if (!(lu.rcond() > 1e-10)) continue;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(lu.solve(E), false);
    if (es.info() != Eigen::Success) throw NumericalError("pencil: complex Schur iteration did not converge");
    const auto& mu = es.eigenvalues();
    const double tol = 1e-12 * mu.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(mu(i)) <= tol) {
        ++spec.infinite_count;
      } else {
        spec.finite.push_back(sigma + 1.0 / mu(i));
      }
    }
    drop_huge(spec);
    return spec;
  }
  throw NumericalError("pencil: singular for every trial shift");
}

}  // namespace stabaaa
