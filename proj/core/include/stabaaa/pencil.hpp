#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace stabaaa {

struct PencilSpectrum {
  std::vector<std::complex<double>> finite;
  int infinite_count = 0;
};

/// Finite generalized eigenvalues of (A, diag(I_n, 0)), where A is (n+1)x(n+1)
/// and only the last row/column is algebraic.
///
/// With A = [[A11, a12], [a21, a22]]: a22 != 0 gives the Schur complement
/// A11 - a12 a21 / a22; a22 = 0 and a21 a12 != 0 gives the index-2 case, handled
/// by restricting A11 to ker(a21) along a12 (a standard eigenproblem of size
/// n-1). Anything else falls back to qz_spectrum().
PencilSpectrum bordered_pencil_spectrum(const Eigen::MatrixXd& A);

/// Generalized eigenvalues of (A, E) by real QZ. An eigenvalue is infinite when
/// |beta| < 1e-12 * max(||A||, ||E||), or when its magnitude exceeds 1e12 times
/// the median finite magnitude.
PencilSpectrum qz_spectrum(const Eigen::MatrixXd& A, const Eigen::MatrixXd& E);

/// Generalized eigenvalues of a complex pencil (A, E) by shift-and-invert:
/// lambda = sigma + 1/mu for the eigenvalues mu of (A - sigma E)^{-1} E.
/// |mu| <= 1e-12 max |mu| counts as an infinite eigenvalue. E = diag(I_n, 0)
/// takes the bordered reductions instead, so index-2 infinite eigenvalues are
/// not perturbed into large finite ones.
PencilSpectrum complex_pencil_spectrum(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& E);

}  // namespace stabaaa
