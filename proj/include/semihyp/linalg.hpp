#pragma once

// Dense linear-algebra helpers shared by every module: matrix types, the
// standard symplectic form, and a checked matrix exponential.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>

namespace semihyp {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// J = [[0, -I], [I, 0]] of size 2m x 2m.
Mat standard_form(Eigen::Index dim);

/// Frobenius norm of K^T J K - J.
double symplectic_defect(const Mat& K);

/// Residual of B^T J + J B (zero for Hamiltonian matrices).
double hamiltonian_defect(const Mat& B);

/// exp(A); refuses non-finite input and overflow.
Mat expm(const Mat& A);
CMat expm(const CMat& A);

/// Induced 1-norm (max column sum).
template <typename Derived>
double norm1(const Eigen::MatrixBase<Derived>& A) {
  return A.cwiseAbs().colwise().sum().maxCoeff();
}

/// Largest singular value.
double norm2(const Mat& A);
double norm2(const CMat& A);

/// Symmetric S -> Hamiltonian matrix -J S of the quadratic form z^T S z / 2.
Mat hamiltonian_matrix(const Mat& S);

/// Random element of sp(2m): -J S with S symmetric, entries uniform in [-1, 1].
Mat random_hamiltonian(Eigen::Index m, std::mt19937_64& rng);

/// exp(random_hamiltonian), an exactly-constructed random symplectic matrix.
Mat random_symplectic(Eigen::Index m, std::mt19937_64& rng);

}  // namespace semihyp
