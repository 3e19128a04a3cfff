#include "semihyp/linalg.hpp"

#include "semihyp/error.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace semihyp {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::NotSymplectic: return "not-symplectic";
    case ErrorKind::ClassificationAmbiguous: return "classification-ambiguous";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::GridInadequate: return "grid-inadequate";
    case ErrorKind::NumericFailure: return "numeric-failure";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

Mat standard_form(Eigen::Index dim) {
  if (dim <= 0 || dim % 2 != 0) fail(ErrorKind::InvalidInput, "symplectic dimension must be even and positive");
  const Eigen::Index m = dim / 2;
  Mat J = Mat::Zero(dim, dim);
  J.topRightCorner(m, m) = -Mat::Identity(m, m);
  J.bottomLeftCorner(m, m) = Mat::Identity(m, m);
  return J;
}

double symplectic_defect(const Mat& K) {
  const Mat J = standard_form(K.rows());
  return (K.transpose() * J * K - J).norm();
}

double hamiltonian_defect(const Mat& B) {
  const Mat J = standard_form(B.rows());
  return (B.transpose() * J + J * B).norm();
}

namespace {

template <typename MatT>
MatT expm_impl(const MatT& A) {
  if (A.rows() != A.cols()) fail(ErrorKind::InvalidInput, "expm: matrix must be square");
  if (A.rows() == 0) return A;
  if (!A.allFinite()) fail(ErrorKind::NumericFailure, "expm: non-finite input");
  MatT R = A.exp();
  if (!R.allFinite())
    fail(ErrorKind::NumericFailure, "expm: overflow (1-norm " + std::to_string(norm1(A)) + ")");
  return R;
}

}  // namespace

Mat expm(const Mat& A) { return expm_impl(A); }
CMat expm(const CMat& A) { return expm_impl(A); }

double norm2(const Mat& A) {
  if (A.size() == 0) return 0.0;
  return Eigen::JacobiSVD<Mat>(A).singularValues()(0);
}

double norm2(const CMat& A) {
  if (A.size() == 0) return 0.0;
  if (A.rows() > 64 || A.cols() > 64) return Eigen::BDCSVD<CMat>(A).singularValues()(0);
  return Eigen::JacobiSVD<CMat>(A).singularValues()(0);
}

Mat hamiltonian_matrix(const Mat& S) { return -standard_form(S.rows()) * S; }

Mat random_hamiltonian(Eigen::Index m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const Eigen::Index n = 2 * m;
  Mat S(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) S(i, j) = S(j, i) = unif(rng);
  return hamiltonian_matrix(S);
}

Mat random_symplectic(Eigen::Index m, std::mt19937_64& rng) { return expm(random_hamiltonian(m, rng)); }

}  // namespace semihyp
