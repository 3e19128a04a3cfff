#pragma once

// Symplectic linear algebra for linearized Poincare maps: polar factors,
// logarithms, the normal-form classification dS = exp(-JF) exp(B), and the
// quadratic Hamiltonians generating each factor.

#include "semihyp/linalg.hpp"

#include <optional>
#include <string>
#include <vector>

namespace semihyp {

inline constexpr double kSymplecticTol = 1e-10;

/// A real 2m x 2m matrix K with K^T J K = J up to a certified defect.
class SymplecticMatrix {
 public:
  /// Throws NotSymplectic when the defect exceeds `tol`.
  explicit SymplecticMatrix(Mat entries, double tol = kSymplecticTol);

  static SymplecticMatrix identity(Eigen::Index dim);

  const Mat& matrix() const { return entries_; }
  Eigen::Index dim() const { return entries_.rows(); }
  Eigen::Index half_dim() const { return entries_.rows() / 2; }
  double defect() const { return defect_; }
  Mat J() const { return standard_form(dim()); }

  /// K^{-1} = -J K^T J, exact for symplectic K.
  Mat inverse() const;

 private:
  Mat entries_;
  double defect_;
};

struct PolarFactors {
  SymplecticMatrix Q;  // orthogonal
  SymplecticMatrix P;  // symmetric positive-definite
  double condition;    // sigma_max / sigma_min of K
  int iterations;
};

/// K = Q P by scaled Newton iteration on X <- (z X + X^{-T} / z) / 2.
PolarFactors polar_decompose(const SymplecticMatrix& K);

struct SymplecticLog {
  Mat B;                           // Hamiltonian and symmetric
  std::vector<double> logs;        // log mu for the m eigenvalues mu >= 1
  std::vector<double> inverse_logs;  // log of the partner 1/mu, stored as -log mu
  double eigenbasis_condition;
};

/// Logarithm of a symmetric positive-definite symplectic matrix.
SymplecticLog symplectic_log(const SymplecticMatrix& A);

enum class BlockKind { ComplexHyperbolic, RealPositive, RealNegative, Elliptic };
const char* to_string(BlockKind kind);

/// One Jordan block of the linearized map, with its chosen logarithm and
/// the partner branches fixed by lambda(1/mu) = -lambda(mu) and
/// lambda(conj mu) = conj lambda(mu).
struct SpectralBlock {
  BlockKind kind;
  cplx mu;           // representative: |mu| > 1 (Im mu > 0 for complex), or Im mu > 0 on the circle
  int multiplicity;  // Jordan block size k_j
  cplx lambda;       // log mu, or log(-mu) for real-negative blocks
  cplx mu_inverse;
  cplx lambda_inverse;  // == -lambda
  cplx lambda_conjugate;  // == conj(lambda)
  int krein_sign = 1;  // elliptic only: F_j = krein_sign * Im lambda
};

struct SpectralClassification {
  int n_hc = 0;
  int n_hr_plus = 0;
  int n_hr_minus = 0;
  int n_e = 0;
  std::vector<SpectralBlock> blocks;
  /// Normal-form factors in the constructed basis: basis^{-1} dS basis = exp(-JF) exp(B).
  Mat B;
  Mat F;
  /// Symplectic change of basis, columns ordered (x-block | xi-block) with
  /// complex-hyperbolic, real-positive, real-negative, elliptic modes in turn.
  Mat basis;
  Mat dS;
  double reconstruction_error = 0.0;  // ||exp(-JF) exp(B) - basis^{-1} dS basis|| / ||dS||
  double basis_condition = 0.0;

  /// Mode ranges (in half-dimension units) of each kind in the constructed basis.
  struct ModeRange {
    Eigen::Index begin = 0;
    Eigen::Index size = 0;
  };
  ModeRange hc_modes, hr_plus_modes, hr_minus_modes, elliptic_modes;

  Eigen::Index dim() const { return dS.rows(); }
  /// 4 sum_hc k + 2 sum_hr+ k + 2 sum_hr- k + 2 n_e.
  Eigen::Index dimension_count() const;
};

struct ClassifyOptions {
  double tol_unit = 1e-6;
  double ambiguous_factor = 10.0;
  double cluster_gap = 1e-6;
};

/// Throws ClassificationAmbiguous for eigenvalues in the band
/// tol_unit < ||mu| - 1| < ambiguous_factor * tol_unit or unit eigenvalues at
/// +-1, and Unsupported for repeated elliptic eigenvalues.
SpectralClassification classify_spectrum(const SymplecticMatrix& dS, const ClassifyOptions& opts = {});

struct ResonanceVerdict {
  enum class Kind { Independent, Resonant, Undecided } kind;
  std::vector<int> witness;  // sum c_j alpha_j in pi Z
  double closest_distance;   // min |sum c_j alpha_j / pi - nearest integer| over the scan
};
const char* to_string(ResonanceVerdict::Kind kind);

/// Exhaustive scan for integer relations sum c_j alpha_j in pi Z with
/// 0 < max |c_j| <= bound.
ResonanceVerdict nonresonance_check(const std::vector<double>& alphas, int denominator_bound,
                                    double resonance_tol = 1e-10, double undecided_tol = 1e-6);

/// Quadratic form q(z) = z^T S z / 2 on R^{2m} in coordinates z = (x, xi).
class QuadraticForm {
 public:
  QuadraticForm() = default;
  explicit QuadraticForm(Mat S);

  const Mat& S() const { return S_; }
  Eigen::Index dim() const { return S_.rows(); }
  Eigen::Index half_dim() const { return S_.rows() / 2; }

  double operator()(const Vec& x, const Vec& xi) const;
  /// Hamiltonian vector field matrix -J S: d/dt (x, xi) = (dq/dxi, -dq/dx).
  Mat hamiltonian_matrix() const;
  /// Bilinear coefficients C with q = xi^T C x, if the xx and xi-xi blocks vanish.
  std::optional<Mat> bilinear_coefficients(double tol = 1e-12) const;

 private:
  Mat S_;
};

/// The three quadratic Hamiltonians attached to a classification: q with
/// exp(H_q) = exp(B), q1 with exp(H_q1) = exp(-JF), and the artificial
/// hyperbolic q_ah = sum over elliptic modes of 2 x_j xi_j.
struct QuadraticHamiltonian {
  Eigen::Index dim = 0;
  QuadraticForm q;
  QuadraticForm q1;
  QuadraticForm q_ah;
  Mat hyp_coeffs;                 // C with q = xi^T C x
  std::vector<double> ell_coeffs;  // coefficient of (x_j^2 + xi_j^2) in q1, per mode
  std::vector<double> ah_coeffs;   // coefficient of x_j xi_j in q_ah, per mode

  double evaluate(const Vec& x, const Vec& xi) const { return q(x, xi); }
};

QuadraticHamiltonian build_quadratic_hamiltonian(const SpectralClassification& cls);

/// Hyperbolic normal-form description used to build q directly.
struct HyperbolicBlockSpec {
  BlockKind kind;
  cplx lambda;  // Re lambda > 0; complex only for ComplexHyperbolic
  int multiplicity = 1;
  double coupling = 1.0;  // strength of the nilpotent x_{l+1} xi_l terms
};

/// q = xi^T C x realizing the hyperbolic normal-form sums for the given blocks.
QuadraticForm hyperbolic_normal_form(const std::vector<HyperbolicBlockSpec>& blocks);

/// Normal-form matrices exp(B) for the same block list (x-block C, xi-block -C^T).
Mat normal_form_generator(const std::vector<HyperbolicBlockSpec>& blocks);

}  // namespace semihyp
