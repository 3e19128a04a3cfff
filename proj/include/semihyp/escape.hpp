#pragma once

// Escape function G and positivity of H_q G for quadratic Hamiltonians.

#include "semihyp/symplectic.hpp"

#include <cstdint>

namespace semihyp {

/// G(X, Xi) = 1/2 log((1 + |X_hyp|^2) / (1 + |Xi_hyp|^2)) + (i/2)(|X_ell|^2 - |Xi_ell|^2).
/// Hyperbolic coordinates come first, elliptic ones last.
struct EscapeFunction {
  Eigen::Index dim_hyp = 0;
  Eigen::Index dim_ell = 0;

  Eigen::Index half_dim() const { return dim_hyp + dim_ell; }
  cplx operator()(const Vec& X, const Vec& Xi) const;
  /// Closed-form gradients (dG/dX, dG/dXi).
  std::pair<CVec, CVec> gradient(const Vec& X, const Vec& Xi) const;
};

cplx eval_escape(const EscapeFunction& ef, const Vec& X, const Vec& Xi);

/// H_q G = <d_Xi q, d_X G> - <d_X q, d_Xi G>.
cplx hamiltonian_action(const QuadraticForm& q, const EscapeFunction& ef, const Vec& X, const Vec& Xi);
cplx hamiltonian_action(const QuadraticHamiltonian& q, const EscapeFunction& ef, const Vec& X, const Vec& Xi);

/// The part of q acting on the hyperbolic modes of a classification, as a
/// bilinear form xi^T C x on those modes only.
QuadraticForm hyperbolic_part(const SpectralClassification& cls);

struct PositivityOptions {
  int samples = 100000;
  double radius = 10.0;
  double sweep_max = 1e3;  // log-spaced radial sweep from `radius` out to here
  int sweep_points = 200;
  std::uint64_t seed = 1;
};

struct PositivityReport {
  double min_ratio = 0.0;
  Vec argmin_point;  // (X, Xi) in the adapted coordinates
  int samples = 0;
  double radius = 0.0;
  /// Symplectic change x -> P x, xi -> P^{-T} xi making the symmetric part of C positive.
  Mat coord_change;
  double adapted_symmetric_min = 0.0;  // smallest eigenvalue of sym(P C P^{-1})
  bool adapted = false;
};

/// Samples H_q G / (|X|^2/(1+|X|^2) + |Xi|^2/(1+|Xi|^2)) for a bilinear
/// hyperbolic q after moving to coordinates in which the symmetric part of
/// its coefficient matrix is positive-definite.
PositivityReport verify_positivity(const QuadraticForm& q, const PositivityOptions& opts = {});

struct EscapeNormalForm {
  Mat M;
  Mat Mprime;
  std::vector<double> r;  // ascending
  Mat coord_change;       // symplectic permutation sorting the modes by r
  double min_eig_M = 0.0;
  double min_eig_Mprime = 0.0;
  std::vector<double> rates;  // lambda_j in the sorted order, r_j = lambda_j^{-1/2}
  QuadraticForm q;
};

/// Normal form for q = sum lambda_j x_j xi_j with lambda_j > 0.
EscapeNormalForm diagonal_normal_form(const QuadraticForm& q);

/// |H_q G - (sum r_j^-2 x_j^2 / (1 + |M x|^2) + sum r_j^-2 xi_j^2 / (1 + |M' xi|^2))|
/// at a point (x, xi) given in the sorted coordinates.
double normal_form_residual(const EscapeNormalForm& nf, const Vec& x, const Vec& xi);

}  // namespace semihyp
