#pragma once

// Model monodromy operators: the hyperbolic model p = tau + lambda x xi in
// rescaled variables, its conjugation by exp(s G^w), and the elliptic model
// exp(-i (Q - z) / h) with Q the quantized (alpha/2)(x^2 + xi^2).

#include "semihyp/weyl.hpp"

#include <vector>

namespace semihyp {

struct ModelParams {
  double lambda = 1.0;
  double alpha = 1.0;
  double h = 0.01;
  double hbar_tilde = 0.2;
  double s = 0.3;
  double L = 12.0;
  int N = 1024;

  /// 0 < h < hbar_tilde <= 1 (h == hbar_tilde allowed), |s| <= 1/2.
  void validate(bool allow_equal = true) const;
  PhaseGrid rescaled_grid() const { return PhaseGrid(L, N, hbar_tilde); }
};

/// (T u)(X) = (h/hbar_tilde)^{1/4} u((h/hbar_tilde)^{1/2} X), sampled on `to`.
/// Exact rescaling when `to` is the dilation of `from`; trigonometric
/// interpolation otherwise.
CVec rescale_state(const CVec& u, const PhaseGrid& from, double h, double hbar_tilde, const PhaseGrid& to);

double unitarity_defect(const CMat& M);

struct HyperbolicMonodromy {
  CMat M;
  double unitarity_defect = 0.0;
};

/// M = exp(-(i/h) Q1) with Q1 = Op_hbar_tilde(lambda (h/hbar_tilde) X Xi).
HyperbolicMonodromy build_hyperbolic_monodromy(const ModelParams& p);

/// Re G = 1/2 log((1 + X^2) / (1 + Xi^2)) quantized on the rescaled grid.
WeylOperator escape_weight(const PhaseGrid& grid);

struct ContractionOptions {
  double cutoff_width = 1.0;      // Gaussian cutoff width in rescaled units
  double cutoff_threshold = 0.5;  // relative singular-value cut for the microlocal subspace
  double gap_width = 0.2;         // w0 in the h-dependent gap cutoff w0 (hbar_tilde / h)^{1/2}
};

struct MonodromyResult {
  double h = 0.0;
  double hbar_tilde = 0.0;
  double s = 0.0;
  double norm_conjugated = 0.0;          // r = ||e^{-sG} M e^{sG} U||_2
  double norm_inverse_conjugated = 0.0;  // ||(e^{-sG} M e^{sG})^{-1} U||_2
  double conjugated_numerical_min = 0.0;  // min Re<(I - M~) u, u> / |u|^2 on the subspace
  double gap = 0.0;                      // min Re<(I - M) u, u> / |u|^2 on the h-scaled subspace
  double unitarity_defect = 0.0;
  Eigen::Index subspace_dim = 0;
  Eigen::Index gap_subspace_dim = 0;
};

/// Caches M and the weight for fixed (lambda, hbar_tilde, grid). M depends on
/// h only through lambda (h/hbar_tilde) / h, so an h-sweep reuses it.
class HyperbolicModel {
 public:
  HyperbolicModel(const ModelParams& p, const ContractionOptions& opts = {});

  const CMat& monodromy() const { return M_; }
  double unitarity_defect() const { return defect_; }
  const PhaseGrid& grid() const { return grid_; }

  /// Conjugated contraction at weight s (no gap; M does not depend on h).
  MonodromyResult contraction(double s) const;
  /// Conjugated contraction and gap at the given h and s.
  MonodromyResult evaluate(double h, double s) const;
  /// min Re<(I - M) u, u> over the unit sphere of the h-scaled microlocal subspace.
  double gap(double h, Eigen::Index* dim = nullptr) const;

 private:
  ModelParams params_;
  ContractionOptions opts_;
  PhaseGrid grid_;
  CMat M_;
  double defect_;
  WeylOperator G_;
  CMat U_;  // fixed microlocal subspace for the contraction norm
};

MonodromyResult conjugated_contraction(const ModelParams& p, const ContractionOptions& opts = {});

struct GapFit {
  std::vector<double> h;
  std::vector<double> gap;
  double C = 0.0;  // gap >= C^{-1} h^N fitted as log gap = -log C + N log h
  double N = 0.0;
};

/// Least-squares fit of log gap against log h.
GapFit fit_gap(const std::vector<double>& h, const std::vector<double>& gap);

/// M(z) = exp(-i (Q - z) / h), Q = Op_h((alpha/2)(x^2 + xi^2)) on `grid` (grid.hbar = h).
CMat build_elliptic_monodromy(double alpha, double z, const PhaseGrid& grid);

}  // namespace semihyp
