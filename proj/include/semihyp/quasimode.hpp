#pragma once

// Hermite quasimodes of the elliptic model, eigenvalue ladders z_{k,beta},
// the perturbation series in z with a Borel-type resummation, and residuals
// of (h D_t + Q - z) on a product grid in (t, x).

#include "semihyp/weyl.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace semihyp {

/// Normalized Hermite functions psi_k(y) = (2^k k! sqrt(pi))^{-1/2} H_k(y) e^{-y^2/2}.
Vec hermite_function(int k, const Vec& y);

struct HermiteMode {
  std::vector<int> beta;
  double h = 0.0;
  PhaseGrid grid;
  /// One transverse dimension: values(i) at x_i. Two: values(i * N + j) at (x_i, x_j).
  CVec values;

  double norm() const;
};

/// v_beta(x) = h^{-(n-1)/4} prod psi_{beta_j}(x_j / sqrt(h)) for n - 1 <= 2.
HermiteMode hermite_mode(const std::vector<int>& beta, double h, const PhaseGrid& grid);
HermiteMode hermite_mode(int beta, double h, const PhaseGrid& grid);

/// Largest Hermite index the grid resolves at this h.
int hermite_capacity(double h, const PhaseGrid& grid);

struct LadderEntry {
  long k = 0;
  std::vector<int> beta;
  double z = 0.0;
  double residual = 0.0;
  std::vector<double> increments;  // z^{(j)}, perturbed ladders only
};

struct QuasimodeLadder {
  int m_exponent = 2;
  double c0 = 1.0;
  double h = 0.0;
  long k_max = 0;
  int beta_max = 0;
  std::vector<LadderEntry> entries;  // sorted by z
  long count = 0;
  int duplicates_removed = 0;
};

/// z = sum_j (alpha_j/2)(2 beta_j + 1) h + 2 pi k h over |z| <= c0 h^{1/m},
/// h (2 beta_j + 1) <= h^{1/m}, and 2 pi |k| h <= 2 c0 h^{1/m}.
QuasimodeLadder exact_model_ladder(const std::vector<double>& alphas, double h, int m_exponent, double c0);

/// Spectral data of the normal form:
/// zeta_beta(z) = sum_j lambda_j(z) I_j + sum_{l >= 1} h^l q_l(z, I), I = h (2 beta + 1).
struct PerturbationModel {
  std::vector<std::function<double(double)>> lambdas;
  std::vector<std::function<double(double, const std::vector<double>&)>> corrections;

  double zeta(double z, const std::vector<double>& I, double h) const;
};

/// Solves 2 z - zeta_beta(z) = 4 pi k h by the iteration 2 z_j = 4 pi k h + zeta_beta(z_{j-1}),
/// z_{-1} = 0, with increments z^{(j)} = z_j - z_{j-1} for j <= order.
QuasimodeLadder perturbed_ladder(const PerturbationModel& model, double h, int m_exponent, double c0, int order);

struct CountingFit {
  std::vector<double> h;
  std::vector<long> count;
  std::vector<double> exponents;  // log N(h) / log(1/h) per point
  double slope = 0.0;             // least-squares slope of log N against log(1/h)
};

CountingFit counting_slope(const std::vector<double>& alphas, const std::vector<double>& hs, int m_exponent,
                           double c0);

/// chi = 1 on [0, 1], 1 - g(x - 1) on (1, 2), 0 beyond.
double borel_cutoff(double x);

struct BorelCertificate {
  double h = 0.0;
  int order = 0;          // N
  double resummed = 0.0;  // sum_j chi(lambda_j h) z^{(j)}
  double truncated = 0.0;  // sum_{j <= m N} z^{(j)}
  double bound = 0.0;     // C_N h^N
  double C_N = 0.0;
  bool holds = false;
};

struct BorelResult {
  std::vector<double> lambdas;
  std::vector<BorelCertificate> certificates;
  bool all_hold = true;
};

/// Series z^{(j)}(h) = C_j h^{(j+1)/m} with the given envelope (C_j = 0 past
/// the list). The default schedule is lambda_j = max(2^{j+1} C_j, j + 1),
/// made strictly increasing; a user schedule must be strictly increasing
/// and dominate 2^{j+1} C_j.
BorelResult borel_resum(const std::vector<double>& envelope, const std::vector<double>& h_grid, int m_exponent,
                        const std::vector<int>& orders = {1, 2, 3},
                        const std::optional<std::vector<double>>& schedule = std::nullopt);

/// ||(h D_t + Op((alpha/2)(x^2 + xi^2)) - z) u|| for u = e^{2 pi i k t} v_beta
/// on the grid t in [0, 1) with nt points times the transverse grid.
double residual_certify(long k, const std::vector<int>& beta, double z, const std::vector<double>& alphas, double h,
                        const PhaseGrid& grid, int nt = 32);

}  // namespace semihyp
