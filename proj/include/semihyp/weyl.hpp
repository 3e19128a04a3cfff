#pragma once

// Discrete Weyl quantization on a periodic position grid with its Fourier
// dual, plus dense exponentials, eigenvalues and a Gaussian microlocal cutoff.

#include "semihyp/linalg.hpp"

#include <functional>
#include <numbers>
#include <optional>
#include <string>

namespace semihyp {

/// x_k = -L + 2 L k / N, xi_j = pi hbar (j - N/2) / L.
struct PhaseGrid {
  double L = 12.0;
  int N = 1024;
  double hbar = 0.2;

  PhaseGrid() = default;
  PhaseGrid(double L, int N, double hbar);

  double x(int k) const { return -L + 2.0 * L * k / N; }
  double xi(int j) const { return std::numbers::pi * hbar * (j - N / 2) / L; }
  double dx() const { return 2.0 * L / N; }
  double xi_max() const { return std::numbers::pi * hbar * (N / 2) / L; }
  Vec positions() const;
  Vec frequencies() const;
};

using Symbol = std::function<cplx(double x, double xi)>;
using RealSymbol = std::function<double(double x, double xi)>;

struct WeylOperator {
  PhaseGrid grid;
  CMat matrix;
  std::string symbol_tag;
  bool real_symbol = false;

  double hermitian_defect() const;
};

struct QuantizeOptions {
  /// If set, require xi_max >= 4 * momentum_support.
  std::optional<double> momentum_support;
};

/// K_ij = (1/N) sum_k a((x_i + x_j)/2, xi_k) exp(2 pi i (i - j)(k - N/2) / N),
/// one FFT per midpoint index i + j.
WeylOperator quantize(const Symbol& a, const PhaseGrid& grid, std::string tag = "", const QuantizeOptions& opts = {});
WeylOperator quantize(const RealSymbol& a, const PhaseGrid& grid, std::string tag = "",
                      const QuantizeOptions& opts = {});

/// exp(t A) by scaling and squaring.
CMat op_exponential(const CMat& A, cplx t);
CMat op_exponential(const WeylOperator& A, cplx t);

/// Smallest eigenvalue of a Hermitian operator; refuses non-Hermitian input.
double min_eigenvalue(const WeylOperator& A, double hermitian_tol = 1e-8);
/// All eigenvalues, ascending.
Vec eigenvalues(const WeylOperator& A, double hermitian_tol = 1e-8);

/// Pi = exp(-x^2 / 2w^2) . Op(exp(-xi^2 / 2w^2)).
CMat microlocal_cutoff(const PhaseGrid& grid, double width);

/// Orthonormal basis of the dominant range of the cutoff: left singular
/// vectors of Pi with singular value >= threshold * sigma_max.
CMat microlocal_subspace(const PhaseGrid& grid, double width, double threshold);

/// Writes `matrix` as row-major complex128 to `path` and a JSON sidecar to `path + ".json"`.
void export_operator(const WeylOperator& A, const std::string& path);

}  // namespace semihyp
