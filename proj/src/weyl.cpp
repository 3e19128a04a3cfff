#include "semihyp/weyl.hpp"

#include "semihyp/error.hpp"

#include <json.hpp>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <fstream>
#include <sstream>

namespace semihyp {

PhaseGrid::PhaseGrid(double L_, int N_, double hbar_) : L(L_), N(N_), hbar(hbar_) {
  if (!(L > 0.0)) fail(ErrorKind::InvalidInput, "PhaseGrid: L must be positive");
  if (N < 2 || (N & (N - 1)) != 0) fail(ErrorKind::InvalidInput, "PhaseGrid: N must be a power of two");
  if (!(hbar > 0.0)) fail(ErrorKind::InvalidInput, "PhaseGrid: hbar must be positive");
}

Vec PhaseGrid::positions() const {
  Vec v(N);
  for (int k = 0; k < N; ++k) v(k) = x(k);
  return v;
}

Vec PhaseGrid::frequencies() const {
  Vec v(N);
  for (int j = 0; j < N; ++j) v(j) = xi(j);
  return v;
}

double WeylOperator::hermitian_defect() const { return (matrix - matrix.adjoint()).norm(); }

namespace {

void check_grid(const PhaseGrid& g, const QuantizeOptions& opts) {
  PhaseGrid(g.L, g.N, g.hbar);  // validates
  if (opts.momentum_support) {
    const double need = 4.0 * *opts.momentum_support;
    if (g.xi_max() < need) {
      // xi_max scales linearly with N.
      int n_req = g.N;
      while (std::numbers::pi * g.hbar * (n_req / 2) / g.L < need) n_req *= 2;
      std::ostringstream msg;
      msg << "quantize: Nyquist violation, xi_max = " << g.xi_max() << " < 4 * support = " << need
          << "; need N >= " << n_req;
      fail(ErrorKind::GridInadequate, msg.str());
    }
  }
}

}  // namespace

WeylOperator quantize(const Symbol& a, const PhaseGrid& grid, std::string tag, const QuantizeOptions& opts) {
  check_grid(grid, opts);
  const int N = grid.N;
  const Vec xi = grid.frequencies();
  Eigen::FFT<double> fft;
  std::vector<cplx> samples(N), spectrum(N);
  WeylOperator out{grid, CMat(N, N), std::move(tag), false};
  for (int s = 0; s <= 2 * N - 2; ++s) {
    const double xm = -grid.L + grid.L * s / N;
    for (int k = 0; k < N; ++k) {
      samples[k] = a(xm, xi(k));
      if (!std::isfinite(samples[k].real()) || !std::isfinite(samples[k].imag())) {
        std::ostringstream msg;
        msg << "quantize: symbol is not finite at (" << xm << ", " << xi(k) << ")";
        fail(ErrorKind::InvalidInput, msg.str());
      }
    }
    // sum_k a_k e^{2 pi i d k / N} = N * inverse DFT; the k - N/2 shift contributes (-1)^d.
    fft.inv(spectrum, samples);
    const int ilo = std::max(0, s - (N - 1));
    const int ihi = std::min(s, N - 1);
    for (int i = ilo; i <= ihi; ++i) {
      const int j = s - i;
      const int d = ((i - j) % N + N) % N;
      out.matrix(i, j) = (d % 2 == 0 ? 1.0 : -1.0) * spectrum[d];
    }
  }
  return out;
}

WeylOperator quantize(const RealSymbol& a, const PhaseGrid& grid, std::string tag, const QuantizeOptions& opts) {
  WeylOperator out = quantize(Symbol([&a](double x, double xi) { return cplx(a(x, xi), 0.0); }), grid,
                              std::move(tag), opts);
  out.real_symbol = true;
  return out;
}

CMat op_exponential(const CMat& A, cplx t) {
  const CMat tA = t * A;
  const double nrm = norm1(tA);
  if (!std::isfinite(nrm)) fail(ErrorKind::NumericFailure, "op_exponential: non-finite ||tA||");
  try {
    return expm(tA);
  } catch (const Error& e) {
    std::ostringstream msg;
    msg << "op_exponential: refused, ||tA||_1 = " << nrm << " (" << e.what() << ")";
    fail(ErrorKind::NumericFailure, msg.str());
  }
}

CMat op_exponential(const WeylOperator& A, cplx t) { return op_exponential(A.matrix, t); }

namespace {

void require_hermitian(const WeylOperator& A, double tol) {
  const double defect = A.hermitian_defect();
  if (defect > tol * std::max(1.0, A.matrix.norm())) {
    std::ostringstream msg;
    msg << "operator is not Hermitian: ||A - A*||_F = " << defect;
    fail(ErrorKind::InvalidInput, msg.str());
  }
}

}  // namespace

Vec eigenvalues(const WeylOperator& A, double hermitian_tol) {
  require_hermitian(A, hermitian_tol);
  const CMat H = 0.5 * (A.matrix + A.matrix.adjoint());
  const Eigen::SelfAdjointEigenSolver<CMat> es(H, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) fail(ErrorKind::NumericFailure, "eigenvalues: eigensolver failed");
  return es.eigenvalues();
}

double min_eigenvalue(const WeylOperator& A, double hermitian_tol) { return eigenvalues(A, hermitian_tol)(0); }

CMat microlocal_cutoff(const PhaseGrid& grid, double width) {
  if (!(width > 0.0)) fail(ErrorKind::InvalidInput, "microlocal_cutoff: width must be positive");
  const double w2 = 2.0 * width * width;
  const WeylOperator fourier =
      quantize(RealSymbol([w2](double, double xi) { return std::exp(-xi * xi / w2); }), grid, "cutoff-xi");
  Vec env(grid.N);
  for (int k = 0; k < grid.N; ++k) env(k) = std::exp(-grid.x(k) * grid.x(k) / w2);
  return env.cast<cplx>().asDiagonal() * fourier.matrix;
}

CMat microlocal_subspace(const PhaseGrid& grid, double width, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) fail(ErrorKind::InvalidInput, "microlocal_subspace: threshold must be in (0, 1]");
  const CMat Pi = microlocal_cutoff(grid, width);
  // Pi Pi^* is real symmetric for the even Gaussian symbols; use the real solver.
  const CMat G = Pi * Pi.adjoint();
  if (G.imag().norm() > 1e-10 * G.norm()) fail(ErrorKind::NumericFailure, "microlocal_subspace: cutoff Gram matrix is not real");
  Mat R = G.real();
  R = 0.5 * (R + R.transpose()).eval();
  const Eigen::SelfAdjointEigenSolver<Mat> es(R);
  if (es.info() != Eigen::Success) fail(ErrorKind::NumericFailure, "microlocal_subspace: eigensolver failed");
  const Vec& ev = es.eigenvalues();
  const double top = ev(ev.size() - 1);
  const double cut = threshold * threshold * top;
  Eigen::Index keep = 0;
  for (Eigen::Index i = ev.size() - 1; i >= 0 && ev(i) >= cut; --i) ++keep;
  return es.eigenvectors().rightCols(keep).cast<cplx>();
}

void export_operator(const WeylOperator& A, const std::string& path) {
  std::ofstream bin(path, std::ios::binary);
  if (!bin) fail(ErrorKind::InvalidInput, "export_operator: cannot open " + path);
  const Eigen::Index n = A.matrix.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < A.matrix.cols(); ++j) {
      const cplx v = A.matrix(i, j);
      const double parts[2] = {v.real(), v.imag()};
      bin.write(reinterpret_cast<const char*>(parts), sizeof(parts));
    }
  nlohmann::json side{{"L", A.grid.L}, {"N", A.grid.N}, {"hbar", A.grid.hbar}, {"symbol_tag", A.symbol_tag},
                      {"dtype", "complex128"}, {"order", "row-major"}};
  std::ofstream js(path + ".json");
  js << side.dump(2) << "\n";
}

}  // namespace semihyp
