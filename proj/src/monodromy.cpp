#include "semihyp/monodromy.hpp"

#include "semihyp/error.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>
#include <sstream>

namespace semihyp {

void ModelParams::validate(bool allow_equal) const {
  std::ostringstream msg;
  if (!(lambda >= 0.0)) msg << "lambda must be >= 0; ";
  if (!(h > 0.0)) msg << "h must be positive; ";
  if (!(hbar_tilde > 0.0 && hbar_tilde <= 1.0)) msg << "hbar_tilde must lie in (0, 1]; ";
  if (allow_equal ? !(h <= hbar_tilde) : !(h < hbar_tilde)) msg << "h must not exceed hbar_tilde; ";
  if (!(std::abs(s) <= 0.5)) msg << "|s| must be <= 1/2; ";
  if (!msg.str().empty()) fail(ErrorKind::InvalidInput, "model parameters: " + msg.str());
  PhaseGrid(L, N, hbar_tilde);
}

namespace {

/// Trigonometric interpolant of grid samples evaluated at y (zero outside the window).
CVec interpolate(const CVec& u, const PhaseGrid& g, const Vec& y) {
  const int N = g.N;
  CVec c(N);
  // c_n for n = -N/2 .. N/2 - 1 with u_k = sum_n c_n exp(i pi n (x_k + L) / L).
  for (int j = 0; j < N; ++j) {
    const int n = j - N / 2;
    cplx acc = 0.0;
    for (int k = 0; k < N; ++k) acc += u(k) * std::exp(cplx(0.0, -2.0 * std::numbers::pi * n * k / N));
    c(j) = acc / static_cast<double>(N);
  }
  CVec out = CVec::Zero(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) < -g.L || y(i) >= g.L) continue;
    const double theta = std::numbers::pi * (y(i) + g.L) / g.L;
    cplx acc = c(0) * std::cos(-N / 2 * theta);  // Nyquist mode taken as its real cosine
    for (int j = 1; j < N; ++j) acc += c(j) * std::exp(cplx(0.0, (j - N / 2) * theta));
    out(i) = acc;
  }
  return out;
}

double l2(const CVec& u, const PhaseGrid& g) { return std::sqrt(u.squaredNorm() * g.dx()); }

}  // namespace

CVec rescale_state(const CVec& u, const PhaseGrid& from, double h, double hbar_tilde, const PhaseGrid& to) {
  if (u.size() != from.N) fail(ErrorKind::InvalidInput, "rescale_state: state does not match the source grid");
  if (!(h > 0.0 && hbar_tilde > 0.0)) fail(ErrorKind::InvalidInput, "rescale_state: h and hbar_tilde must be positive");
  const double ratio = std::sqrt(h / hbar_tilde);
  const double amp = std::sqrt(ratio);
  if (to.N == from.N && std::abs(to.L * ratio - from.L) <= 1e-12 * from.L) return amp * u;

  // Aliasing guard: the top quarter of the spectrum must be empty before resampling.
  const double total = u.squaredNorm();
  Eigen::FFT<double> fft;
  std::vector<cplx> in(u.data(), u.data() + u.size()), spec;
  fft.fwd(spec, in);
  double high = 0.0;
  for (int j = 0; j < from.N; ++j) {
    const int n = j <= from.N / 2 ? j : from.N - j;
    if (n > 3 * from.N / 8) high += std::norm(spec[j]);
  }
  if (total > 0.0 && high / (from.N * total) > 1e-20)
    fail(ErrorKind::GridInadequate, "rescale_state: state has energy near the Nyquist frequency");
  const CVec mapped = amp * interpolate(u, from, ratio * to.positions());
  const double n_in = l2(u, from);
  const double n_out = l2(mapped, to);
  if (n_in > 0.0 && std::abs(n_out - n_in) > 1e-6 * n_in)
    fail(ErrorKind::GridInadequate, "rescale_state: target grid does not resolve the dilated state");
  return mapped;
}

double unitarity_defect(const CMat& M) {
  return (M.adjoint() * M - CMat::Identity(M.rows(), M.cols())).norm();
}

HyperbolicMonodromy build_hyperbolic_monodromy(const ModelParams& p) {
  p.validate();
  const PhaseGrid g = p.rescaled_grid();
  const double coeff = p.lambda * p.h / p.hbar_tilde;
  const WeylOperator Q1 =
      quantize(RealSymbol([coeff](double X, double Xi) { return coeff * X * Xi; }), g, "lambda (h/hbar~) X Xi");
  HyperbolicMonodromy out;
  out.M = op_exponential(Q1, cplx(0.0, -1.0 / p.h));
  out.unitarity_defect = unitarity_defect(out.M);
  return out;
}

WeylOperator escape_weight(const PhaseGrid& grid) {
  return quantize(RealSymbol([](double X, double Xi) { return 0.5 * (std::log1p(X * X) - std::log1p(Xi * Xi)); }),
                  grid, "Re G");
}

HyperbolicModel::HyperbolicModel(const ModelParams& p, const ContractionOptions& opts)
    : params_(p), opts_(opts), grid_(p.rescaled_grid()), defect_(0.0), G_(escape_weight(grid_)) {
  const HyperbolicMonodromy hm = build_hyperbolic_monodromy(p);
  M_ = hm.M;
  defect_ = hm.unitarity_defect;
  U_ = microlocal_subspace(grid_, opts_.cutoff_width, opts_.cutoff_threshold);
  if (U_.cols() == 0) fail(ErrorKind::GridInadequate, "HyperbolicModel: empty microlocal subspace");
}

namespace {

double min_real_part(const CMat& A) {
  const CMat H = 0.5 * (A + A.adjoint());
  return Eigen::SelfAdjointEigenSolver<CMat>(H, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

}  // namespace

double HyperbolicModel::gap(double h, Eigen::Index* dim) const {
  if (!(h > 0.0 && h <= params_.hbar_tilde)) fail(ErrorKind::InvalidInput, "gap: need 0 < h <= hbar_tilde");
  const double w = opts_.gap_width * std::sqrt(params_.hbar_tilde / h);
  const CMat U = microlocal_subspace(grid_, w, opts_.cutoff_threshold);
  if (dim) *dim = U.cols();
  if (U.cols() == 0) fail(ErrorKind::GridInadequate, "gap: empty microlocal subspace");
  const CMat A = CMat::Identity(U.cols(), U.cols()) - U.adjoint() * M_ * U;
  return min_real_part(A);
}

MonodromyResult HyperbolicModel::contraction(double s) const {
  if (!(std::abs(s) <= 0.5)) fail(ErrorKind::InvalidInput, "contraction: |s| must be <= 1/2");
  MonodromyResult r;
  r.h = params_.h;
  r.hbar_tilde = params_.hbar_tilde;
  r.s = s;
  r.unitarity_defect = defect_;
  r.subspace_dim = U_.cols();
  const CMat Wm = op_exponential(G_, cplx(-s, 0.0));
  const CMat Wp = op_exponential(G_, cplx(s, 0.0));
  const CMat WpU = Wp * U_;
  const CMat MtU = Wm * (M_ * WpU);
  r.norm_conjugated = norm2(MtU);
  r.norm_inverse_conjugated = norm2(CMat(Wm * (M_.adjoint() * WpU)));
  r.conjugated_numerical_min =
      min_real_part(CMat(CMat::Identity(U_.cols(), U_.cols()) - U_.adjoint() * MtU));
  return r;
}

MonodromyResult HyperbolicModel::evaluate(double h, double s) const {
  ModelParams p = params_;
  p.h = h;
  p.s = s;
  p.validate();
  MonodromyResult r = contraction(s);
  r.h = h;
  r.gap = gap(h, &r.gap_subspace_dim);
  return r;
}

MonodromyResult conjugated_contraction(const ModelParams& p, const ContractionOptions& opts) {
  const HyperbolicModel model(p, opts);
  MonodromyResult r = model.evaluate(p.h, p.s);
  if (!(r.norm_conjugated < 1.0) && p.s > 0.0) {
    std::ostringstream msg;
    msg << "contraction failure at (h, hbar_tilde, s) = (" << p.h << ", " << p.hbar_tilde << ", " << p.s
        << "): r = " << r.norm_conjugated;
    fail(ErrorKind::NumericFailure, msg.str());
  }
  return r;
}

GapFit fit_gap(const std::vector<double>& h, const std::vector<double>& gap) {
  if (h.size() != gap.size() || h.size() < 2) fail(ErrorKind::InvalidInput, "fit_gap: need at least two points");
  const double n = static_cast<double>(h.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0 && gap[i] > 0.0)) fail(ErrorKind::NumericFailure, "fit_gap: nonpositive gap, no power law");
    const double x = std::log(h[i]);
    const double y = std::log(gap[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  GapFit out{h, gap, 0.0, 0.0};
  out.N = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - out.N * sx) / n;
  out.C = std::exp(-intercept);
  return out;
}

CMat build_elliptic_monodromy(double alpha, double z, const PhaseGrid& grid) {
  if (!(alpha > 0.0)) fail(ErrorKind::InvalidInput, "build_elliptic_monodromy: alpha must be positive");
  const double a = 0.5 * alpha;
  WeylOperator Q =
      quantize(RealSymbol([a](double x, double xi) { return a * (x * x + xi * xi); }), grid, "(alpha/2)(x^2+xi^2)");
  Q.matrix.diagonal().array() -= z;
  return op_exponential(Q, cplx(0.0, -1.0 / grid.hbar));
}

}  // namespace semihyp
