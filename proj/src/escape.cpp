#include "semihyp/escape.hpp"

#include "semihyp/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace semihyp {

namespace {

void check_dims(const EscapeFunction& ef, const Vec& X, const Vec& Xi) {
  if (ef.dim_hyp < 0 || ef.dim_ell < 0) fail(ErrorKind::InvalidInput, "escape function: negative dimension");
  if (X.size() != ef.half_dim() || Xi.size() != ef.half_dim()) {
    std::ostringstream msg;
    msg << "escape function: expected " << ef.half_dim() << " coordinates, got X " << X.size() << ", Xi " << Xi.size();
    fail(ErrorKind::InvalidInput, msg.str());
  }
}

}  // namespace

cplx EscapeFunction::operator()(const Vec& X, const Vec& Xi) const {
  check_dims(*this, X, Xi);
  const double xh = X.head(dim_hyp).squaredNorm();
  const double ph = Xi.head(dim_hyp).squaredNorm();
  const double xe = X.tail(dim_ell).squaredNorm();
  const double pe = Xi.tail(dim_ell).squaredNorm();
  return {0.5 * (std::log1p(xh) - std::log1p(ph)), 0.5 * (xe - pe)};
}

std::pair<CVec, CVec> EscapeFunction::gradient(const Vec& X, const Vec& Xi) const {
  check_dims(*this, X, Xi);
  const Eigen::Index n = half_dim();
  CVec gx(n), gp(n);
  const double xh = X.head(dim_hyp).squaredNorm();
  const double ph = Xi.head(dim_hyp).squaredNorm();
  for (Eigen::Index j = 0; j < dim_hyp; ++j) {
    gx(j) = X(j) / (1.0 + xh);
    gp(j) = -Xi(j) / (1.0 + ph);
  }
  for (Eigen::Index j = dim_hyp; j < n; ++j) {
    gx(j) = cplx(0.0, X(j));
    gp(j) = cplx(0.0, -Xi(j));
  }
  return {gx, gp};
}

cplx eval_escape(const EscapeFunction& ef, const Vec& X, const Vec& Xi) { return ef(X, Xi); }

cplx hamiltonian_action(const QuadraticForm& q, const EscapeFunction& ef, const Vec& X, const Vec& Xi) {
  if (q.half_dim() != ef.half_dim()) fail(ErrorKind::InvalidInput, "hamiltonian_action: dimension mismatch");
  const auto [gx, gp] = ef.gradient(X, Xi);
  const Eigen::Index n = ef.half_dim();
  Vec z(2 * n);
  z << X, Xi;
  const Vec dq = q.S() * z;
  return (dq.tail(n).cast<cplx>().array() * gx.array()).sum() - (dq.head(n).cast<cplx>().array() * gp.array()).sum();
}

cplx hamiltonian_action(const QuadraticHamiltonian& q, const EscapeFunction& ef, const Vec& X, const Vec& Xi) {
  return hamiltonian_action(q.q, ef, X, Xi);
}

QuadraticForm hyperbolic_part(const SpectralClassification& cls) {
  const Eigen::Index m = cls.dim() / 2;
  const Eigen::Index nh = m - cls.elliptic_modes.size;
  // Hyperbolic modes occupy the leading x-coordinates of the normal-form basis.
  const Mat C = cls.B.topLeftCorner(m, m).topLeftCorner(nh, nh);
  Mat S = Mat::Zero(2 * nh, 2 * nh);
  S.bottomLeftCorner(nh, nh) = C;
  S.topRightCorner(nh, nh) = C.transpose();
  return QuadraticForm(S);
}

namespace {

double symmetric_min(const Mat& C) {
  const Mat sym = 0.5 * (C + C.transpose());
  return Eigen::SelfAdjointEigenSolver<Mat>(sym, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

/// Returns V with V^{-1} C V block upper triangular, 2x2 diagonal blocks in
/// rotation-scaling form, and off-diagonal blocks damped until the symmetric
/// part is positive. Empty optional if no damping achieves that.
std::optional<Mat> positivity_basis(const Mat& C) {
  const Eigen::Index n = C.rows();
  const Eigen::RealSchur<Mat> schur(C);
  const Mat& U = schur.matrixU();
  const Mat& R = schur.matrixT();

  Mat D0 = Mat::Identity(n, n);
  std::vector<Eigen::Index> block_of(n);
  Eigen::Index nblocks = 0;
  for (Eigen::Index i = 0; i < n;) {
    if (i + 1 < n && R(i + 1, i) != 0.0) {
      const Mat blk = R.block(i, i, 2, 2);
      const Eigen::EigenSolver<Mat> es(blk);
      Eigen::Index pick = es.eigenvalues()(0).imag() > 0 ? 0 : 1;
      const CVec v = es.eigenvectors().col(pick);
      // Columns (Re v, Im v) turn the block into [[a, b], [-b, a]].
      D0.block(i, i, 2, 1) = v.real();
      D0.block(i, i + 1, 2, 1) = v.imag();
      block_of[i] = block_of[i + 1] = nblocks++;
      i += 2;
    } else {
      block_of[i] = nblocks++;
      i += 1;
    }
  }
  const Mat Rn = D0.partialPivLu().solve(R * D0);

  double delta = 1.0;
  for (int attempt = 0; attempt < 60; ++attempt, delta *= 0.5) {
    Vec d(n);
    for (Eigen::Index i = 0; i < n; ++i) d(i) = std::pow(delta, static_cast<double>(block_of[i]));
    const Mat Rd = d.cwiseInverse().asDiagonal() * Rn * d.asDiagonal();
    if (symmetric_min(Rd) > 0.0) return Mat(U * D0 * d.asDiagonal());
  }
  return std::nullopt;
}

double envelope(const Vec& X, const Vec& Xi) {
  const double x2 = X.squaredNorm();
  const double p2 = Xi.squaredNorm();
  return x2 / (1.0 + x2) + p2 / (1.0 + p2);
}

}  // namespace

PositivityReport verify_positivity(const QuadraticForm& q, const PositivityOptions& opts) {
  if (opts.samples < 1 || !(opts.radius > 0.0)) fail(ErrorKind::InvalidInput, "verify_positivity: need samples >= 1 and radius > 0");
  const auto Copt = q.bilinear_coefficients();
  if (!Copt) fail(ErrorKind::InvalidInput, "verify_positivity: q must be of the form xi^T C x (hyperbolic part only)");
  const Mat& C = *Copt;
  const Eigen::Index n = C.rows();

  PositivityReport rep;
  rep.samples = 0;
  rep.radius = opts.radius;
  Mat Cad = C;
  rep.coord_change = Mat::Identity(2 * n, 2 * n);
  if (const auto V = positivity_basis(C)) {
    // x' = P x with P = V^{-1}; xi' = P^{-T} xi = V^T xi.
    const Mat P = V->partialPivLu().inverse();
    Cad = P * C * *V;
    rep.coord_change.topLeftCorner(n, n) = P;
    rep.coord_change.bottomRightCorner(n, n) = V->transpose();
    rep.adapted = true;
  }
  rep.adapted_symmetric_min = symmetric_min(Cad);

  const QuadraticForm qa = [&] {
    Mat S = Mat::Zero(2 * n, 2 * n);
    S.bottomLeftCorner(n, n) = Cad;
    S.topRightCorner(n, n) = Cad.transpose();
    return QuadraticForm(S);
  }();
  const EscapeFunction ef{n, 0};

  rep.min_ratio = std::numeric_limits<double>::infinity();
  auto visit = [&](const Vec& z) {
    const Vec X = z.head(n);
    const Vec Xi = z.tail(n);
    const double env = envelope(X, Xi);
    if (env == 0.0) return;
    const double ratio = hamiltonian_action(qa, ef, X, Xi).real() / env;
    ++rep.samples;
    if (ratio < rep.min_ratio) {
      rep.min_ratio = ratio;
      rep.argmin_point = z;
    }
  };

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double dim = static_cast<double>(2 * n);
  for (int s = 0; s < opts.samples; ++s) {
    Vec z(2 * n);
    for (Eigen::Index i = 0; i < 2 * n; ++i) z(i) = gauss(rng);
    const double nz = z.norm();
    if (nz == 0.0) continue;
    z *= opts.radius * std::pow(unif(rng), 1.0 / dim) / nz;
    visit(z);
  }
  if (opts.sweep_max > opts.radius && opts.sweep_points > 1) {
    const double lo = std::log(opts.radius);
    const double hi = std::log(opts.sweep_max);
    for (int s = 0; s < opts.sweep_points; ++s) {
      Vec z(2 * n);
      for (Eigen::Index i = 0; i < 2 * n; ++i) z(i) = gauss(rng);
      z.normalize();
      z *= std::exp(lo + (hi - lo) * s / (opts.sweep_points - 1));
      visit(z);
    }
  }
  return rep;
}

EscapeNormalForm diagonal_normal_form(const QuadraticForm& q) {
  const auto Copt = q.bilinear_coefficients();
  if (!Copt) fail(ErrorKind::Unsupported, "diagonal_normal_form: q is not bilinear; use verify_positivity");
  const Mat& C = *Copt;
  const Eigen::Index n = C.rows();
  const Mat off = C - Mat(C.diagonal().asDiagonal());
  if (off.norm() > 1e-12 * std::max(1.0, C.norm()))
    fail(ErrorKind::Unsupported, "diagonal_normal_form: q is not diagonal; use verify_positivity for the Jordan case");
  for (Eigen::Index j = 0; j < n; ++j)
    if (!(C(j, j) > 0.0)) fail(ErrorKind::Unsupported, "diagonal_normal_form: rates must be positive");

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Ascending r_j = lambda_j^{-1/2} is descending lambda_j.
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return C(a, a) > C(b, b); });

  EscapeNormalForm nf;
  nf.q = q;
  nf.M = Mat::Identity(n, n);
  nf.Mprime = Mat::Identity(n, n);
  nf.min_eig_M = 1.0;
  nf.min_eig_Mprime = 1.0;
  Mat perm = Mat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    perm(i, order[i]) = 1.0;
    nf.rates.push_back(C(order[i], order[i]));
    nf.r.push_back(1.0 / std::sqrt(C(order[i], order[i])));
  }
  nf.coord_change = Mat::Zero(2 * n, 2 * n);
  nf.coord_change.topLeftCorner(n, n) = perm;
  nf.coord_change.bottomRightCorner(n, n) = perm;
  return nf;
}

double normal_form_residual(const EscapeNormalForm& nf, const Vec& x, const Vec& xi) {
  const Eigen::Index n = static_cast<Eigen::Index>(nf.r.size());
  if (x.size() != n || xi.size() != n) fail(ErrorKind::InvalidInput, "normal_form_residual: dimension mismatch");
  const Mat perm = nf.coord_change.topLeftCorner(n, n);
  const EscapeFunction ef{n, 0};
  const double lhs = hamiltonian_action(nf.q, ef, perm.transpose() * x, perm.transpose() * xi).real();
  const double mx = (nf.M * x).squaredNorm();
  const double mp = (nf.Mprime * xi).squaredNorm();
  double rhs = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double w = 1.0 / (nf.r[j] * nf.r[j]);
    rhs += w * x(j) * x(j) / (1.0 + mx) + w * xi(j) * xi(j) / (1.0 + mp);
  }
  return std::abs(lhs - rhs);
}

}  // namespace semihyp
