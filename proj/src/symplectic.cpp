#include "semihyp/symplectic.hpp"

#include "semihyp/error.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <sstream>

namespace semihyp {

SymplecticMatrix::SymplecticMatrix(Mat entries, double tol) : entries_(std::move(entries)), defect_(0.0) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0 || entries_.rows() % 2 != 0)
    fail(ErrorKind::InvalidInput, "symplectic matrix must be square with even positive dimension");
  if (!entries_.allFinite()) fail(ErrorKind::InvalidInput, "symplectic matrix has non-finite entries");
  defect_ = symplectic_defect(entries_);
  if (!(defect_ <= tol)) {
    std::ostringstream msg;
    msg << "matrix is not symplectic: defect ||K^T J K - J||_F = " << defect_ << " > " << tol;
    fail(ErrorKind::NotSymplectic, msg.str());
  }
}

SymplecticMatrix SymplecticMatrix::identity(Eigen::Index dim) { return SymplecticMatrix(Mat::Identity(dim, dim)); }

Mat SymplecticMatrix::inverse() const {
  const Mat J = standard_form(dim());
  return -J * entries_.transpose() * J;
}

namespace {

double factor_tolerance(const Mat& K) { return 1e-9 * std::max(1.0, K.squaredNorm()); }

}  // namespace

PolarFactors polar_decompose(const SymplecticMatrix& K) {
  // For symplectic iterates ||X^{-1}||_F = ||X||_F, so the optimal Frobenius
  // scaling is 1 and the plain Newton iteration already converges quadratically.
  Mat X = K.matrix();
  int it = 0;
  for (; it < 100; ++it) {
    const Mat Xinv_t = X.partialPivLu().inverse().transpose();
    Mat next = 0.5 * (X + Xinv_t);
    const double change = (next - X).norm();
    X = std::move(next);
    if (change <= 1e-15 * X.norm()) break;
  }
  if (it == 100) fail(ErrorKind::NumericFailure, "polar_decompose: Newton iteration did not converge");
  Mat P = X.transpose() * K.matrix();
  P = 0.5 * (P + P.transpose()).eval();

  const Eigen::SelfAdjointEigenSolver<Mat> es(P, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) fail(ErrorKind::NumericFailure, "polar_decompose: positive factor is not definite");

  const double tol = factor_tolerance(K.matrix());
  return PolarFactors{SymplecticMatrix(X, tol), SymplecticMatrix(P, tol), hi / lo, it + 1};
}

SymplecticLog symplectic_log(const SymplecticMatrix& A) {
  const Mat& a = A.matrix();
  const double scale = std::max(1.0, a.norm());
  if ((a - a.transpose()).norm() > 1e-10 * scale)
    fail(ErrorKind::InvalidInput, "symplectic_log: input is not symmetric");
  const Mat sym = 0.5 * (a + a.transpose());
  const Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  if (es.info() != Eigen::Success) fail(ErrorKind::NumericFailure, "symplectic_log: eigensolver failed");
  const Vec& mu = es.eigenvalues();
  // Positive-definite input cannot have eigenvalues on the negative real axis.
  if (!(mu.minCoeff() > 0.0)) fail(ErrorKind::InvalidInput, "symplectic_log: input is not positive-definite");

  const Eigen::Index n = a.rows();
  const Eigen::Index m = n / 2;
  const Mat J = standard_form(n);
  SymplecticLog out;
  out.B = Mat::Zero(n, n);
  // Eigenvalues are ascending; the top m are the mu >= 1 half. J maps the
  // mu-eigenvector of a symmetric symplectic matrix to the 1/mu-eigenvector.
  Mat top(n, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index idx = n - 1 - i;
    const Vec v = es.eigenvectors().col(idx);
    const Vec w = J * v;
    const double lam = std::log(mu(idx));
    out.B += lam * (v * v.transpose() - w * w.transpose());
    out.logs.push_back(lam);
    out.inverse_logs.push_back(-lam);
    top.col(i) = v;
  }
  // Isotropy of the expanding eigenvectors measures how well v and Jv separate.
  const double iso = (top.transpose() * J * top).norm();
  out.eigenbasis_condition = 1.0 + iso;
  return out;
}

const char* to_string(BlockKind kind) {
  switch (kind) {
    case BlockKind::ComplexHyperbolic: return "complex-hyperbolic";
    case BlockKind::RealPositive: return "real-positive";
    case BlockKind::RealNegative: return "real-negative";
    case BlockKind::Elliptic: return "elliptic";
  }
  return "unknown";
}

Eigen::Index SpectralClassification::dimension_count() const {
  Eigen::Index total = 0;
  for (const auto& b : blocks) {
    switch (b.kind) {
      case BlockKind::ComplexHyperbolic: total += 4 * b.multiplicity; break;
      case BlockKind::RealPositive:
      case BlockKind::RealNegative: total += 2 * b.multiplicity; break;
      case BlockKind::Elliptic: total += 2; break;
    }
  }
  return total;
}

namespace {

struct Cluster {
  cplx mean;
  int size;
};

std::vector<Cluster> cluster_eigenvalues(const CVec& ev, double gap) {
  const Eigen::Index n = ev.size();
  std::vector<int> label(n, -1);
  int next = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (label[i] >= 0) continue;
    label[i] = next;
    std::vector<Eigen::Index> stack{i};
    while (!stack.empty()) {
      const Eigen::Index a = stack.back();
      stack.pop_back();
      for (Eigen::Index b = 0; b < n; ++b) {
        if (label[b] >= 0) continue;
        if (std::abs(ev(a) - ev(b)) <= gap * std::max(1.0, std::abs(ev(a)))) {
          label[b] = next;
          stack.push_back(b);
        }
      }
    }
    ++next;
  }
  std::vector<Cluster> out(next, Cluster{cplx(0.0), 0});
  for (Eigen::Index i = 0; i < n; ++i) {
    out[label[i]].mean += ev(i);
    out[label[i]].size += 1;
  }
  for (auto& c : out) c.mean /= static_cast<double>(c.size);
  return out;
}

/// Orthonormal basis of the generalized eigenspace of dimension `a` at `mu`:
/// the a smallest right singular vectors of (A - mu I)^a.
CMat generalized_eigenspace(const Mat& A, cplx mu, int a) {
  const Eigen::Index n = A.rows();
  const CMat shifted = A.cast<cplx>() - mu * CMat::Identity(n, n);
  CMat power = CMat::Identity(n, n);
  for (int k = 0; k < a; ++k) power = power * shifted;
  const Eigen::JacobiSVD<CMat> svd(power, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(a);
}

Mat real_generalized_eigenspace(const Mat& A, double mu, int a) {
  const Eigen::Index n = A.rows();
  const Mat shifted = A - mu * Mat::Identity(n, n);
  Mat power = Mat::Identity(n, n);
  for (int k = 0; k < a; ++k) power = power * shifted;
  const Eigen::JacobiSVD<Mat> svd(power, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(a);
}

/// Jordan block sizes at mu from the rank staircase of (A - mu I)^k on E_mu.
std::vector<int> jordan_sizes(const Mat& A, const CMat& basis, cplx mu, double rank_tol) {
  const int a = static_cast<int>(basis.cols());
  const CMat R = basis.adjoint() * A.cast<cplx>() * basis - mu * CMat::Identity(a, a);
  std::vector<int> kernel_dim(a + 2, 0);
  CMat power = CMat::Identity(a, a);
  for (int k = 1; k <= a; ++k) {
    power = power * R;
    const Eigen::JacobiSVD<CMat> svd(power);
    const double thr = std::pow(rank_tol * std::max(1.0, std::abs(mu)), k);
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > thr) ++rank;
    kernel_dim[k] = a - rank;
  }
  kernel_dim[a + 1] = a;
  std::vector<int> sizes;
  for (int k = 1; k <= a; ++k) {
    const int at_least_k = kernel_dim[k] - kernel_dim[k - 1];
    const int at_least_k1 = kernel_dim[k + 1] - kernel_dim[k];
    for (int c = 0; c < at_least_k - at_least_k1; ++c) sizes.push_back(k);
  }
  // Rounding in the staircase can lose columns; fall back to one block.
  int total = 0;
  for (int s : sizes) total += s;
  if (total != a) sizes.assign(1, a);
  return sizes;
}

/// Rotate the phase of each column so its real and imaginary parts are orthogonal.
CMat normalize_phases(CMat C) {
  for (Eigen::Index j = 0; j < C.cols(); ++j) {
    const cplx s = C.col(j).transpose() * C.col(j);
    if (std::abs(s) > 0.0) C.col(j) *= std::exp(cplx(0.0, -0.5 * std::arg(s)));
  }
  return C;
}

Mat realify(const CMat& C) {
  Mat U(C.rows(), 2 * C.cols());
  for (Eigen::Index j = 0; j < C.cols(); ++j) {
    U.col(2 * j) = C.col(j).real();
    U.col(2 * j + 1) = C.col(j).imag();
  }
  return U;
}

struct HyperbolicPiece {
  BlockKind kind;
  Mat x_part;   // columns spanning the expanding subspace
  Mat xi_part;  // dual columns with omega(x_i, xi_j) = -delta_ij
  std::vector<SpectralBlock> blocks;
};

struct EllipticPiece {
  Vec e, f;
  SpectralBlock block;
};

cplx find_partner(const std::vector<Cluster>& clusters, cplx target, double gap) {
  cplx best = target;
  double dist = std::numeric_limits<double>::infinity();
  for (const auto& c : clusters) {
    const double d = std::abs(c.mean - target);
    if (d < dist) {
      dist = d;
      best = c.mean;
    }
  }
  if (dist > 1e3 * gap * std::max(1.0, std::abs(target)))
    fail(ErrorKind::NumericFailure, "classify_spectrum: eigenvalue has no symplectic partner 1/mu");
  return best;
}

}  // namespace

SpectralClassification classify_spectrum(const SymplecticMatrix& dS, const ClassifyOptions& opts) {
  const Mat& A = dS.matrix();
  const Eigen::Index n = A.rows();
  const Eigen::Index m = n / 2;
  const Mat J = standard_form(n);

  const Eigen::EigenSolver<Mat> es(A, false);
  if (es.info() != Eigen::Success) fail(ErrorKind::NumericFailure, "classify_spectrum: eigensolver failed");
  const auto clusters = cluster_eigenvalues(es.eigenvalues(), opts.cluster_gap);

  std::vector<HyperbolicPiece> hc, hr_plus, hr_minus;
  std::vector<EllipticPiece> ell;

  for (const auto& c : clusters) {
    const double r = std::abs(c.mean);
    const double off = std::abs(r - 1.0);
    std::ostringstream where;
    where << "eigenvalue " << c.mean.real() << (c.mean.imag() < 0 ? "" : "+") << c.mean.imag() << "i";

    if (off <= opts.tol_unit) {
      if (std::abs(c.mean.imag()) <= opts.tol_unit)
        fail(ErrorKind::ClassificationAmbiguous,
             "classify_spectrum: " + where.str() + " is a unit eigenvalue at +-1 (neither hyperbolic nor elliptic)");
      if (c.mean.imag() < 0.0) continue;
      if (c.size > 1)
        fail(ErrorKind::Unsupported, "classify_spectrum: repeated elliptic " + where.str() + " is not supported");
      const cplx mu = c.mean / r;
      CMat v = normalize_phases(generalized_eigenspace(A, c.mean, 1));
      Vec e = v.col(0).real();
      Vec f = v.col(0).imag();
      const double s = e.dot(J * f);
      if (std::abs(s) < 1e-14) fail(ErrorKind::NumericFailure, "classify_spectrum: degenerate elliptic eigenvector");
      int krein = 1;
      if (s > 0.0) {
        f = -f;
        krein = -1;
      }
      const double scale = 1.0 / std::sqrt(std::abs(s));
      SpectralBlock blk{BlockKind::Elliptic, mu, 1, std::log(mu), std::conj(mu), -std::log(mu),
                        std::conj(std::log(mu)), krein};
      ell.push_back(EllipticPiece{e * scale, f * scale, blk});
      continue;
    }
    if (off < opts.ambiguous_factor * opts.tol_unit)
      fail(ErrorKind::ClassificationAmbiguous, "classify_spectrum: " + where.str() +
                                                   " lies in the ambiguous band near the unit circle");
    if (r < 1.0) continue;

    const bool real = std::abs(c.mean.imag()) <= opts.cluster_gap * r;
    if (!real && c.mean.imag() < 0.0) continue;

    HyperbolicPiece piece;
    const cplx partner = find_partner(clusters, 1.0 / c.mean, opts.cluster_gap);
    const CMat cbasis = generalized_eigenspace(A, real ? cplx(c.mean.real(), 0.0) : c.mean, c.size);
    const auto sizes = jordan_sizes(A, cbasis, c.mean, opts.cluster_gap);

    Mat U, W;
    if (real) {
      const double mu = c.mean.real();
      piece.kind = mu > 0.0 ? BlockKind::RealPositive : BlockKind::RealNegative;
      U = real_generalized_eigenspace(A, mu, c.size);
      W = real_generalized_eigenspace(A, partner.real(), c.size);
      for (int k : sizes) {
        const cplx lam = std::log(std::abs(mu));
        piece.blocks.push_back(SpectralBlock{piece.kind, cplx(mu, 0.0), k, lam, cplx(1.0 / mu, 0.0), -lam,
                                             std::conj(lam), 1});
      }
    } else {
      piece.kind = BlockKind::ComplexHyperbolic;
      U = realify(normalize_phases(cbasis));
      W = realify(normalize_phases(generalized_eigenspace(A, partner, c.size)));
      for (int k : sizes) {
        const cplx lam = std::log(c.mean);
        piece.blocks.push_back(SpectralBlock{piece.kind, c.mean, k, lam, 1.0 / c.mean, -lam, std::conj(lam), 1});
      }
    }
    const Mat G = U.transpose() * J * W;
    const Eigen::FullPivLU<Mat> lu(G);
    if (!lu.isInvertible())
      fail(ErrorKind::NumericFailure, "classify_spectrum: expanding and contracting subspaces are not dual");
    piece.x_part = U;
    piece.xi_part = -W * lu.inverse();
    switch (piece.kind) {
      case BlockKind::ComplexHyperbolic: hc.push_back(std::move(piece)); break;
      case BlockKind::RealPositive: hr_plus.push_back(std::move(piece)); break;
      default: hr_minus.push_back(std::move(piece)); break;
    }
  }

  SpectralClassification cls;
  cls.dS = A;
  Mat T = Mat::Zero(n, n);
  Eigen::Index col = 0;
  auto place = [&](std::vector<HyperbolicPiece>& group, SpectralClassification::ModeRange& range, int& count) {
    range.begin = col;
    for (auto& p : group) {
      const Eigen::Index d = p.x_part.cols();
      if (col + d > m) fail(ErrorKind::NumericFailure, "classify_spectrum: subspace dimensions exceed the phase space");
      T.middleCols(col, d) = p.x_part;
      T.middleCols(m + col, d) = p.xi_part;
      col += d;
      count += static_cast<int>(p.blocks.size());
      for (auto& b : p.blocks) cls.blocks.push_back(b);
    }
    range.size = col - range.begin;
  };
  place(hc, cls.hc_modes, cls.n_hc);
  place(hr_plus, cls.hr_plus_modes, cls.n_hr_plus);
  place(hr_minus, cls.hr_minus_modes, cls.n_hr_minus);
  cls.elliptic_modes.begin = col;
  for (auto& p : ell) {
    if (col + 1 > m) fail(ErrorKind::NumericFailure, "classify_spectrum: subspace dimensions exceed the phase space");
    T.col(col) = p.e;
    T.col(m + col) = p.f;
    ++col;
    ++cls.n_e;
    cls.blocks.push_back(p.block);
  }
  cls.elliptic_modes.size = col - cls.elliptic_modes.begin;
  if (col != m || cls.dimension_count() != n)
    fail(ErrorKind::NumericFailure, "classify_spectrum: invariant subspaces do not fill the phase space");

  cls.basis = T;
  const Eigen::JacobiSVD<Mat> tsvd(T);
  cls.basis_condition = tsvd.singularValues()(0) / tsvd.singularValues()(n - 1);
  const Mat AT = T.partialPivLu().solve(A * T);

  cls.B = Mat::Zero(n, n);
  cls.F = Mat::Zero(n, n);
  auto fill_hyperbolic = [&](const std::vector<HyperbolicPiece>& group, Eigen::Index at, bool negative) {
    // Pieces are independent invariant subspaces; take the real log per piece.
    for (const auto& p : group) {
      const Eigen::Index d = p.x_part.cols();
      Mat Ax = AT.block(at, at, d, d);
      if (negative) Ax = -Ax;
      const Mat Bx = Ax.log();
      cls.B.block(at, at, d, d) = Bx;
      cls.B.block(m + at, m + at, d, d) = -Bx.transpose();
      if (negative) {
        cls.F.block(at, at, d, d) = std::numbers::pi * Mat::Identity(d, d);
        cls.F.block(m + at, m + at, d, d) = std::numbers::pi * Mat::Identity(d, d);
      }
      at += d;
    }
  };
  fill_hyperbolic(hc, cls.hc_modes.begin, false);
  fill_hyperbolic(hr_plus, cls.hr_plus_modes.begin, false);
  fill_hyperbolic(hr_minus, cls.hr_minus_modes.begin, true);
  for (Eigen::Index i = 0; i < cls.elliptic_modes.size; ++i) {
    const Eigen::Index j = cls.elliptic_modes.begin + i;
    const auto& blk = ell[i].block;
    const double Fj = blk.krein_sign * blk.lambda.imag();
    cls.F(j, j) = Fj;
    cls.F(m + j, m + j) = Fj;
  }
  if (!cls.B.allFinite()) fail(ErrorKind::NumericFailure, "classify_spectrum: block logarithm failed");

  const Mat rebuilt = expm(Mat(-J * cls.F)) * expm(cls.B);
  cls.reconstruction_error = (rebuilt - AT).norm() / A.norm();
  return cls;
}

const char* to_string(ResonanceVerdict::Kind kind) {
  switch (kind) {
    case ResonanceVerdict::Kind::Independent: return "independent";
    case ResonanceVerdict::Kind::Resonant: return "resonant";
    case ResonanceVerdict::Kind::Undecided: return "undecided";
  }
  return "unknown";
}

ResonanceVerdict nonresonance_check(const std::vector<double>& alphas, int bound, double resonance_tol,
                                    double undecided_tol) {
  if (bound < 1) fail(ErrorKind::InvalidInput, "nonresonance_check: denominator bound must be >= 1");
  if (alphas.empty()) fail(ErrorKind::InvalidInput, "nonresonance_check: no angles given");
  const std::size_t n = alphas.size();
  ResonanceVerdict out{ResonanceVerdict::Kind::Independent, {}, std::numeric_limits<double>::infinity()};

  // Scan shells of increasing max |c_j| so the first witness has the smallest height.
  std::vector<int> c(n);
  for (int height = 1; height <= bound; ++height) {
    std::fill(c.begin(), c.end(), -height);
    while (true) {
      int top = 0;
      bool leading_positive = false;
      for (std::size_t j = 0; j < n; ++j) {
        top = std::max(top, std::abs(c[j]));
        if (!leading_positive && c[j] != 0) leading_positive = c[j] > 0;
      }
      // Each relation appears with both signs; keep the one whose first nonzero entry is positive.
      if (top == height && leading_positive) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += c[j] * alphas[j];
        const double ratio = s / std::numbers::pi;
        const double dist = std::abs(ratio - std::round(ratio));
        if (dist <= resonance_tol * std::max(1.0, std::abs(ratio))) {
          out.kind = ResonanceVerdict::Kind::Resonant;
          out.witness = c;
          out.closest_distance = dist;
          return out;
        }
        out.closest_distance = std::min(out.closest_distance, dist);
      }
      std::size_t j = 0;
      while (j < n && c[j] == height) c[j++] = -height;
      if (j == n) break;
      ++c[j];
    }
  }
  if (out.closest_distance <= undecided_tol) out.kind = ResonanceVerdict::Kind::Undecided;
  return out;
}

QuadraticForm::QuadraticForm(Mat S) : S_(std::move(S)) {
  if (S_.rows() != S_.cols() || S_.rows() % 2 != 0)
    fail(ErrorKind::InvalidInput, "quadratic form must be square with even dimension");
  if ((S_ - S_.transpose()).norm() > 1e-12 * std::max(1.0, S_.norm()))
    fail(ErrorKind::InvalidInput, "quadratic form matrix must be symmetric");
  S_ = 0.5 * (S_ + S_.transpose()).eval();
}

double QuadraticForm::operator()(const Vec& x, const Vec& xi) const {
  const Eigen::Index m = half_dim();
  if (x.size() != m || xi.size() != m) fail(ErrorKind::InvalidInput, "quadratic form: dimension mismatch");
  Vec z(2 * m);
  z << x, xi;
  return 0.5 * z.dot(S_ * z);
}

Mat QuadraticForm::hamiltonian_matrix() const { return semihyp::hamiltonian_matrix(S_); }

std::optional<Mat> QuadraticForm::bilinear_coefficients(double tol) const {
  const Eigen::Index m = half_dim();
  const double scale = std::max(1.0, S_.norm());
  if (S_.topLeftCorner(m, m).norm() > tol * scale || S_.bottomRightCorner(m, m).norm() > tol * scale)
    return std::nullopt;
  return Mat(S_.bottomLeftCorner(m, m));
}

namespace {

QuadraticForm bilinear_form(const Mat& C) {
  const Eigen::Index m = C.rows();
  Mat S = Mat::Zero(2 * m, 2 * m);
  S.bottomLeftCorner(m, m) = C;
  S.topRightCorner(m, m) = C.transpose();
  return QuadraticForm(S);
}

}  // namespace

QuadraticHamiltonian build_quadratic_hamiltonian(const SpectralClassification& cls) {
  const Eigen::Index n = cls.dim();
  const Eigen::Index m = n / 2;
  const Mat J = standard_form(n);
  QuadraticHamiltonian out;
  out.dim = n;
  // -J S = B  <=>  S = J B; symmetric because B is Hamiltonian.
  Mat S = J * cls.B;
  S = 0.5 * (S + S.transpose()).eval();
  out.q = QuadraticForm(S);
  out.q1 = QuadraticForm(cls.F);
  out.hyp_coeffs = cls.B.topLeftCorner(m, m);

  Mat Sah = Mat::Zero(n, n);
  out.ell_coeffs.assign(m, 0.0);
  out.ah_coeffs.assign(m, 0.0);
  for (Eigen::Index j = 0; j < m; ++j) out.ell_coeffs[j] = 0.5 * cls.F(j, j);
  for (Eigen::Index i = 0; i < cls.elliptic_modes.size; ++i) {
    const Eigen::Index j = cls.elliptic_modes.begin + i;
    out.ah_coeffs[j] = 2.0;
    Sah(j, m + j) = Sah(m + j, j) = 2.0;
  }
  out.q_ah = QuadraticForm(Sah);
  return out;
}

namespace {

Mat normal_form_coefficients(const std::vector<HyperbolicBlockSpec>& blocks) {
  Eigen::Index m = 0;
  for (const auto& b : blocks) {
    if (b.multiplicity < 1) fail(ErrorKind::InvalidInput, "normal form: multiplicity must be >= 1");
    if (b.kind == BlockKind::Elliptic) fail(ErrorKind::InvalidInput, "normal form: elliptic blocks are not hyperbolic");
    m += (b.kind == BlockKind::ComplexHyperbolic ? 2 : 1) * b.multiplicity;
  }
  Mat C = Mat::Zero(m, m);
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    const int k = b.multiplicity;
    if (b.kind == BlockKind::ComplexHyperbolic) {
      const double re = b.lambda.real();
      const double im = b.lambda.imag();
      for (int l = 0; l < k; ++l) {
        const Eigen::Index i = at + 2 * l;
        // Re lambda (x1 xi1 + x2 xi2) - Im lambda (x1 xi2 - x2 xi1), with q = xi^T C x.
        C(i, i) = re;
        C(i + 1, i + 1) = re;
        C(i + 1, i) = -im;
        C(i, i + 1) = im;
        if (l + 1 < k) {
          C(i, i + 2) = b.coupling;
          C(i + 1, i + 3) = b.coupling;
        }
      }
      at += 2 * k;
    } else {
      for (int l = 0; l < k; ++l) {
        C(at + l, at + l) = b.lambda.real();
        if (l + 1 < k) C(at + l, at + l + 1) = b.coupling;
      }
      at += k;
    }
  }
  return C;
}

}  // namespace

QuadraticForm hyperbolic_normal_form(const std::vector<HyperbolicBlockSpec>& blocks) {
  return bilinear_form(normal_form_coefficients(blocks));
}

Mat normal_form_generator(const std::vector<HyperbolicBlockSpec>& blocks) {
  const Mat C = normal_form_coefficients(blocks);
  const Eigen::Index m = C.rows();
  Mat B = Mat::Zero(2 * m, 2 * m);
  B.topLeftCorner(m, m) = C;
  B.bottomRightCorner(m, m) = -C.transpose();
  return B;
}

}  // namespace semihyp
