#include "semihyp/quasimode.hpp"

#include "semihyp/error.hpp"
#include "semihyp/schedule.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace semihyp {

Vec hermite_function(int k, const Vec& y) {
  if (k < 0) fail(ErrorKind::InvalidInput, "hermite_function: negative index");
  Vec prev = (std::pow(std::numbers::pi, -0.25) * (-0.5 * y.array().square()).exp()).matrix();
  if (k == 0) return prev;
  Vec cur = (std::sqrt(2.0) * y.array() * prev.array()).matrix();
  for (int j = 1; j < k; ++j) {
    Vec next = (std::sqrt(2.0 / (j + 1)) * y.array() * cur.array() - std::sqrt(double(j) / (j + 1)) * prev.array())
                   .matrix();
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

double HermiteMode::norm() const {
  const double cell = std::pow(grid.dx(), static_cast<double>(beta.size()));
  return std::sqrt(values.squaredNorm() * cell);
}

int hermite_capacity(double h, const PhaseGrid& grid) {
  // Mode k fills |x|, |xi| <= sqrt((2k+1) h); keep that inside half the window.
  const double room = std::min(grid.L, grid.xi_max());
  return static_cast<int>(std::floor(room * room / (4.0 * h)));
}

HermiteMode hermite_mode(const std::vector<int>& beta, double h, const PhaseGrid& grid) {
  if (!(h > 0.0)) fail(ErrorKind::InvalidInput, "hermite_mode: h must be positive");
  if (beta.empty() || beta.size() > 2) fail(ErrorKind::Unsupported, "hermite_mode: one or two transverse dimensions only");
  const PhaseGrid g(grid.L, grid.N, h);
  const int cap = hermite_capacity(h, g);
  for (int b : beta) {
    if (b < 0) fail(ErrorKind::InvalidInput, "hermite_mode: negative index");
    if (b > cap) {
      std::ostringstream msg;
      msg << "hermite_mode: index " << b << " exceeds grid capacity " << cap << " at h = " << h;
      fail(ErrorKind::GridInadequate, msg.str());
    }
  }
  const Vec y = g.positions() / std::sqrt(h);
  const double amp = std::pow(h, -0.25);
  HermiteMode out{beta, h, g, CVec()};
  const Vec v0 = amp * hermite_function(beta[0], y);
  if (beta.size() == 1) {
    out.values = v0.cast<cplx>();
  } else {
    const Vec v1 = amp * hermite_function(beta[1], y);
    out.values.resize(g.N * g.N);
    for (int i = 0; i < g.N; ++i)
      for (int j = 0; j < g.N; ++j) out.values(i * g.N + j) = v0(i) * v1(j);
  }
  return out;
}

HermiteMode hermite_mode(int beta, double h, const PhaseGrid& grid) {
  return hermite_mode(std::vector<int>{beta}, h, grid);
}

namespace {

void check_ladder_args(double h, int m_exponent, double c0) {
  if (!(h > 0.0 && h < 1.0)) fail(ErrorKind::InvalidInput, "ladder: h must lie in (0, 1)");
  if (m_exponent < 2) fail(ErrorKind::InvalidInput, "ladder: m_exponent must be > 1");
  if (!(c0 >= 0.0)) fail(ErrorKind::InvalidInput, "ladder: c0 must be nonnegative");
}

/// Calls f(beta) for every beta with h (2 beta_j + 1) <= h^{1/m}.
template <typename F>
void for_each_beta(std::size_t dims, int beta_max, F&& f) {
  if (beta_max < 0) return;
  std::vector<int> beta(dims, 0);
  while (true) {
    f(beta);
    std::size_t j = 0;
    while (j < dims && beta[j] == beta_max) beta[j++] = 0;
    if (j == dims) return;
    ++beta[j];
  }
}

void finalize(QuasimodeLadder& ladder) {
  std::stable_sort(ladder.entries.begin(), ladder.entries.end(),
                   [](const LadderEntry& a, const LadderEntry& b) { return a.z < b.z; });
  std::vector<LadderEntry> kept;
  for (auto& e : ladder.entries) {
    if (!kept.empty() && std::abs(e.z - kept.back().z) <= 1e-12) {
      ++ladder.duplicates_removed;
      continue;
    }
    kept.push_back(std::move(e));
  }
  ladder.entries = std::move(kept);
  ladder.count = static_cast<long>(ladder.entries.size());
}

struct Window {
  double zmax;
  long k_max;
  int beta_max;
};

Window ladder_window(double h, int m_exponent, double c0) {
  const double scale = std::pow(h, 1.0 / m_exponent);
  Window w;
  w.zmax = c0 * scale;
  w.k_max = static_cast<long>(std::floor(c0 * scale / (std::numbers::pi * h) + 1e-12));
  w.beta_max = static_cast<int>(std::floor((scale / h - 1.0) / 2.0 + 1e-12));
  return w;
}

}  // namespace

QuasimodeLadder exact_model_ladder(const std::vector<double>& alphas, double h, int m_exponent, double c0) {
  check_ladder_args(h, m_exponent, c0);
  if (alphas.empty()) fail(ErrorKind::InvalidInput, "exact_model_ladder: need at least one elliptic angle");
  for (double a : alphas)
    if (!(a > 0.0)) fail(ErrorKind::InvalidInput, "exact_model_ladder: alpha must be positive");
  const Window w = ladder_window(h, m_exponent, c0);
  QuasimodeLadder ladder;
  ladder.m_exponent = m_exponent;
  ladder.c0 = c0;
  ladder.h = h;
  ladder.k_max = w.k_max;
  ladder.beta_max = w.beta_max;
  for_each_beta(alphas.size(), w.beta_max, [&](const std::vector<int>& beta) {
    double base = 0.0;
    // same operation order as PerturbationModel::zeta, so order 0 of the perturbed ladder agrees bitwise
    for (std::size_t j = 0; j < alphas.size(); ++j) base += alphas[j] * (h * (2 * beta[j] + 1));
    for (long k = -w.k_max; k <= w.k_max; ++k) {
      const double z = 0.5 * base + 2.0 * std::numbers::pi * k * h;
      if (std::abs(z) <= w.zmax) ladder.entries.push_back(LadderEntry{k, beta, z, 0.0, {}});
    }
  });
  finalize(ladder);
  return ladder;
}

double PerturbationModel::zeta(double z, const std::vector<double>& I, double h) const {
  if (I.size() != lambdas.size()) fail(ErrorKind::InvalidInput, "zeta: action vector does not match lambdas");
  double out = 0.0;
  for (std::size_t j = 0; j < lambdas.size(); ++j) out += lambdas[j](z) * I[j];
  double hp = h;
  for (const auto& q : corrections) {
    out += hp * q(z, I);
    hp *= h;
  }
  return out;
}

QuasimodeLadder perturbed_ladder(const PerturbationModel& model, double h, int m_exponent, double c0, int order) {
  check_ladder_args(h, m_exponent, c0);
  if (order < 0) fail(ErrorKind::InvalidInput, "perturbed_ladder: order must be >= 0");
  if (model.lambdas.empty()) fail(ErrorKind::InvalidInput, "perturbed_ladder: need at least one lambda_j");
  const std::vector<double> zero(model.lambdas.size(), 0.0);
  for (std::size_t l = 0; l < model.corrections.size(); ++l)
    if (std::abs(model.corrections[l](0.0, zero)) > 1e-14)
      fail(ErrorKind::InvalidInput, "perturbed_ladder: correction q_" + std::to_string(l + 1) + " is not O(I)");

  const Window w = ladder_window(h, m_exponent, c0);
  QuasimodeLadder ladder;
  ladder.m_exponent = m_exponent;
  ladder.c0 = c0;
  ladder.h = h;
  ladder.k_max = w.k_max;
  ladder.beta_max = w.beta_max;
  for_each_beta(model.lambdas.size(), w.beta_max, [&](const std::vector<int>& beta) {
    std::vector<double> I(beta.size());
    for (std::size_t j = 0; j < beta.size(); ++j) I[j] = h * (2 * beta[j] + 1);
    const double zeta0 = model.zeta(0.0, I, h);
    for (long k = -w.k_max; k <= w.k_max; ++k) {
      const double shift = 2.0 * std::numbers::pi * k * h;
      double z = 0.5 * zeta0 + shift;
      if (std::abs(z) > w.zmax) continue;
      LadderEntry e{k, beta, z, 0.0, {z}};
      for (int j = 1; j <= order; ++j) {
        const double next = 0.5 * model.zeta(z, I, h) + shift;
        const double inc = next - z;
        const double last = std::abs(e.increments.back());
        if (std::abs(inc) > last && std::abs(inc) > 1e-15) {
          std::ostringstream msg;
          msg << "perturbed_ladder: series diverges at (k, beta0) = (" << k << ", " << beta[0] << "), order " << j
              << ": |z^(j)| = " << std::abs(inc) << " > |z^(j-1)| = " << last;
          fail(ErrorKind::NumericFailure, msg.str());
        }
        e.increments.push_back(inc);
        z = next;
      }
      e.z = z;
      ladder.entries.push_back(std::move(e));
    }
  });
  finalize(ladder);
  return ladder;
}

CountingFit counting_slope(const std::vector<double>& alphas, const std::vector<double>& hs, int m_exponent,
                           double c0) {
  if (hs.size() < 2) fail(ErrorKind::InvalidInput, "counting_slope: need at least two h values");
  CountingFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double h : hs) {
    const long n = exact_model_ladder(alphas, h, m_exponent, c0).count;
    if (n <= 0) fail(ErrorKind::NumericFailure, "counting_slope: empty ladder at h = " + std::to_string(h));
    const double x = std::log(1.0 / h);
    const double y = std::log(static_cast<double>(n));
    fit.h.push_back(h);
    fit.count.push_back(n);
    fit.exponents.push_back(y / x);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(hs.size());
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return fit;
}

double borel_cutoff(double x) {
  if (x <= 1.0) return 1.0;
  if (x >= 2.0) return 0.0;
  return 1.0 - smooth_step(x - 1.0);
}

BorelResult borel_resum(const std::vector<double>& envelope, const std::vector<double>& h_grid, int m_exponent,
                        const std::vector<int>& orders, const std::optional<std::vector<double>>& schedule) {
  if (m_exponent < 1) fail(ErrorKind::InvalidInput, "borel_resum: m_exponent must be >= 1");
  for (double c : envelope)
    if (!(c >= 0.0) || !std::isfinite(c)) fail(ErrorKind::InvalidInput, "borel_resum: envelope constants must be finite and >= 0");
  const int m = m_exponent;
  int need = static_cast<int>(envelope.size());
  for (int N : orders) need = std::max(need, m * N + m + 1);
  auto C = [&](int j) { return j < static_cast<int>(envelope.size()) ? envelope[j] : 0.0; };

  BorelResult out;
  if (schedule) {
    if (static_cast<int>(schedule->size()) < need)
      fail(ErrorKind::InvalidInput, "borel_resum: schedule shorter than the series");
    for (std::size_t j = 0; j < schedule->size(); ++j) {
      if (j > 0 && !((*schedule)[j] > (*schedule)[j - 1]))
        fail(ErrorKind::InvalidInput, "borel_resum: lambda schedule must be strictly increasing");
      if ((*schedule)[j] < std::ldexp(C(static_cast<int>(j)), static_cast<int>(j) + 1))
        fail(ErrorKind::InvalidInput, "borel_resum: lambda_j must dominate 2^{j+1} C_j");
    }
    out.lambdas = *schedule;
  } else {
    double prev = 0.0;
    for (int j = 0; j < need; ++j) {
      double lam = std::max(std::ldexp(C(j), j + 1), static_cast<double>(j + 1));
      if (!(lam > prev)) lam = prev * (1.0 + 1e-3);
      out.lambdas.push_back(lam);
      prev = lam;
    }
  }
  const int J = static_cast<int>(out.lambdas.size());

  for (double h : h_grid) {
    if (!(h > 0.0 && h <= 1.0)) fail(ErrorKind::InvalidInput, "borel_resum: h must lie in (0, 1]");
    auto term = [&](int j) { return C(j) * std::pow(h, (j + 1.0) / m); };
    double resummed = 0.0;
    for (int j = 0; j < J; ++j) resummed += borel_cutoff(out.lambdas[j] * h) * term(j);
    for (int N : orders) {
      BorelCertificate cert;
      cert.h = h;
      cert.order = N;
      cert.resummed = resummed;
      for (int j = 0; j <= m * N; ++j) cert.truncated += term(j);
      double head = 0.0, band = 0.0;
      for (int j = 0; j <= m * N; ++j) head += C(j);
      for (int j = m * N + 1; j <= m * N + m; ++j) band += C(j);
      cert.C_N = std::pow(out.lambdas[m * N], N) * head + band + std::ldexp(1.0, -(m * N + m));
      cert.bound = cert.C_N * std::pow(h, N);
      cert.holds = std::abs(cert.resummed - cert.truncated) <= cert.bound;
      out.all_hold = out.all_hold && cert.holds;
      out.certificates.push_back(cert);
    }
  }
  return out;
}

double residual_certify(long k, const std::vector<int>& beta, double z, const std::vector<double>& alphas, double h,
                        const PhaseGrid& grid, int nt) {
  if (beta.size() != alphas.size()) fail(ErrorKind::InvalidInput, "residual_certify: beta and alphas differ in length");
  if (nt < 4 || (nt & (nt - 1)) != 0) fail(ErrorKind::InvalidInput, "residual_certify: nt must be a power of two >= 4");
  if (std::abs(k) >= nt / 2) fail(ErrorKind::GridInadequate, "residual_certify: |k| not resolved by the t grid");
  const HermiteMode v = hermite_mode(beta, h, grid);
  const PhaseGrid& g = v.grid;
  const int N = g.N;
  const std::size_t dims = beta.size();
  std::vector<CMat> Q;
  for (double a : alphas) {
    const double c = 0.5 * a;
    Q.push_back(quantize(RealSymbol([c](double x, double xi) { return c * (x * x + xi * xi); }), g, "osc").matrix);
  }
  // Transverse operator applied to v (one or two dimensions).
  CVec Qv;
  if (dims == 1) {
    Qv = Q[0] * v.values;
  } else {
    const CMat V = Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        v.values.data(), N, N);
    const CMat R = Q[0] * V + V * Q[1].transpose();
    Qv.resize(N * N);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) Qv(i * N + j) = R(i, j);
  }

  // h D_t on e^{2 pi i k t} sampled at t_l, by FFT in t.
  Eigen::FFT<double> fft;
  std::vector<cplx> g_t(nt), spec, dg;
  for (int l = 0; l < nt; ++l) g_t[l] = std::exp(cplx(0.0, 2.0 * std::numbers::pi * k * l / nt));
  fft.fwd(spec, g_t);
  for (int n = 0; n < nt; ++n) {
    const int freq = n <= nt / 2 ? n : n - nt;
    spec[n] *= (n == nt / 2 ? 0.0 : h * 2.0 * std::numbers::pi * freq);
  }
  fft.inv(dg, spec);

  double acc = 0.0;
  for (int l = 0; l < nt; ++l)
    for (Eigen::Index i = 0; i < v.values.size(); ++i) {
      const cplx r = dg[l] * v.values(i) + g_t[l] * (Qv(i) - z * v.values(i));
      acc += std::norm(r);
    }
  const double cell = std::pow(g.dx(), static_cast<double>(dims)) / nt;
  return std::sqrt(acc * cell);
}

}  // namespace semihyp
