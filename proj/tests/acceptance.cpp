// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include "semihyp/escape.hpp"
#include "semihyp/error.hpp"
#include "semihyp/geodesic.hpp"
#include "semihyp/monodromy.hpp"
#include "semihyp/quasimode.hpp"
#include "semihyp/schedule.hpp"
#include "semihyp/symplectic.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace semihyp;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = dt <= budget_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("criterion %2d %-28s %s  %s; %.2f s of %.0f s\n", id, name, pass ? "PASS" : "FAIL", o.detail.c_str(), dt,
              budget_s);
  std::fflush(stdout);
}

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.4g", v);
  return b;
}

Mat diag2(double a, double b) {
  Mat D = Mat::Zero(2, 2);
  D(0, 0) = a;
  D(1, 1) = b;
  return D;
}

Mat from_bilinear(const Mat& C) {
  const Eigen::Index n = C.rows();
  Mat S = Mat::Zero(2 * n, 2 * n);
  S.block(0, n, n, n) = C.transpose();
  S.block(n, 0, n, n) = C;
  return expm(hamiltonian_matrix(S));
}

Mat rk4_flow(const MatrixFunction& A, Eigen::Index dim, int steps) {
  Mat phi = Mat::Identity(dim, dim);
  const double dt = 1.0 / steps;
  for (int i = 0; i < steps; ++i) {
    const double t = i * dt;
    Mat k1 = A(t) * phi;
    Mat k2 = A(t + dt / 2) * (phi + dt / 2 * k1);
    Mat k3 = A(t + dt / 2) * (phi + dt / 2 * k2);
    Mat k4 = A(t + dt) * (phi + dt * k3);
    phi += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return phi;
}

}  // namespace

int main() {
  criterion(1, "symplectic factorization", 10, [] {
    std::mt19937_64 rng(1);
    double worst = 0.0;
    int classified = 0, refused = 0, branch_bad = 0;
    for (Eigen::Index m : {1, 2, 3})
      for (int i = 0; i < 100; ++i) {
        const Mat K = random_symplectic(m, rng);
        try {
          const auto c = classify_spectrum(SymplecticMatrix(K, 1e-8));
          const Mat T = c.basis;
          const Mat E = expm(Mat(-standard_form(2 * m) * c.F)) * expm(c.B);
          worst = std::max(worst, (T * E * T.inverse() - K).norm() / K.norm());
          worst = std::max(worst, c.reconstruction_error);
          for (const auto& b : c.blocks)
            if (b.lambda_inverse != -b.lambda || b.lambda_conjugate != std::conj(b.lambda)) ++branch_bad;
          ++classified;
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::ClassificationAmbiguous) throw;
          ++refused;
        }
      }
    return Outcome{worst <= 1e-8 && branch_bad == 0 && classified > 0,
                   "max rel error " + fmt(worst) + ", " + std::to_string(classified) + " classified, " +
                       std::to_string(refused) + " refused as unit-circle ambiguous, branch violations " +
                       std::to_string(branch_bad)};
  });

  criterion(2, "harmonic-oscillator bound", 60, [] {
    bool ok = true;
    double worst = 0.0, lo = 1e9, hi = 0.0;
    for (double hb : {0.05, 0.1, 0.2}) {
      const PhaseGrid g(10.0, 512, hb);
      const double e0 = min_eigenvalue(quantize(RealSymbol([](double x, double xi) { return x * x + xi * xi; }), g));
      worst = std::max(worst, std::abs(e0 / hb - 1.0));
      const double a0 = min_eigenvalue(
          quantize(RealSymbol([](double x, double xi) { return x * x / (1 + x * x) + xi * xi / (1 + xi * xi); }), g));
      lo = std::min(lo, a0 / hb);
      hi = std::max(hi, a0 / hb);
    }
    ok = worst <= 0.01 && lo > 0.0 && hi / lo <= 1.2;
    return Outcome{ok, "oscillator rel error " + fmt(worst) + ", a0 ratio in [" + fmt(lo) + ", " + fmt(hi) + "]"};
  });

  ModelParams base;  // lambda 1, hbar~ 0.2, s 0.3, L 12, N 1024
  const std::vector<double> hs{1.0 / 100, 1.0 / 200, 1.0 / 400, 1.0 / 800};
  std::vector<double> gaps_coarse;
  criterion(3, "model contraction", 300, [&] {
    const HyperbolicModel model(base);
    double rmax = 0.0, rmin = 1e9;
    for (double h : hs) {
      const auto r = model.evaluate(h, base.s);
      rmax = std::max(rmax, r.norm_conjugated);
      rmin = std::min(rmin, r.norm_conjugated);
      gaps_coarse.push_back(r.gap);
    }
    const double defect = model.unitarity_defect();
    return Outcome{rmax < 1.0 && rmax - rmin <= 1e-12 && defect <= 1e-9,
                   "r_max " + fmt(rmax) + " (spread " + fmt(rmax - rmin) + "), unitarity defect " + fmt(defect)};
  });

  criterion(4, "spectral gap exponent", 300, [&] {
    if (gaps_coarse.size() != hs.size()) return Outcome{false, "criterion 3 did not produce gaps"};
    const GapFit a = fit_gap(hs, gaps_coarse);
    ModelParams fine = base;
    fine.N = 2 * base.N;
    const HyperbolicModel model(fine);
    std::vector<double> g;
    for (double h : hs) g.push_back(model.gap(h));
    const GapFit b = fit_gap(hs, g);
    const bool ok = std::isfinite(a.N) && std::isfinite(b.N) && std::abs(a.N - b.N) <= 0.3;
    return Outcome{ok, "N = " + fmt(a.N) + " at N_grid " + std::to_string(base.N) + ", " + fmt(b.N) + " at " +
                           std::to_string(fine.N)};
  });

  criterion(5, "elliptic ladder exactness", 60, [] {
    const double alpha = 1.0, h = 1e-3;
    const auto ladder = exact_model_ladder({alpha}, h, 2, 1.0);
    const PhaseGrid g(0.5, 256, h);
    const CMat M0 = build_elliptic_monodromy(alpha, 0.0, g);
    double worst = 0.0, zerr = 0.0;
    for (const auto& e : ladder.entries) {
      const CVec v = hermite_mode(e.beta, h, g).values;
      // M(z) = e^{iz/h} M(0)
      const CVec Mv = std::exp(cplx(0.0, e.z / h)) * (M0 * v);
      worst = std::max(worst, (Mv - v).norm() * std::sqrt(g.dx()));
      const double closed = 0.5 * alpha * (2 * e.beta[0] + 1) * h + 2 * std::numbers::pi * e.k * h;
      zerr = std::max(zerr, std::abs(e.z - closed) / std::numeric_limits<double>::epsilon() /
                                std::max(std::abs(closed), h));
    }
    return Outcome{worst <= 1e-8 && zerr <= 4.0 && !ladder.entries.empty(),
                   std::to_string(ladder.entries.size()) + " entries, max residual " + fmt(worst) +
                       ", closed-form mismatch " + fmt(zerr) + " ulp"};
  });

  criterion(6, "counting slope", 10, [] {
    const auto f = counting_slope({1.0}, {1e-2, 1e-3, 1e-4}, 2, 1.0);
    bool ok = f.slope >= 0.75 && f.slope <= 2.25;
    std::ostringstream d;
    d << "slope " << fmt(f.slope) << ", N(h) =";
    for (long c : f.count) d << " " << c;
    return Outcome{ok, d.str()};
  });

  criterion(7, "Borel truncation certificates", 10, [] {
    std::vector<double> hgrid;
    for (int i = 0; i <= 30; ++i) hgrid.push_back(std::pow(10.0, -4.0 + 3.0 * i / 30));
    std::vector<double> geo, fact;
    double f = 1.0;
    for (int j = 0; j < 40; ++j) {
      geo.push_back(std::pow(2.0, j));
      if (j > 0) f *= j;
      fact.push_back(f);
    }
    const auto a = borel_resum(geo, hgrid, 2);
    const auto b = borel_resum(fact, hgrid, 2);
    std::size_t n = a.certificates.size() + b.certificates.size(), held = 0;
    for (const auto& c : a.certificates) held += c.holds;
    for (const auto& c : b.certificates) held += c.holds;
    return Outcome{a.all_hold && b.all_hold, std::to_string(held) + "/" + std::to_string(n) + " certificates hold"};
  });

  criterion(8, "geodesic lab", 120, [] {
    bool ok = true;
    double drift = 0.0, defect = 0.0;
    std::string verdicts, sigs;
    const std::vector<std::pair<double, std::string>> expect{{0.0, "semi-hyperbolic"}, {0.5, "hyperbolic"},
                                                             {-0.5, "hyperbolic"}};
    for (const auto& [z0, v] : expect) {
      const auto r = poincare_linearization(z0, 0.0, 1e-4);
      defect = std::max(defect, r.symplectic_defect);
      ok = ok && r.verdict == v;
      verdicts += (verdicts.empty() ? "" : ",") + r.verdict;
      // a perturbed orbit near each base orbit, one period
      GeodesicState s;
      s << 0.0, 1e-2, z0 + 1e-2, 1.0 / WarpedMetric().w(0.0, z0), 1e-2, -1e-2;
      drift = std::max(drift, integrate(s, r.period, 1e-4, 1000).max_energy_drift);
      drift = std::max(drift, r.energy_drift);
      const std::string sig = hessian_signature(find_critical_point(Eigen::Vector2d(0.0, z0)));
      sigs += (sigs.empty() ? "" : ",") + sig;
    }
    ok = ok && sigs == "(-,+),(-,-),(-,-)" && drift <= 1e-8 && defect <= 1e-6;
    return Outcome{ok, "verdicts " + verdicts + "; signatures " + sigs + "; drift " + fmt(drift) + "; defect " +
                           fmt(defect)};
  });

  criterion(9, "reparametrized flow", 5, [] {
    std::mt19937_64 rng(9);
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) {
      const Mat A0 = random_hamiltonian(2, rng), A1 = random_hamiltonian(2, rng);
      const double w = 1.0 + i;
      MatrixFunction A = [A0, A1, w](double t) { return Mat(A0 + std::sin(w * t) * A1 + t * t * A0 * A1); };
      const auto psi = reparametrize_flow(A, 4);
      worst = std::max(worst, (psi.psi_end - rk4_flow(A, 4, 20000)).norm());
    }
    return Outcome{worst <= 1e-8, "max |psi(1) - phi(1)| " + fmt(worst)};
  });

  criterion(10, "escape positivity", 30, [] {
    Mat C(2, 2);
    C << 1.0, 5.0, -5.0, 1.0;
    Mat Cj(2, 2);
    Cj << 0.5, 0.0, 1.0, 0.5;
    Mat mixed = Mat::Zero(4, 4);
    mixed(0, 0) = -2.0;
    mixed(2, 2) = -0.5;
    mixed(1, 1) = mixed(3, 3) = std::cos(1.0);
    mixed(1, 3) = std::sin(1.0);
    mixed(3, 1) = -std::sin(1.0);
    const std::vector<std::pair<std::string, Mat>> cases{{"model", diag2(std::exp(1.0), std::exp(-1.0))},
                                                         {"complex", from_bilinear(C)},
                                                         {"jordan", from_bilinear(Cj)},
                                                         {"negative", diag2(-2.0, -0.5)},
                                                         {"negative+elliptic", mixed}};
    PositivityOptions opts;
    opts.samples = 100000;
    bool ok = true;
    std::string d;
    double model_ratio = 0.0;
    for (std::size_t i = 0; i < cases.size(); ++i) {
      opts.seed = 100 + i;
      const auto cls = classify_spectrum(SymplecticMatrix(cases[i].second, 1e-8));
      const auto r = verify_positivity(hyperbolic_part(cls), opts);
      ok = ok && r.min_ratio > 0.0 && r.samples >= 100000;
      if (i == 0) model_ratio = r.min_ratio;
      d += (d.empty() ? "" : ", ") + cases[i].first + " " + fmt(r.min_ratio);
    }
    ok = ok && std::abs(model_ratio - 1.0) <= 1e-12;
    return Outcome{ok, d + "; model |ratio - 1| " + fmt(std::abs(model_ratio - 1.0))};
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
