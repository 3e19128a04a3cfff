#include "semihyp/experiment.hpp"

#include "semihyp/error.hpp"
#include "semihyp/escape.hpp"
#include "semihyp/geodesic.hpp"
#include "semihyp/monodromy.hpp"
#include "semihyp/quasimode.hpp"
#include "semihyp/symplectic.hpp"

#include <Eigen/Core>

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace semihyp {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

/// Runs f(0..n-1) on up to `jobs` threads; rethrows the first failure.
template <typename F>
void parallel_for(int n, int jobs, F&& f) {
  const int workers = std::max(1, std::min(jobs, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex lock;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> g(lock);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string out_path(const RunContext& ctx, const std::string& name) { return (fs::path(ctx.out_dir) / name).string(); }

void prepare(const RunContext& ctx) {
  if (ctx.format != "csv" && ctx.format != "json") fail(ErrorKind::Config, "--format: expected csv or json");
  if (ctx.jobs < 1) fail(ErrorKind::Config, "--jobs: must be >= 1");
  std::error_code ec;
  fs::create_directories(ctx.out_dir, ec);
  if (ec) fail(ErrorKind::Config, "--out: cannot create " + ctx.out_dir);
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_manifest(const RunContext& ctx, double wall, const std::vector<std::string>& outputs, int exit_code) {
  const std::string canonical = ctx.config.dump();
  json m;
  m["command"] = ctx.command;
  m["config"] = ctx.config;
  m["config_hash"] = "fnv1a64:" + hex64(fnv1a64(canonical));
  m["seed"] = ctx.seed;
  m["jobs"] = ctx.jobs;
  m["format"] = ctx.format;
  m["versions"] = {{"semihyp", kVersion},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"compiler", __VERSION__},
                   {"cxx_standard", static_cast<long>(__cplusplus)}};
  m["wall_time_s"] = wall;
  m["outputs"] = outputs;
  m["exit_code"] = exit_code;
  write_text(out_path(ctx, "manifest.json"), m.dump(2) + "\n");
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

json cplx_json(cplx v) { return json::array({v.real(), v.imag()}); }

json positivity_json(const std::string& name, const PositivityReport& r) {
  json point = json::array();
  for (Eigen::Index i = 0; i < r.argmin_point.size(); ++i) point.push_back(r.argmin_point(i));
  return {{"name", name},
          {"min_ratio", r.min_ratio},
          {"argmin_point", point},
          {"samples", r.samples},
          {"radius", r.radius},
          {"adapted", r.adapted},
          {"adapted_symmetric_min", r.adapted_symmetric_min}};
}

BlockKind parse_kind(const std::string& s, const std::string& field) {
  if (s == "complex-hyperbolic") return BlockKind::ComplexHyperbolic;
  if (s == "real-positive") return BlockKind::RealPositive;
  if (s == "real-negative") return BlockKind::RealNegative;
  fail(ErrorKind::Config, field + ": expected complex-hyperbolic, real-positive or real-negative");
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ClassificationAmbiguous: return kExitAmbiguous;
    case ErrorKind::Config:
    case ErrorKind::InvalidInput:
    case ErrorKind::NotSymplectic:
    case ErrorKind::Unsupported: return kExitConfig;
    case ErrorKind::GridInadequate:
    case ErrorKind::NumericFailure: return kExitNumeric;
  }
  return kExitNumeric;
}

int run_guarded(const std::string& command, int (*body)(const RunContext&), const RunContext& ctx) {
  try {
    return body(ctx);
  } catch (const Error& e) {
    std::cerr << command << ": " << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const json::exception& e) {
    std::cerr << command << ": config: " << e.what() << "\n";
    return kExitConfig;
  }
}

// ---------------------------------------------------------------- classify

int cmd_classify(const std::string& matrix_file, const RunContext& ctx) {
  Stopwatch clock;
  prepare(ctx);
  ConfigReader cfg(ctx.config, "classify");
  ClassifyOptions opts;
  opts.tol_unit = cfg.number("tol_unit", opts.tol_unit);
  opts.ambiguous_factor = cfg.number("ambiguous_factor", opts.ambiguous_factor);
  opts.cluster_gap = cfg.number("cluster_gap", opts.cluster_gap);
  const double tol_factor = cfg.number("tol_factor", 1e-8);
  cfg.finish();
  if (!(opts.tol_unit > 0.0)) fail(ErrorKind::Config, cfg.field("tol_unit") + ": must be positive");

  const SymplecticMatrix dS(read_matrix_file(matrix_file));
  const SpectralClassification cls = classify_spectrum(dS, opts);

  json blocks = json::array();
  for (const auto& b : cls.blocks)
    blocks.push_back({{"kind", to_string(b.kind)},
                      {"mu", cplx_json(b.mu)},
                      {"multiplicity", b.multiplicity},
                      {"lambda", cplx_json(b.lambda)},
                      {"lambda_inverse", cplx_json(b.lambda_inverse)},
                      {"lambda_conjugate", cplx_json(b.lambda_conjugate)},
                      {"krein_sign", b.krein_sign}});
  const bool pass = cls.reconstruction_error <= tol_factor;
  json report{{"n_hc", cls.n_hc},
              {"n_hr_plus", cls.n_hr_plus},
              {"n_hr_minus", cls.n_hr_minus},
              {"n_e", cls.n_e},
              {"blocks", blocks},
              {"B", matrix_to_json(cls.B)},
              {"F", matrix_to_json(cls.F)},
              {"basis", matrix_to_json(cls.basis)},
              {"reconstruction_error", cls.reconstruction_error},
              {"basis_condition", cls.basis_condition},
              {"pass", pass}};
  std::vector<std::string> outputs{"classification.json"};
  write_text(out_path(ctx, "classification.json"), report.dump(2) + "\n");
  if (ctx.format == "csv") {
    CsvWriter csv(out_path(ctx, "blocks.csv"),
                  {"kind", "mu_re", "mu_im", "multiplicity", "lambda_re", "lambda_im", "krein_sign"});
    for (const auto& b : cls.blocks)
      csv.row(std::vector<std::string>{to_string(b.kind), format_double(b.mu.real()), format_double(b.mu.imag()),
                                       std::to_string(b.multiplicity), format_double(b.lambda.real()),
                                       format_double(b.lambda.imag()), std::to_string(b.krein_sign)});
    outputs.push_back("blocks.csv");
  }
  const int code = pass ? kExitPass : kExitNumeric;
  write_manifest(ctx, clock.seconds(), outputs, code);
  return code;
}

// ---------------------------------------------------------------- contract

int cmd_contract(const RunContext& ctx) {
  Stopwatch clock;
  prepare(ctx);
  ConfigReader cfg(ctx.config, "contract");
  ModelParams p;
  p.lambda = cfg.number("lambda", p.lambda);
  p.hbar_tilde = cfg.number("hbar_tilde", p.hbar_tilde);
  p.L = cfg.number("L", p.L);
  p.N = cfg.integer("N", p.N);
  const std::vector<double> hs = cfg.numbers("h_values", {1.0 / 100, 1.0 / 200, 1.0 / 400, 1.0 / 800});
  const std::vector<double> ss = cfg.numbers("s_values", {0.0, 0.1, 0.2, 0.3});
  ContractionOptions opts;
  opts.cutoff_width = cfg.number("cutoff_width", opts.cutoff_width);
  opts.cutoff_threshold = cfg.number("cutoff_threshold", opts.cutoff_threshold);
  opts.gap_width = cfg.number("gap_width", opts.gap_width);
  const double unitarity_tol = cfg.number("unitarity_tol", 1e-9);
  cfg.finish();

  if (hs.empty()) fail(ErrorKind::Config, cfg.field("h_values") + ": must not be empty");
  if (ss.empty()) fail(ErrorKind::Config, cfg.field("s_values") + ": must not be empty");
  for (std::size_t i = 0; i < hs.size(); ++i) {
    p.h = hs[i];
    try {
      p.validate();
    } catch (const Error& e) {
      fail(ErrorKind::Config, cfg.field("h_values") + "[" + std::to_string(i) + "]: " + e.what());
    }
  }
  for (std::size_t i = 0; i < ss.size(); ++i)
    if (!(std::abs(ss[i]) <= 0.5))
      fail(ErrorKind::Config, cfg.field("s_values") + "[" + std::to_string(i) + "]: |s| must be <= 1/2");
  if (!(opts.cutoff_width > 0.0)) fail(ErrorKind::Config, cfg.field("cutoff_width") + ": must be positive");
  if (!(opts.cutoff_threshold > 0.0 && opts.cutoff_threshold <= 1.0))
    fail(ErrorKind::Config, cfg.field("cutoff_threshold") + ": must lie in (0, 1]");
  if (!(opts.gap_width > 0.0)) fail(ErrorKind::Config, cfg.field("gap_width") + ": must be positive");

  p.h = hs.front();
  p.s = ss.front();
  const HyperbolicModel model(p, opts);
  std::vector<MonodromyResult> by_s(ss.size());
  std::vector<double> gaps(hs.size());
  std::vector<Eigen::Index> gap_dims(hs.size());
  parallel_for(static_cast<int>(ss.size()), ctx.jobs, [&](int i) { by_s[i] = model.contraction(ss[i]); });
  parallel_for(static_cast<int>(hs.size()), ctx.jobs, [&](int i) { gaps[i] = model.gap(hs[i], &gap_dims[i]); });
  double gap_C = std::numeric_limits<double>::quiet_NaN();
  double gap_N = std::numeric_limits<double>::quiet_NaN();
  if (hs.size() >= 2) {
    const GapFit fit = fit_gap(hs, gaps);
    gap_C = fit.C;
    gap_N = fit.N;
  }

  bool pass = model.unitarity_defect() <= unitarity_tol;
  std::vector<std::string> failures;
  for (const auto& r : by_s)
    if (r.s > 0.0 && !(r.norm_conjugated < 1.0)) {
      pass = false;
      std::ostringstream msg;
      msg << "contraction failure at (hbar_tilde, s) = (" << p.hbar_tilde << ", " << r.s << "): r = "
          << format_double(r.norm_conjugated);
      failures.push_back(msg.str());
    }

  std::vector<std::string> outputs;
  if (ctx.format == "csv") {
    CsvWriter csv(out_path(ctx, "contract.csv"), {"h", "hbar_tilde", "s", "r", "gap_C", "gap_N", "unitarity_defect"});
    for (double h : hs)
      for (const auto& r : by_s) csv.row({h, p.hbar_tilde, r.s, r.norm_conjugated, gap_C, gap_N, r.unitarity_defect});
    outputs.push_back("contract.csv");
  } else {
    json rows = json::array();
    for (double h : hs)
      for (const auto& r : by_s)
        rows.push_back({{"h", h},
                        {"hbar_tilde", p.hbar_tilde},
                        {"s", r.s},
                        {"r", r.norm_conjugated},
                        {"gap_C", gap_C},
                        {"gap_N", gap_N},
                        {"unitarity_defect", r.unitarity_defect}});
    write_text(out_path(ctx, "contract.json"), json{{"rows", rows}}.dump(2) + "\n");
    outputs.push_back("contract.json");
  }
  json detail = json::array();
  for (const auto& r : by_s)
    detail.push_back({{"s", r.s},
                      {"r", r.norm_conjugated},
                      {"r_inverse", r.norm_inverse_conjugated},
                      {"numerical_range_min", r.conjugated_numerical_min},
                      {"subspace_dim", r.subspace_dim}});
  json gap_rows = json::array();
  for (std::size_t i = 0; i < hs.size(); ++i)
    gap_rows.push_back({{"h", hs[i]}, {"gap", gaps[i]}, {"subspace_dim", gap_dims[i]}});
  write_text(out_path(ctx, "contract_summary.json"),
             json{{"contraction", detail},
                  {"gap", gap_rows},
                  {"gap_fit", {{"C", gap_C}, {"N", gap_N}}},
                  {"unitarity_defect", model.unitarity_defect()},
                  {"failures", failures},
                  {"pass", pass}}
                     .dump(2) +
                 "\n");
  outputs.push_back("contract_summary.json");
  for (const auto& f : failures) std::cerr << "contract: " << f << "\n";
  const int code = pass ? kExitPass : kExitNumeric;
  write_manifest(ctx, clock.seconds(), outputs, code);
  return code;
}

// ---------------------------------------------------------------- ladder

namespace {

std::vector<std::vector<double>> coefficient_rows(ConfigReader& cfg, const std::string& key) {
  std::vector<std::vector<double>> out;
  if (!cfg.has(key)) {
    cfg.numbers(key, {});  // mark as read
    return out;
  }
  const json& a = cfg.child(key);
  if (!a.is_array()) fail(ErrorKind::Config, cfg.field(key) + ": expected an array of arrays");
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::string f = cfg.field(key) + "[" + std::to_string(i) + "]";
    if (!a[i].is_array()) fail(ErrorKind::Config, f + ": expected an array of numbers");
    std::vector<double> row;
    for (std::size_t j = 0; j < a[i].size(); ++j) {
      if (!a[i][j].is_number()) fail(ErrorKind::Config, f + "[" + std::to_string(j) + "]: expected a number");
      row.push_back(a[i][j].get<double>());
    }
    out.push_back(row);
  }
  return out;
}

}  // namespace

int cmd_ladder(const RunContext& ctx) {
  Stopwatch clock;
  prepare(ctx);
  ConfigReader cfg(ctx.config, "ladder");
  const std::vector<double> alphas = cfg.numbers("alphas", {1.0});
  const std::vector<double> hs = cfg.numbers("h_values", {1e-2, 1e-3, 1e-4});
  const int m = cfg.integer("m_exponent", 2);
  const double c0 = cfg.number("c0", 1.0);
  const std::string mode = cfg.text("mode", "exact");
  const int order = cfg.integer("order", 4);
  const auto lambda_coeffs = coefficient_rows(cfg, "lambda_coeffs");
  const auto corrections = coefficient_rows(cfg, "corrections");
  const bool certify = cfg.boolean("certify", false);
  const double L = cfg.number("L", 0.5);
  const int N = cfg.integer("N", 256);
  const int nt = cfg.integer("nt", 32);
  cfg.finish();

  if (alphas.empty()) fail(ErrorKind::Config, cfg.field("alphas") + ": must not be empty");
  for (std::size_t i = 0; i < alphas.size(); ++i)
    if (!(alphas[i] > 0.0)) fail(ErrorKind::Config, cfg.field("alphas") + "[" + std::to_string(i) + "]: must be positive");
  if (hs.empty()) fail(ErrorKind::Config, cfg.field("h_values") + ": must not be empty");
  for (std::size_t i = 0; i < hs.size(); ++i)
    if (!(hs[i] > 0.0 && hs[i] < 1.0))
      fail(ErrorKind::Config, cfg.field("h_values") + "[" + std::to_string(i) + "]: must lie in (0, 1)");
  if (m < 2) fail(ErrorKind::Config, cfg.field("m_exponent") + ": must be > 1");
  if (!(c0 >= 0.0)) fail(ErrorKind::Config, cfg.field("c0") + ": must be nonnegative");
  if (mode != "exact" && mode != "perturbed") fail(ErrorKind::Config, cfg.field("mode") + ": expected exact or perturbed");
  if (order < 0) fail(ErrorKind::Config, cfg.field("order") + ": must be >= 0");
  if (!lambda_coeffs.empty() && lambda_coeffs.size() != alphas.size())
    fail(ErrorKind::Config, cfg.field("lambda_coeffs") + ": need one coefficient list per alpha");
  for (std::size_t i = 0; i < corrections.size(); ++i)
    if (corrections[i].size() != alphas.size())
      fail(ErrorKind::Config, cfg.field("corrections") + "[" + std::to_string(i) + "]: need one coefficient per alpha");
  if (certify && alphas.size() > 2) fail(ErrorKind::Config, cfg.field("certify") + ": at most two transverse dimensions");
  PhaseGrid grid;
  try {
    grid = PhaseGrid(L, N, 1.0);
  } catch (const Error& e) {
    fail(ErrorKind::Config, "ladder.grid: " + std::string(e.what()));
  }

  PerturbationModel model;
  for (std::size_t j = 0; j < alphas.size(); ++j) {
    // lambda_j(z) = sum_i c_i z^i, defaulting to the constant alpha_j.
    const std::vector<double> c = lambda_coeffs.empty() ? std::vector<double>{alphas[j]} : lambda_coeffs[j];
    model.lambdas.push_back([c](double z) {
      double acc = 0.0;
      for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
      return acc;
    });
  }
  for (const auto& a : corrections)
    model.corrections.push_back([a](double, const std::vector<double>& I) {
      double acc = 0.0;
      for (std::size_t j = 0; j < a.size(); ++j) acc += a[j] * I[j];
      return acc;
    });

  std::vector<QuasimodeLadder> ladders(hs.size());
  parallel_for(static_cast<int>(hs.size()), ctx.jobs, [&](int i) {
    ladders[i] = mode == "exact" ? exact_model_ladder(alphas, hs[i], m, c0) : perturbed_ladder(model, hs[i], m, c0, order);
    if (certify)
      for (auto& e : ladders[i].entries) e.residual = residual_certify(e.k, e.beta, e.z, alphas, hs[i], grid, nt);
  });

  const double n = static_cast<double>(alphas.size() + 1);
  const double lo = n * (1.0 - 1.0 / m) - 0.25;
  const double hi = n + 0.25;
  json slope = nullptr;
  bool pass = true;
  std::vector<long> counts;
  for (const auto& l : ladders) counts.push_back(l.count);
  if (hs.size() >= 2 && std::all_of(counts.begin(), counts.end(), [](long c) { return c > 0; })) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    json exps = json::array();
    for (std::size_t i = 0; i < hs.size(); ++i) {
      const double x = std::log(1.0 / hs[i]);
      const double y = std::log(static_cast<double>(counts[i]));
      exps.push_back(y / x);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double k = static_cast<double>(hs.size());
    const double fit = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    pass = fit >= lo && fit <= hi;
    slope = {{"slope", fit}, {"exponents", exps}, {"bracket", {lo, hi}}, {"within_bracket", pass}};
  }

  std::vector<std::string> header{"h", "k"};
  for (std::size_t j = 0; j < alphas.size(); ++j) header.push_back("beta_" + std::to_string(j + 1));
  header.push_back("z");
  header.push_back("residual");
  std::vector<std::string> outputs;
  if (ctx.format == "csv") {
    CsvWriter csv(out_path(ctx, "ladder.csv"), header);
    for (std::size_t i = 0; i < hs.size(); ++i)
      for (const auto& e : ladders[i].entries) {
        std::vector<std::string> cells{format_double(hs[i]), std::to_string(e.k)};
        for (int b : e.beta) cells.push_back(std::to_string(b));
        cells.push_back(format_double(e.z));
        cells.push_back(format_double(e.residual));
        csv.row(cells);
      }
    outputs.push_back("ladder.csv");
  } else {
    json rows = json::array();
    for (std::size_t i = 0; i < hs.size(); ++i)
      for (const auto& e : ladders[i].entries)
        rows.push_back({{"h", hs[i]}, {"k", e.k}, {"beta", e.beta}, {"z", e.z}, {"residual", e.residual}});
    write_text(out_path(ctx, "ladder.json"), json{{"rows", rows}}.dump(2) + "\n");
    outputs.push_back("ladder.json");
  }
  json summary{{"h", hs}, {"m", m}, {"c0", c0}, {"N", counts}, {"mode", mode}, {"slope_diagnostics", slope}};
  write_text(out_path(ctx, "ladder_summary.json"), summary.dump(2) + "\n");
  outputs.push_back("ladder_summary.json");
  const int code = pass ? kExitPass : kExitNumeric;
  write_manifest(ctx, clock.seconds(), outputs, code);
  return code;
}

// ---------------------------------------------------------------- geodesic

int cmd_geodesic(const RunContext& ctx) {
  Stopwatch clock;
  prepare(ctx);
  ConfigReader cfg(ctx.config, "geodesic");
  const std::vector<double> orbits = cfg.numbers("orbits", {0.0, 0.5, -0.5});
  const double step = cfg.number("step", 1e-4);
  const double vx0 = cfg.number("vx0", 0.0);
  double y0 = 0.0, z0 = 0.0, dy = 0.0, dz = 1e-3, periods = 3.0, bound = 10.0;
  int stride = 100;
  if (cfg.has("trajectory")) {
    ConfigReader t(cfg.child("trajectory"), cfg.field("trajectory"));
    y0 = t.number("y0", y0);
    z0 = t.number("z0", z0);
    dy = t.number("dy", dy);
    dz = t.number("dz", dz);
    periods = t.number("periods", periods);
    stride = t.integer("stride", stride);
    bound = t.number("bound", bound);
    t.finish();
  } else {
    cfg.numbers("trajectory", {});
  }
  cfg.finish();
  if (!(step > 0.0 && step <= 0.1)) fail(ErrorKind::Config, cfg.field("step") + ": must lie in (0, 0.1]");
  if (!(vx0 >= 0.0)) fail(ErrorKind::Config, cfg.field("vx0") + ": must be >= 0 (0 selects unit speed)");
  if (!(periods > 0.0)) fail(ErrorKind::Config, "geodesic.trajectory.periods: must be positive");
  if (stride < 1) fail(ErrorKind::Config, "geodesic.trajectory.stride: must be >= 1");
  if (!(bound > 0.0)) fail(ErrorKind::Config, "geodesic.trajectory.bound: must be positive");

  std::vector<PoincareReport> reports(orbits.size());
  parallel_for(static_cast<int>(orbits.size()), ctx.jobs,
               [&](int i) { reports[i] = poincare_linearization(orbits[i], vx0, step); });

  bool pass = true;
  json poincare = json::array();
  for (const auto& r : reports) {
    json mult = json::array();
    for (const cplx& m : r.multipliers) mult.push_back(cplx_json(m));
    Mat mono = r.monodromy;
    poincare.push_back({{"z0", r.z0},
                        {"vx0", r.vx0},
                        {"period", r.period},
                        {"multipliers", mult},
                        {"verdict", r.verdict},
                        {"closure_residual", r.closure_residual},
                        {"symplectic_defect", r.symplectic_defect},
                        {"determinant", r.determinant},
                        {"energy_drift", r.energy_drift},
                        {"monodromy", json::parse(matrix_to_json_text(mono))["rows"]}});
    if (r.symplectic_defect > 1e-6) pass = false;
  }
  json crit = json::array();
  for (double z : {0.0, 0.5, -0.5}) {
    const Eigen::Vector2d pt = find_critical_point(Eigen::Vector2d(0.0, z));
    crit.push_back({{"seed", {0.0, z}}, {"point", {pt(0), pt(1)}}, {"signature", hessian_signature(pt)}});
  }

  const WarpedMetric g;
  const double speed = vx0 > 0.0 ? vx0 : 1.0 / g.w(y0, z0);
  GeodesicState s0;
  s0 << 0.0, y0 + dy, z0 + dz, speed, 0.0, 0.0;
  const Trajectory tr = integrate(s0, periods / speed, step, stride, bound);
  if (tr.truncated) pass = false;

  std::vector<std::string> outputs;
  const std::vector<std::string> header{"t", "x", "y", "z", "vx", "vy", "vz", "energy"};
  if (ctx.format == "csv") {
    CsvWriter csv(out_path(ctx, "trajectory.csv"), header);
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
      const auto& s = tr.states[i];
      csv.row({tr.t[i], s(0) - std::floor(s(0)), s(1), s(2), s(3), s(4), s(5), energy(s)});
    }
    outputs.push_back("trajectory.csv");
  } else {
    json rows = json::array();
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
      const auto& s = tr.states[i];
      rows.push_back({tr.t[i], s(0) - std::floor(s(0)), s(1), s(2), s(3), s(4), s(5), energy(s)});
    }
    write_text(out_path(ctx, "trajectory.json"), json{{"columns", header}, {"rows", rows}}.dump(2) + "\n");
    outputs.push_back("trajectory.json");
  }
  write_text(out_path(ctx, "poincare.json"),
             json{{"orbits", poincare},
                  {"critical_points", crit},
                  {"trajectory", {{"truncated", tr.truncated}, {"max_energy_drift", tr.max_energy_drift}}}}
                     .dump(2) +
                 "\n");
  outputs.push_back("poincare.json");
  if (tr.truncated) std::cerr << "geodesic: trajectory left |y|, |z| <= " << bound << "; truncated\n";
  const int code = pass ? kExitPass : kExitNumeric;
  write_manifest(ctx, clock.seconds(), outputs, code);
  return code;
}

// ---------------------------------------------------------------- positivity

namespace {

struct PositivityCase {
  std::string name;
  QuadraticForm q;
};

std::vector<PositivityCase> default_positivity_cases() {
  std::vector<PositivityCase> out;
  out.push_back({"model x xi", hyperbolic_normal_form({{BlockKind::RealPositive, 1.0}})});
  out.push_back({"2 x1 xi1 + 3 x2 xi2",
                 hyperbolic_normal_form({{BlockKind::RealPositive, 2.0}, {BlockKind::RealPositive, 3.0}})});
  out.push_back({"complex 1+5i", hyperbolic_normal_form({{BlockKind::ComplexHyperbolic, cplx(1.0, 5.0)}})});
  out.push_back({"jordan k=3 lambda=0.2", hyperbolic_normal_form({{BlockKind::RealPositive, 0.2, 3}})});
  Mat dS = Mat::Zero(4, 4);
  dS(0, 0) = -2.0;
  dS(2, 2) = -0.5;
  dS(1, 1) = dS(3, 3) = std::cos(1.0);
  dS(1, 3) = std::sin(1.0);
  dS(3, 1) = -std::sin(1.0);
  out.push_back({"real-negative + elliptic", hyperbolic_part(classify_spectrum(SymplecticMatrix(dS)))});
  return out;
}

}  // namespace

int cmd_positivity(const RunContext& ctx) {
  Stopwatch clock;
  prepare(ctx);
  ConfigReader cfg(ctx.config, "positivity");
  PositivityOptions opts;
  opts.samples = cfg.integer("samples", opts.samples);
  opts.radius = cfg.number("radius", opts.radius);
  opts.sweep_max = cfg.number("sweep_max", opts.sweep_max);
  opts.sweep_points = cfg.integer("sweep_points", opts.sweep_points);
  std::vector<PositivityCase> cases;
  if (cfg.has("cases")) {
    const json& list = cfg.child("cases");
    if (!list.is_array()) fail(ErrorKind::Config, cfg.field("cases") + ": expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string path = cfg.field("cases") + "[" + std::to_string(i) + "]";
      ConfigReader c(list[i], path);
      PositivityCase pc;
      pc.name = c.text("name", "case " + std::to_string(i));
      if (c.has("matrix")) {
        const Mat A = matrix_from_json(c.child("matrix"), c.field("matrix"));
        pc.q = hyperbolic_part(classify_spectrum(SymplecticMatrix(A)));
      } else {
        const json& blocks = c.child("blocks");
        if (!blocks.is_array() || blocks.empty()) fail(ErrorKind::Config, c.field("blocks") + ": expected a nonempty array");
        std::vector<HyperbolicBlockSpec> specs;
        for (std::size_t b = 0; b < blocks.size(); ++b) {
          ConfigReader br(blocks[b], c.field("blocks") + "[" + std::to_string(b) + "]");
          HyperbolicBlockSpec s;
          s.kind = parse_kind(br.text("kind", "real-positive"), br.field("kind"));
          const std::vector<double> lam = br.numbers("lambda", {1.0});
          if (lam.empty() || lam.size() > 2) fail(ErrorKind::Config, br.field("lambda") + ": expected [re] or [re, im]");
          s.lambda = cplx(lam[0], lam.size() > 1 ? lam[1] : 0.0);
          if (!(s.lambda.real() > 0.0)) fail(ErrorKind::Config, br.field("lambda") + ": real part must be positive");
          s.multiplicity = br.integer("multiplicity", 1);
          s.coupling = br.number("coupling", 1.0);
          br.finish();
          specs.push_back(s);
        }
        pc.q = hyperbolic_normal_form(specs);
      }
      c.finish();
      cases.push_back(std::move(pc));
    }
  } else {
    cfg.numbers("cases", {});
    cases = default_positivity_cases();
  }
  cfg.finish();
  if (opts.samples < 1) fail(ErrorKind::Config, cfg.field("samples") + ": must be >= 1");
  if (!(opts.radius > 0.0)) fail(ErrorKind::Config, cfg.field("radius") + ": must be positive");

  std::vector<PositivityReport> reports(cases.size());
  parallel_for(static_cast<int>(cases.size()), ctx.jobs, [&](int i) {
    PositivityOptions o = opts;
    o.seed = ctx.seed + static_cast<std::uint64_t>(i);
    reports[i] = verify_positivity(cases[i].q, o);
  });
  bool pass = true;
  json list = json::array();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    list.push_back(positivity_json(cases[i].name, reports[i]));
    if (!(reports[i].min_ratio > 0.0)) {
      pass = false;
      std::cerr << "positivity: counterexample for " << cases[i].name << ", min ratio "
                << format_double(reports[i].min_ratio) << "\n";
    }
  }
  std::vector<std::string> outputs{"positivity.json"};
  write_text(out_path(ctx, "positivity.json"), json{{"cases", list}, {"pass", pass}}.dump(2) + "\n");
  if (ctx.format == "csv") {
    CsvWriter csv(out_path(ctx, "positivity.csv"), {"name", "min_ratio", "samples", "radius"});
    for (std::size_t i = 0; i < cases.size(); ++i)
      csv.row(std::vector<std::string>{cases[i].name, format_double(reports[i].min_ratio),
                                       std::to_string(reports[i].samples), format_double(reports[i].radius)});
    outputs.push_back("positivity.csv");
  }
  const int code = pass ? kExitPass : kExitNumeric;
  write_manifest(ctx, clock.seconds(), outputs, code);
  return code;
}

}  // namespace semihyp
