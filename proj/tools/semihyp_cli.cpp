// semihyp: experiment driver for the semi-hyperbolic toolkit.
#include "semihyp/experiment.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace semihyp;

namespace {

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Config, "--config: cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  json cfg;
  try {
    cfg = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    fail(ErrorKind::Config, "--config: " + std::string(e.what()));
  }
  if (!cfg.is_object()) fail(ErrorKind::Config, "--config: top level must be an object");
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semihyp: normal forms, model monodromy, quasimode ladders and geodesic checks"};
  app.require_subcommand(1);

  std::string config_path;
  std::string matrix_path;
  RunContext ctx;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON experiment config");
    sub->add_option("--out", ctx.out_dir, "output directory")->capture_default_str();
    sub->add_option("--format", ctx.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sub->add_option("--seed", ctx.seed, "random seed")->capture_default_str();
    sub->add_option("--jobs", ctx.jobs, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  };

  auto* classify = app.add_subcommand("classify", "classify a symplectic matrix and emit B, F");
  classify->add_option("--matrix,matrix", matrix_path, "matrix JSON file")->required();
  common(classify);
  auto* contract = app.add_subcommand("contract", "conjugated contraction sweep of the model monodromy");
  common(contract);
  auto* ladder = app.add_subcommand("ladder", "elliptic quasimode ladder and counting slope");
  common(ladder);
  auto* geodesic = app.add_subcommand("geodesic", "closed geodesics of the warped torus metric");
  common(geodesic);
  auto* positivity = app.add_subcommand("positivity", "escape function positivity checks");
  common(positivity);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  ctx.command = sub->get_name();
  try {
    ctx.config = load_config(config_path);
  } catch (const Error& e) {
    std::cerr << ctx.command << ": " << e.what() << "\n";
    return kExitConfig;
  }

  if (sub == classify) {
    const std::string file = matrix_path;
    try {
      return cmd_classify(file, ctx);
    } catch (const Error& e) {
      std::cerr << "classify: " << to_string(e.kind()) << ": " << e.what() << "\n";
      return exit_code_for(e.kind());
    }
  }
  if (sub == contract) return run_guarded("contract", cmd_contract, ctx);
  if (sub == ladder) return run_guarded("ladder", cmd_ladder, ctx);
  if (sub == geodesic) return run_guarded("geodesic", cmd_geodesic, ctx);
  return run_guarded("positivity", cmd_positivity, ctx);
}
