#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "semdot/config.hpp"
#include "semdot/runner.hpp"
#include "semdot/writers.hpp"

namespace fs = std::filesystem;

namespace {

struct CliOverrides {
  std::string preset, config_path, mode, optimizer, out_dir;
  int nx = -1, ny = -1, max_iter = -1, grid = -1;
  double rmin = -1, upsilon = -1, volfrac = -1, tau = -1, epsilon = -1;
  double beta0 = -1, lambda = -1, penalty = -1;
  bool symmetry = false;
  bool quiet = false;
};

void add_common_flags(CLI::App* cmd, CliOverrides& o) {
  cmd->add_option("--preset", o.preset, "problem preset name");
  cmd->add_option("--config", o.config_path, "key = value configuration file");
  cmd->add_option("--rmin", o.rmin, "element filter radius (element widths)");
  cmd->add_option("--upsilon", o.upsilon, "nodal filter radius (element widths)");
  cmd->add_option("--mode", o.mode, "projection mode: step | smooth");
  cmd->add_option("--optimizer", o.optimizer, "update scheme: mma | oc | simp-d");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--nx", o.nx, "elements along x");
  cmd->add_option("--ny", o.ny, "elements along y");
  cmd->add_option("--volfrac", o.volfrac, "target volume fraction");
  cmd->add_option("--grid", o.grid, "grid points per element per axis");
  cmd->add_option("--max-iter", o.max_iter, "iteration cap");
  cmd->add_option("--tau", o.tau, "topological alteration tolerance");
  cmd->add_option("--epsilon", o.epsilon, "boundary error tolerance");
  cmd->add_option("--beta0", o.beta0, "initial projection steepness");
  cmd->add_option("--lambda", o.lambda, "steepness increment per iteration");
  cmd->add_option("--penalty", o.penalty, "penalty exponent");
  cmd->add_flag("--symmetry", o.symmetry, "mirror-enforce the design about x = nx/2");
  cmd->add_flag("--quiet", o.quiet, "suppress per-iteration output");
}

semdot::RunConfig resolve(const CliOverrides& o) {
  semdot::RunConfig cfg;
  if (!o.config_path.empty()) cfg = semdot::load_config(o.config_path);
  if (!o.preset.empty()) cfg.preset = o.preset;
  if (o.nx >= 0) cfg.nx = o.nx;
  if (o.ny >= 0) cfg.ny = o.ny;
  if (o.volfrac >= 0) cfg.volfrac = o.volfrac;
  if (o.rmin >= 0) cfg.rmin = o.rmin;
  if (o.upsilon >= 0) cfg.upsilon = o.upsilon;
  if (o.grid >= 0) cfg.grid = o.grid;
  if (o.max_iter >= 0) cfg.max_iter = o.max_iter;
  if (o.tau >= 0) cfg.tau = o.tau;
  if (o.epsilon >= 0) cfg.epsilon = o.epsilon;
  if (o.beta0 >= 0) cfg.beta0 = o.beta0;
  if (o.lambda >= 0) cfg.lambda = o.lambda;
  if (o.penalty >= 0) cfg.penalty = o.penalty;
  if (!o.mode.empty()) cfg.mode = o.mode;
  if (!o.optimizer.empty()) cfg.optimizer = o.optimizer;
  if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
  if (o.symmetry) cfg.symmetry = true;
  cfg.validate();
  if (cfg.preset.empty())
    throw semdot::ConfigError("no preset selected (use --preset or a config file)");
  return cfg;
}

semdot::RunResult execute(const semdot::RunConfig& cfg, bool quiet) {
  semdot::ProblemDefinition problem = cfg.problem();
  semdot::RunParams params = cfg.params();
  if (!quiet) {
    params.on_iteration = [](const semdot::IterationRecord& r) {
      std::printf("it %4d  obj %12.4f  vol %8.4f  change %8.5f  berr %8.5f  beta %7.1f\n",
                  r.iter, r.objective, r.volume, r.alteration, r.boundary_error, r.beta);
      std::fflush(stdout);
    };
  }
  if (params.optimizer == semdot::OptimizerChoice::simp_d)
    return run_simp_baseline(problem, params);
  return run_semdot(problem, params);
}

void write_outputs(const semdot::RunConfig& cfg, const semdot::RunResult& result,
                   const fs::path& dir) {
  fs::create_directories(dir);
  const semdot::Mesh mesh = cfg.problem().mesh();
  semdot::write_history(result.history, (dir / "history.csv").string());
  semdot::write_design_field(result.x_new, mesh, (dir / "design.txt").string(),
                             semdot::FieldFormat::text);
  semdot::write_design_field(result.x_new, mesh, (dir / "design.vti").string(),
                             semdot::FieldFormat::vti);
  semdot::write_boundary_svg(result.boundary, mesh, cfg.grid, (dir / "boundary.svg").string());
  semdot::write_run_json(cfg, result, (dir / "run.json").string());
}

int run_command(const CliOverrides& o) {
  const semdot::RunConfig cfg = resolve(o);
  const semdot::RunResult result = execute(cfg, o.quiet);
  write_outputs(cfg, result, cfg.out_dir);
  std::printf("%s: %s after %d iterations, objective %.4f -> %s\n", cfg.preset.c_str(),
              result.history.converged ? "converged" : "iteration cap reached",
              result.iterations, result.objective, cfg.out_dir.c_str());
  return result.history.converged ? 0 : 2;
}

std::vector<double> parse_range(const std::string& text) {
  double a = 0, b = 0, s = 0;
  if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &a, &b, &s) != 3 || s <= 0 || b < a)
    throw semdot::ConfigError("range must be start:stop:step with step > 0: " + text);
  std::vector<double> values;
  for (double v = a; v <= b + 1e-9; v += s) values.push_back(v);
  return values;
}

int sweep_command(const CliOverrides& o, const std::string& rmin_range,
                  const std::string& upsilon_range) {
  semdot::RunConfig base = resolve(o);
  const std::vector<double> rmins =
      rmin_range.empty() ? std::vector<double>{base.rmin} : parse_range(rmin_range);
  const std::vector<double> upsilons =
      upsilon_range.empty() ? std::vector<double>{base.upsilon} : parse_range(upsilon_range);

  const fs::path dir = base.out_dir;
  fs::create_directories(dir);
  std::FILE* summary = std::fopen((dir / "sweep.csv").string().c_str(), "w");
  if (!summary) throw semdot::IoError("cannot open sweep.csv for writing");
  std::fprintf(summary, "rmin,upsilon,objective,iterations,converged\n");

  bool all_converged = true;
  for (double r : rmins) {
    for (double u : upsilons) {
      semdot::RunConfig cfg = base;
      cfg.rmin = r;
      cfg.upsilon = u;
      char sub[64];
      std::snprintf(sub, sizeof(sub), "r%.2f_u%.2f", r, u);
      cfg.out_dir = (dir / sub).string();
      std::printf("sweep %s: rmin=%.2f upsilon=%.2f\n", cfg.preset.c_str(), r, u);
      const semdot::RunResult result = execute(cfg, true);
      write_outputs(cfg, result, cfg.out_dir);
      std::fprintf(summary, "%.6f,%.6f,%.6f,%d,%d\n", r, u, result.objective,
                   result.iterations, result.history.converged ? 1 : 0);
      std::fflush(summary);
      std::printf("  -> objective %.4f in %d iterations%s\n", result.objective,
                  result.iterations, result.history.converged ? "" : " (cap)");
      all_converged = all_converged && result.history.converged;
    }
  }
  std::fclose(summary);
  return all_converged ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topology optimization with elemental volume fractions and smooth boundaries"};
  app.require_subcommand(1);

  CliOverrides run_opts;
  CLI::App* run = app.add_subcommand("run", "solve one problem");
  add_common_flags(run, run_opts);

  CliOverrides sweep_opts;
  std::string rmin_range, upsilon_range;
  CLI::App* sweep = app.add_subcommand("sweep", "filter-radius sweep");
  add_common_flags(sweep, sweep_opts);
  sweep->add_option("--rmin-range", rmin_range, "start:stop:step");
  sweep->add_option("--upsilon-range", upsilon_range, "start:stop:step");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(run_opts);
    if (sweep->parsed()) return sweep_command(sweep_opts, rmin_range, upsilon_range);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
