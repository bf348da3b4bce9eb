// Command-line driver for the elliptic parameter-identification experiment.
//
//   sesop_cli run   --method A|B --delta 5e-4 --out report.json
//   sesop_cli synth --n 50 --out-dir data/
//   sesop_cli check --n-recon 20
//   sesop_cli sweep --out-dir results/

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "sesop/bregman.hpp"
#include "sesop/elliptic.hpp"
#include "sesop/experiment.hpp"
#include "sesop/lp_space.hpp"

namespace fs = std::filesystem;
using namespace sesop;

namespace {

void add_config_flags(CLI::App& app, ExperimentConfig& cfg, std::string& config_file) {
  app.add_option("--config", config_file, "key = value file applied before the flags");
  app.add_option("--method", cfg.method, "A (Landweber-type) or B (two search directions)")
      ->transform(CLI::CheckedTransformer(std::map<std::string, Method>{{"A", Method::A},
                                                                        {"B", Method::B}}));
  app.add_option("--delta", cfg.delta, "noise level (0 = exact data)");
  app.add_option("--n-data", cfg.n_data, "interior nodes of the data grid");
  app.add_option("--n-recon", cfg.n_recon, "interior nodes of the reconstruction grid");
  app.add_option("--r", cfg.r, "Lebesgue exponent of the parameter space");
  app.add_option("--s", cfg.s, "Lebesgue exponent of the data space");
  app.add_option("--p-gauge", cfg.p_gauge, "duality-map gauge on X (0 = max(2, r))");
  app.add_option("--ctc", cfg.c_tc, "tangential cone constant");
  app.add_option("--tau-factor", cfg.tau_factor, "tau = factor * (1+ctc)/(1-ctc)");
  app.add_option("--ty", cfg.t_y, "exact-data residual tolerance");
  app.add_option("--seed", cfg.seed, "noise seed");
  app.add_option("--transfer", cfg.transfer, "data transfer to the reconstruction grid")
      ->transform(CLI::CheckedTransformer(std::map<std::string, DataTransfer>{
          {"bilinear", DataTransfer::Bilinear}, {"resample", DataTransfer::Resample}}));
  app.add_option("--max-outer", cfg.max_outer, "outer iteration limit");
  app.add_option("--grad-tol", cfg.grad_tol, "relative tolerance of the projection minimizer");
}

// Config file first, then explicit flags on top.
ExperimentConfig resolve(const CLI::App& app, const ExperimentConfig& parsed,
                         const std::string& config_file) {
  if (config_file.empty()) return parsed;
  ExperimentConfig cfg;
  apply_config_file(config_file, cfg);
  auto given = [&](const char* name) { return app.count(name) > 0; };
  if (given("--method")) cfg.method = parsed.method;
  if (given("--delta")) cfg.delta = parsed.delta;
  if (given("--n-data")) cfg.n_data = parsed.n_data;
  if (given("--n-recon")) cfg.n_recon = parsed.n_recon;
  if (given("--r")) cfg.r = parsed.r;
  if (given("--s")) cfg.s = parsed.s;
  if (given("--p-gauge")) cfg.p_gauge = parsed.p_gauge;
  if (given("--ctc")) cfg.c_tc = parsed.c_tc;
  if (given("--tau-factor")) cfg.tau_factor = parsed.tau_factor;
  if (given("--ty")) cfg.t_y = parsed.t_y;
  if (given("--seed")) cfg.seed = parsed.seed;
  if (given("--transfer")) cfg.transfer = parsed.transfer;
  if (given("--max-outer")) cfg.max_outer = parsed.max_outer;
  if (given("--grad-tol")) cfg.grad_tol = parsed.grad_tol;
  if (!parsed.output_path.empty()) cfg.output_path = parsed.output_path;
  return cfg;
}

void write_outputs(const ExperimentReport& rep, const std::string& json_path) {
  {
    std::ofstream os(json_path);
    if (!os) throw ParseError("cannot write '" + json_path + "'");
    os << report_to_json(rep) << '\n';
  }
  fs::path csv = json_path;
  csv.replace_extension(".csv");
  std::ofstream os(csv);
  if (!os) throw ParseError("cannot write '" + csv.string() + "'");
  write_iteration_csv(os, rep);
}

void print_summary(const ExperimentReport& rep) {
  std::printf("method %s  delta %.3g  n* = %d  stop = %s  rel.error = %.4f%%  residual = %.3e  "
              "time = %.2fs\n",
              to_string(rep.config.method), rep.config.delta, rep.n_star,
              to_string(rep.stop_reason), 100.0 * rep.final_rel_error, rep.final_residual,
              rep.wall_time);
  if (!rep.failure_detail.empty()) std::printf("  failure: %s\n", rep.failure_detail.c_str());
  for (const auto& w : rep.warnings) std::printf("  warning: %s\n", w.c_str());
}

int cmd_run(const CLI::App& app, const ExperimentConfig& parsed, const std::string& config_file) {
  const ExperimentConfig cfg = resolve(app, parsed, config_file);
  const ExperimentReport rep = run_experiment(cfg);
  print_summary(rep);
  if (!cfg.output_path.empty()) write_outputs(rep, cfg.output_path);
  return rep.stop_reason == StopReason::Failed ? 1 : 0;
}

int cmd_synth(int n, double delta, double s, std::uint64_t seed, const std::string& dir) {
  fs::create_directories(dir);
  const SyntheticTruth t = synth_truth(n);
  write_grid_file((fs::path(dir) / "u.txt").string(), t.u);
  write_grid_file((fs::path(dir) / "c.txt").string(), t.c);
  write_grid_file((fs::path(dir) / "c0.txt").string(), t.c0);
  write_grid_file((fs::path(dir) / "f.txt").string(), t.f);
  write_grid_file((fs::path(dir) / "g.txt").string(), t.g);
  if (delta > 0.0) {
    write_grid_file((fs::path(dir) / "u_noisy.txt").string(), add_noise(t.u, delta, s, seed));
  }
  std::printf("wrote N=%d grids to %s\n", n, dir.c_str());
  return 0;
}

// Invariant suite on the reconstruction grid of the given config.
int cmd_check(const ExperimentConfig& cfg) {
  int failures = 0;
  auto report = [&](const char* name, bool ok, double measured) {
    std::printf("[%s] %-40s %.3e\n", ok ? "PASS" : "FAIL", name, measured);
    if (!ok) ++failures;
  };

  const int n = cfg.n_recon;
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  auto random_grid = [&] {
    GridFunction g(n);
    for (Eigen::Index k = 0; k < g.size(); ++k) g.values()(k) = unif(rng);
    return g;
  };

  const SolverConfig sc = cfg.solver_config();
  const SpaceSpec xs = x_space(sc, n);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const GridFunction f = random_grid();
    const GridFunction j = duality_map(f, xs);
    const double nf = weighted_norm(f, xs);
    const double q = xs.gauge_exponent();
    worst = std::max(worst, std::abs(dual_pairing(j, f, xs) - std::pow(nf, q)) / std::pow(nf, q));
    worst = std::max(worst, std::abs(weighted_norm(j, xs.dual()) - std::pow(nf, q - 1)) /
                                std::pow(nf, q - 1));
    worst = std::max(worst, weighted_norm(inverse_duality_map(j, xs) - f, xs) / nf);
  }
  report("duality map identities (rel)", worst < 1e-10, worst);

  const SyntheticTruth t = synth_truth(n);
  const EllipticState state(t.c0, t.bvp());
  const SpaceSpec l2 = SpaceSpec::on_grid(2.0, 2.0, n);
  worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const GridFunction h = random_grid();
    const GridFunction w = random_grid();
    const double lhs = dual_pairing(w, state.derivative(h), l2);
    const double rhs = dual_pairing(state.adjoint(w), h, l2);
    worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300));
  }
  report("adjoint consistency (rel)", worst < 1e-10, worst);

  const GridFunction dir = random_grid();
  const GridFunction base = state.value();
  const GridFunction lin = state.derivative(dir);
  std::vector<double> eps{1e-1, 1e-2};
  std::vector<double> rem;
  for (double e : eps) {
    const GridFunction shifted = solve_forward(t.c0 + e * dir, t.bvp());
    rem.push_back(weighted_norm(shifted - base - e * lin, l2));
  }
  const double order = std::log10(rem[0] / rem[1]);
  report("Taylor remainder order", order >= 1.9, order);

  const GridFunction u_exact = solve_forward(t.c, t.bvp());
  const double consist = weighted_norm(u_exact - t.u, l2);
  report("F(c_true) reproduces u", consist < 1e-10, consist);

  return failures == 0 ? 0 : 1;
}

int cmd_sweep(const ExperimentConfig& base, const std::string& dir) {
  fs::create_directories(dir);
  std::vector<ExperimentConfig> cfgs;
  for (double delta : {0.0, 5e-4}) {
    for (Method m : {Method::A, Method::B}) {
      ExperimentConfig c = base;
      c.delta = delta;
      c.method = m;
      c.output_path = (fs::path(dir) / (std::string("method_") + to_string(m) +
                                        (delta > 0.0 ? "_noisy.json" : "_exact.json")))
                          .string();
      cfgs.push_back(c);
    }
  }
  std::vector<ExperimentReport> reps(cfgs.size());
  std::vector<std::thread> workers;
  for (std::size_t k = 0; k < cfgs.size(); ++k) {
    workers.emplace_back([&, k] { reps[k] = run_experiment(cfgs[k]); });
  }
  for (auto& w : workers) w.join();
  int rc = 0;
  for (std::size_t k = 0; k < cfgs.size(); ++k) {
    print_summary(reps[k]);
    write_outputs(reps[k], cfgs[k].output_path);
    if (reps[k].stop_reason == StopReason::Failed) rc = 1;
  }
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SESOP / RESESOP for the elliptic parameter-identification problem"};
  app.require_subcommand(1);

  ExperimentConfig run_cfg;
  std::string run_config_file;
  auto* run = app.add_subcommand("run", "run one reconstruction and write a JSON/CSV report");
  add_config_flags(*run, run_cfg, run_config_file);
  run->add_option("--out", run_cfg.output_path, "report path (.json; the CSV goes alongside)");

  int synth_n = 50;
  double synth_delta = 0.0, synth_s = 5.0;
  std::uint64_t synth_seed = 1;
  std::string synth_dir = ".";
  auto* synth = app.add_subcommand("synth", "write the analytic u, c, c0, f, g grids");
  synth->add_option("--n", synth_n, "interior nodes");
  synth->add_option("--delta", synth_delta, "also write u_noisy.txt with this noise level");
  synth->add_option("--s", synth_s, "exponent of the noise norm");
  synth->add_option("--seed", synth_seed, "noise seed");
  synth->add_option("--out-dir", synth_dir, "output directory");

  ExperimentConfig check_cfg;
  std::string check_config_file;
  auto* check = app.add_subcommand("check", "run the invariant suite for a configuration");
  add_config_flags(*check, check_cfg, check_config_file);

  ExperimentConfig sweep_cfg;
  std::string sweep_config_file;
  std::string sweep_dir = "sweep";
  auto* sweep = app.add_subcommand("sweep", "methods A/B on exact and noisy data, concurrently");
  add_config_flags(*sweep, sweep_cfg, sweep_config_file);
  sweep->add_option("--out-dir", sweep_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(*run, run_cfg, run_config_file);
    if (*synth) return cmd_synth(synth_n, synth_delta, synth_s, synth_seed, synth_dir);
    if (*check) return cmd_check(resolve(*check, check_cfg, check_config_file));
    if (*sweep) return cmd_sweep(resolve(*sweep, sweep_cfg, sweep_config_file), sweep_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
