#include "sesop/experiment.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "sesop/lp_space.hpp"

namespace sesop {

const char* to_string(Method m) { return m == Method::A ? "A" : "B"; }

Method method_from_string(const std::string& s) {
  if (s == "A" || s == "a") return Method::A;
  if (s == "B" || s == "b") return Method::B;
  throw ParseError("method must be A or B, got '" + s + "'");
}

const char* to_string(DataTransfer t) {
  return t == DataTransfer::Bilinear ? "bilinear" : "resample";
}

DataTransfer transfer_from_string(const std::string& s) {
  if (s == "bilinear") return DataTransfer::Bilinear;
  if (s == "resample") return DataTransfer::Resample;
  throw ParseError("data transfer must be bilinear or resample, got '" + s + "'");
}

SolverConfig ExperimentConfig::solver_config() const {
  SolverConfig sc;
  sc.r = r;
  sc.s = s;
  sc.p_gauge = p_gauge;
  sc.c_tc = c_tc;
  sc.tau = tau();
  sc.delta = delta;
  sc.T_Y = t_y;
  sc.max_outer = max_outer;
  sc.directions = method == Method::A ? SearchDirections::One : SearchDirections::Two;
  sc.minimizer.grad_tol = grad_tol;
  return sc;
}

void ExperimentConfig::validate() const {
  if (n_data < 2 || n_recon < 2) throw DomainError("grid sizes must be at least 2");
  if (n_data < n_recon) throw DomainError("data grid must be at least as fine as the reconstruction grid");
  if (!(tau_factor > 1.0)) throw DomainError("tau_factor must exceed 1");
  solver_config().validate();
}

double analytic_u(double x, double y) { return 16.0 * x * (x - 1.0) * y * (1.0 - y) + 1.0; }

double analytic_c(double x, double y) {
  using std::numbers::pi;
  return 1.5 * std::sin(2.0 * pi * x) * std::sin(3.0 * pi * y) +
         3.0 * ((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5)) + 2.0;
}

double analytic_c0(double x, double y) {
  return 3.0 * ((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5)) + 2.0 +
         8.0 * x * (x - 1.0) * y * (1.0 - y);
}

double analytic_f(double x, double y) {
  // u_xx = 32 y(1-y), u_yy = -32 x(x-1).
  const double laplacian = 32.0 * y * (1.0 - y) - 32.0 * x * (x - 1.0);
  return -laplacian + analytic_c(x, y) * analytic_u(x, y);
}

SyntheticTruth synth_truth(int n_interior) {
  if (n_interior < 2) throw DomainError("synth_truth needs N >= 2");
  SyntheticTruth t{GridFunction::sample(n_interior, analytic_u),
                   GridFunction::sample(n_interior, analytic_c),
                   GridFunction::sample(n_interior, analytic_c0),
                   GridFunction::sample(n_interior, analytic_f), GridFunction(n_interior)};
  t.g = t.u;
  for (int i = 1; i <= n_interior; ++i)
    for (int j = 1; j <= n_interior; ++j) t.g(i, j) = 0.0;
  return t;
}

GridFunction uniform_noise(int n_interior, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  GridFunction v(n_interior);
  // Row-major fill; 53 high bits mapped to [0,1) then to [-1,1).
  for (int i = 0; i < v.side(); ++i)
    for (int j = 0; j < v.side(); ++j)
      v(i, j) = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  return v;
}

GridFunction add_noise(const GridFunction& u, double delta, double s_exponent,
                       std::uint64_t seed) {
  if (!(delta >= 0.0)) throw DomainError("noise level must be nonnegative");
  if (delta == 0.0) return u;
  const SpaceSpec ys = SpaceSpec::on_grid(s_exponent, 2.0, u.n_interior());
  for (std::uint64_t attempt = 0;; ++attempt) {
    const GridFunction v = uniform_noise(u.n_interior(), seed + attempt);
    const double nv = weighted_norm(v, ys);
    if (nv > 0.0) return u + (delta / nv) * v;
  }
}

GridFunction restrict_to(const GridFunction& data, int n_recon) {
  const int n_fine = data.n_interior();
  if (n_recon > n_fine) throw DomainError("restrict_to cannot refine a grid");
  if (n_recon == n_fine) return data;
  GridFunction out(n_recon);
  const double ratio = static_cast<double>(n_fine + 1) / (n_recon + 1);
  auto locate = [&](int k) {
    const double pos = k * ratio;
    int i0 = static_cast<int>(std::floor(pos));
    i0 = std::min(i0, n_fine);
    return std::pair<int, double>{i0, pos - i0};
  };
  for (int i = 0; i < out.side(); ++i) {
    const auto [i0, a] = locate(i);
    const int i1 = std::min(i0 + 1, n_fine + 1);
    for (int j = 0; j < out.side(); ++j) {
      const auto [j0, b] = locate(j);
      const int j1 = std::min(j0 + 1, n_fine + 1);
      out(i, j) = (1.0 - a) * (1.0 - b) * data(i0, j0) + a * (1.0 - b) * data(i1, j0) +
                  (1.0 - a) * b * data(i0, j1) + a * b * data(i1, j1);
    }
  }
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();

  const SyntheticTruth fine = synth_truth(cfg.n_data);
  const GridFunction y_fine = add_noise(fine.u, cfg.delta, cfg.s, cfg.seed);
  const SyntheticTruth coarse = synth_truth(cfg.n_recon);

  GridFunction y = cfg.transfer == DataTransfer::Bilinear
                       ? restrict_to(y_fine, cfg.n_recon)
                       : coarse.u + restrict_to(y_fine - fine.u, cfg.n_recon);
  const EllipticModel model(coarse.bvp());
  const SolverConfig sc = cfg.solver_config();

  const SolveReport sr = run(InverseProblem{model, std::move(y)}, coarse.c0, sc, coarse.c);

  ExperimentReport rep;
  rep.config = cfg;
  rep.n_star = sr.n_star;
  rep.stop_reason = sr.stop_reason;
  rep.failure_detail = sr.failure_detail;
  rep.c_F = sr.c_F;
  rep.max_abs_t = sr.max_abs_t;
  rep.stripes_checked = sr.stripes_checked;
  rep.stripes_containing_truth = sr.stripes_containing_truth;
  rep.containment_violations = sr.containment_violations;
  rep.warnings = sr.warnings;
  rep.records = sr.records;
  if (!sr.records.empty()) {
    rep.final_residual = sr.records.back().residual_norm;
    rep.final_rel_error = sr.records.back().rel_error.value_or(0.0);
  }
  for (const auto& check : descent_monitor(sr.records, sc, sr.c_F)) {
    if (check.violated) ++rep.descent_violations;
  }
  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace sesop
