#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sesop/elliptic.hpp"
#include "sesop/grid_function.hpp"
#include "sesop/solver.hpp"

namespace sesop {

enum class Method { A, B };

/// How fine-grid data reaches the reconstruction grid.
///  Bilinear: interpolate the (noisy) fine-grid samples of u.
///  Resample: sample the analytic u on the coarse grid and interpolate only
///            the fine-grid noise, so exact data carries no transfer error.
enum class DataTransfer { Bilinear, Resample };

const char* to_string(Method m);
Method method_from_string(const std::string& s);
const char* to_string(DataTransfer t);
DataTransfer transfer_from_string(const std::string& s);

/// Parameters of the parameter-identification experiment. Defaults are the
/// reference setup: L^1.5 parameter space, L^5 data space, data synthesized on
/// a 50x50 interior grid and reconstructed on 40x40.
struct ExperimentConfig {
  int n_data = 50;
  int n_recon = 40;
  double r = 1.5;
  double s = 5.0;
  /// 0 selects max(2, r).
  double p_gauge = 0.0;
  double c_tc = 0.01;
  /// tau = tau_factor * (1 + c_tc) / (1 - c_tc).
  double tau_factor = 1.1;
  double delta = 0.0;
  double t_y = 5e-4;
  Method method = Method::A;
  DataTransfer transfer = DataTransfer::Bilinear;
  std::uint64_t seed = 1;
  int max_outer = 500;
  double grad_tol = 1e-12;
  std::string output_path;

  double tau() const { return tau_factor * (1.0 + c_tc) / (1.0 - c_tc); }
  SolverConfig solver_config() const;
  void validate() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

struct ExperimentReport {
  ExperimentConfig config;
  int n_star = 0;
  StopReason stop_reason = StopReason::NotConverged;
  std::string failure_detail;
  double wall_time = 0.0;
  double final_rel_error = 0.0;
  double final_residual = 0.0;
  double c_F = 0.0;
  double max_abs_t = 0.0;
  int stripes_checked = 0;
  int stripes_containing_truth = 0;
  std::vector<ContainmentViolation> containment_violations;
  int descent_violations = 0;
  std::vector<std::string> warnings;
  std::vector<IterationRecord> records;

  friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

/// Nodal samples of the analytic state, parameter, initial guess and the
/// data f = -Laplace(u) + c u, g = u on the boundary.
struct SyntheticTruth {
  GridFunction u;
  GridFunction c;
  GridFunction c0;
  GridFunction f;
  GridFunction g;

  BvpData bvp() const { return BvpData{f, g}; }
};

double analytic_u(double x, double y);
double analytic_c(double x, double y);
double analytic_c0(double x, double y);
double analytic_f(double x, double y);

SyntheticTruth synth_truth(int n_interior);

/// Uniform [-1, 1] noise matrix from a seeded mt19937_64 stream.
GridFunction uniform_noise(int n_interior, std::uint64_t seed);

/// u + delta v / ||v||_{s,h}, so that ||u_delta - u||_{s,h} = delta.
GridFunction add_noise(const GridFunction& u, double delta, double s_exponent,
                       std::uint64_t seed);

/// Bilinear interpolation of nodal data onto a grid with n_recon interior nodes.
GridFunction restrict_to(const GridFunction& data, int n_recon);

/// Synthesize, perturb, transfer to the reconstruction grid and iterate from c0.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// --- I/O -------------------------------------------------------------------

/// Grid file: first line N, then (N+2)^2 whitespace-separated values, row-major.
void write_grid(std::ostream& os, const GridFunction& f);
GridFunction read_grid(std::istream& is);
void write_grid_file(const std::string& path, const GridFunction& f);
GridFunction read_grid_file(const std::string& path);

std::string report_to_json(const ExperimentReport& report, int indent = 2);
ExperimentReport report_from_json(const std::string& text);

/// Columns n,residual,rel_error,step_class.
void write_iteration_csv(std::ostream& os, const ExperimentReport& report);

/// Applies `key = value` lines (blank lines and # comments ignored) on top of cfg.
void apply_config_text(const std::string& text, ExperimentConfig& cfg);
void apply_config_file(const std::string& path, ExperimentConfig& cfg);

}  // namespace sesop
