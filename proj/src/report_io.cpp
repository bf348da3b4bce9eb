#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "sesop/experiment.hpp"

namespace sesop {

using nlohmann::json;

// --- grid files --------------------------------------------------------------

void write_grid(std::ostream& os, const GridFunction& f) {
  os << f.n_interior() << '\n';
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (int i = 0; i < f.side(); ++i) {
    for (int j = 0; j < f.side(); ++j) {
      if (j) os << ' ';
      os << f(i, j);
    }
    os << '\n';
  }
}

GridFunction read_grid(std::istream& is) {
  long n = 0;
  if (!(is >> n) || n < 1) throw ParseError("grid file: expected a positive N on the first line");
  GridFunction f(static_cast<int>(n));
  for (int i = 0; i < f.side(); ++i) {
    for (int j = 0; j < f.side(); ++j) {
      if (!(is >> f(i, j))) {
        throw ParseError("grid file: expected " + std::to_string(f.size()) + " values");
      }
    }
  }
  std::string extra;
  if (is >> extra) throw ParseError("grid file: trailing data '" + extra + "'");
  if (!f.all_finite()) throw ParseError("grid file: non-finite value");
  return f;
}

void write_grid_file(const std::string& path, const GridFunction& f) {
  std::ofstream os(path);
  if (!os) throw ParseError("cannot open '" + path + "' for writing");
  write_grid(os, f);
}

GridFunction read_grid_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open '" + path + "'");
  return read_grid(is);
}

// --- JSON report ---------------------------------------------------------------

namespace {

template <class T>
json optional_to_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> optional_from_json(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

json config_to_json(const ExperimentConfig& c) {
  return json{{"n_data", c.n_data},         {"n_recon", c.n_recon},
              {"r", c.r},                   {"s", c.s},
              {"p_gauge", c.p_gauge},       {"c_tc", c.c_tc},
              {"tau_factor", c.tau_factor}, {"tau", c.tau()},
              {"delta", c.delta},           {"t_y", c.t_y},
              {"method", to_string(c.method)}, {"transfer", to_string(c.transfer)},
              {"seed", c.seed},
              {"max_outer", c.max_outer},   {"grad_tol", c.grad_tol},
              {"output_path", c.output_path}};
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  j.at("n_data").get_to(c.n_data);
  j.at("n_recon").get_to(c.n_recon);
  j.at("r").get_to(c.r);
  j.at("s").get_to(c.s);
  j.at("p_gauge").get_to(c.p_gauge);
  j.at("c_tc").get_to(c.c_tc);
  j.at("tau_factor").get_to(c.tau_factor);
  j.at("delta").get_to(c.delta);
  j.at("t_y").get_to(c.t_y);
  c.method = method_from_string(j.at("method").get<std::string>());
  c.transfer = transfer_from_string(j.at("transfer").get<std::string>());
  j.at("seed").get_to(c.seed);
  j.at("max_outer").get_to(c.max_outer);
  j.at("grad_tol").get_to(c.grad_tol);
  j.at("output_path").get_to(c.output_path);
  return c;
}

json record_to_json(const IterationRecord& r) {
  return json{{"n", r.n},
              {"residual_norm", r.residual_norm},
              {"rel_error", optional_to_json(r.rel_error)},
              {"t_params", r.t_params},
              {"stripe_widths", r.stripe_widths},
              {"bregman_to_truth", optional_to_json(r.bregman_to_truth)},
              {"step_class", to_string(r.step_class)},
              {"wall_time", r.wall_time},
              {"decrease_surrogate", optional_to_json(r.decrease_surrogate)},
              {"gamma", optional_to_json(r.gamma)},
              {"truth_in_stripe", optional_to_json(r.truth_in_stripe)}};
}

IterationRecord record_from_json(const json& j) {
  IterationRecord r;
  j.at("n").get_to(r.n);
  j.at("residual_norm").get_to(r.residual_norm);
  r.rel_error = optional_from_json<double>(j, "rel_error");
  j.at("t_params").get_to(r.t_params);
  j.at("stripe_widths").get_to(r.stripe_widths);
  r.bregman_to_truth = optional_from_json<double>(j, "bregman_to_truth");
  r.step_class = step_class_from_string(j.at("step_class").get<std::string>());
  j.at("wall_time").get_to(r.wall_time);
  r.decrease_surrogate = optional_from_json<double>(j, "decrease_surrogate");
  r.gamma = optional_from_json<double>(j, "gamma");
  r.truth_in_stripe = optional_from_json<bool>(j, "truth_in_stripe");
  return r;
}

}  // namespace

std::string report_to_json(const ExperimentReport& rep, int indent) {
  json violations = json::array();
  for (const auto& v : rep.containment_violations) {
    violations.push_back({{"n", v.n}, {"cone_ratio", v.cone_ratio}});
  }
  json records = json::array();
  for (const auto& r : rep.records) records.push_back(record_to_json(r));

  const json j{{"config", config_to_json(rep.config)},
               {"n_star", rep.n_star},
               {"stop_reason", to_string(rep.stop_reason)},
               {"failure_detail", rep.failure_detail},
               {"wall_time", rep.wall_time},
               {"final_rel_error", rep.final_rel_error},
               {"final_residual", rep.final_residual},
               {"c_F", rep.c_F},
               {"max_abs_t", rep.max_abs_t},
               {"stripes_checked", rep.stripes_checked},
               {"stripes_containing_truth", rep.stripes_containing_truth},
               {"containment_violations", violations},
               {"descent_violations", rep.descent_violations},
               {"warnings", rep.warnings},
               {"records", records}};
  return j.dump(indent);
}

ExperimentReport report_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("report JSON: ") + e.what());
  }
  try {
    ExperimentReport rep;
    rep.config = config_from_json(j.at("config"));
    j.at("n_star").get_to(rep.n_star);
    rep.stop_reason = stop_reason_from_string(j.at("stop_reason").get<std::string>());
    j.at("failure_detail").get_to(rep.failure_detail);
    j.at("wall_time").get_to(rep.wall_time);
    j.at("final_rel_error").get_to(rep.final_rel_error);
    j.at("final_residual").get_to(rep.final_residual);
    j.at("c_F").get_to(rep.c_F);
    j.at("max_abs_t").get_to(rep.max_abs_t);
    j.at("stripes_checked").get_to(rep.stripes_checked);
    j.at("stripes_containing_truth").get_to(rep.stripes_containing_truth);
    for (const auto& v : j.at("containment_violations")) {
      rep.containment_violations.push_back(
          {v.at("n").get<int>(), v.at("cone_ratio").get<double>()});
    }
    j.at("descent_violations").get_to(rep.descent_violations);
    j.at("warnings").get_to(rep.warnings);
    for (const auto& r : j.at("records")) rep.records.push_back(record_from_json(r));
    return rep;
  } catch (const json::exception& e) {
    throw ParseError(std::string("report JSON: ") + e.what());
  }
}

void write_iteration_csv(std::ostream& os, const ExperimentReport& rep) {
  os << "n,residual,rel_error,step_class\n";
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& r : rep.records) {
    os << r.n << ',' << r.residual_norm << ',';
    if (r.rel_error) os << *r.rel_error;
    os << ',' << to_string(r.step_class) << '\n';
  }
}

// --- key/value config ---------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size()) throw ParseError("config: '" + key + "' expects a number, got '" + v + "'");
  return out;
}

long long to_integer(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != v.size()) throw ParseError("config: '" + key + "' expects an integer, got '" + v + "'");
  return out;
}

}  // namespace

void apply_config_text(const std::string& text, ExperimentConfig& cfg) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    for (char& ch : key) {
      if (ch == '_') ch = '-';
    }

    if (key == "method") cfg.method = method_from_string(value);
    else if (key == "delta") cfg.delta = to_double(key, value);
    else if (key == "n-data") cfg.n_data = static_cast<int>(to_integer(key, value));
    else if (key == "n-recon") cfg.n_recon = static_cast<int>(to_integer(key, value));
    else if (key == "r") cfg.r = to_double(key, value);
    else if (key == "s") cfg.s = to_double(key, value);
    else if (key == "p-gauge") cfg.p_gauge = to_double(key, value);
    else if (key == "ctc") cfg.c_tc = to_double(key, value);
    else if (key == "tau-factor") cfg.tau_factor = to_double(key, value);
    else if (key == "ty") cfg.t_y = to_double(key, value);
    else if (key == "transfer") cfg.transfer = transfer_from_string(value);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_integer(key, value));
    else if (key == "max-outer") cfg.max_outer = static_cast<int>(to_integer(key, value));
    else if (key == "grad-tol") cfg.grad_tol = to_double(key, value);
    else if (key == "out") cfg.output_path = value;
    else throw ParseError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
}

void apply_config_file(const std::string& path, ExperimentConfig& cfg) {
  std::ifstream is(path);
  if (!is) throw ParseError("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << is.rdbuf();
  apply_config_text(buf.str(), cfg);
}

}  // namespace sesop
