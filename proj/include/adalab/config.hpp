#pragma once

// Flat `section.key = value` experiment configuration. No nesting; lists are
// comma-separated. Lines starting with '#' are comments.

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace adalab {

struct ExperimentConfig {
  // problem
  std::string problem_kind;  // quadratic | separable_nonconvex | dense_grad_sparse_curv | sparse_grad_dense_curv
  int d = 0;
  double scale = 1.0;
  std::vector<double> coeffs;  // optional explicit per-coordinate coefficients
  // noise
  std::string noise_distribution = "rademacher";  // rademacher | gaussian
  std::string sigma_profile = "constant";         // constant | spike | custom
  double sigma_s = 0.0;
  std::vector<double> sigma_list;
  // optimizer
  std::string method;  // adagrad | adagrad_norm | sgd
  double eta = -1.0;                   // explicit eta wins over the rule
  std::string eta_rule = "inv_sqrt_d"; // constant | inv_sqrt_d | sgd_tuned
  double delta = -1.0;                 // explicit delta wins over the rule
  std::string delta_rule = "half_inv_d";
  // run
  long T = 0;
  std::vector<std::uint64_t> seeds;
  bool record_trajectory = false;
  bool record_diagnostics = false;
  bool record_summary_only = true;
  std::string output_dir = "out";
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] inline void cfg_error(int line, const std::string& msg) {
  throw std::invalid_argument("config line " + std::to_string(line) + ": " + msg);
}

inline double parse_real(const std::string& v, int line, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    cfg_error(line, "expected a real number for '" + key + "', got '" + v + "'");
  }
}

inline long parse_int(const std::string& v, int line, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    cfg_error(line, "expected an integer for '" + key + "', got '" + v + "'");
  }
}

inline bool parse_bool(const std::string& v, int line, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  cfg_error(line, "expected a boolean for '" + key + "', got '" + v + "'");
}

// Comma-separated list; tolerates surrounding brackets.
inline std::vector<std::string> parse_list(std::string v) {
  if (!v.empty() && v.front() == '[') v.erase(v.begin());
  if (!v.empty() && v.back() == ']') v.pop_back();
  std::vector<std::string> items;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

}  // namespace detail

inline ExperimentConfig load_config(const std::string& text) {
  ExperimentConfig cfg;
  bool saw_kind = false, saw_d = false, saw_method = false, saw_T = false, saw_seeds = false;
  bool saw_eta = false, saw_delta = false;

  std::stringstream ss(text);
  std::string raw;
  int line = 0;
  while (std::getline(ss, raw)) {
    ++line;
    const std::string s = detail::trim(raw);
    if (s.empty() || s[0] == '#') continue;
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) detail::cfg_error(line, "expected 'key = value'");
    const std::string key = detail::trim(s.substr(0, eq));
    const std::string val = detail::trim(s.substr(eq + 1));
    if (key.empty()) detail::cfg_error(line, "empty key");
    if (val.empty()) detail::cfg_error(line, "empty value for '" + key + "'");

    if (key == "problem.kind") {
      if (val != "quadratic" && val != "separable_nonconvex" &&
          val != "dense_grad_sparse_curv" && val != "sparse_grad_dense_curv")
        detail::cfg_error(line, "unknown problem.kind '" + val + "'");
      cfg.problem_kind = val;
      saw_kind = true;
    } else if (key == "problem.d") {
      cfg.d = static_cast<int>(detail::parse_int(val, line, key));
      if (cfg.d < 1) detail::cfg_error(line, "problem.d must be >= 1");
      saw_d = true;
    } else if (key == "problem.scale") {
      cfg.scale = detail::parse_real(val, line, key);
      if (!(cfg.scale > 0.0)) detail::cfg_error(line, "problem.scale must be positive");
    } else if (key == "problem.coeffs") {
      for (const std::string& it : detail::parse_list(val))
        cfg.coeffs.push_back(detail::parse_real(it, line, key));
    } else if (key == "noise.distribution") {
      if (val != "rademacher" && val != "gaussian")
        detail::cfg_error(line, "unknown noise.distribution '" + val + "'");
      cfg.noise_distribution = val;
    } else if (key == "noise.sigma_profile") {
      if (val != "constant" && val != "spike" && val != "custom")
        detail::cfg_error(line, "unknown noise.sigma_profile '" + val + "'");
      cfg.sigma_profile = val;
    } else if (key == "noise.sigma") {
      cfg.sigma_s = detail::parse_real(val, line, key);
      if (cfg.sigma_s < 0.0) detail::cfg_error(line, "noise.sigma must be nonnegative");
    } else if (key == "noise.sigma_list") {
      for (const std::string& it : detail::parse_list(val))
        cfg.sigma_list.push_back(detail::parse_real(it, line, key));
    } else if (key == "optimizer.method") {
      if (val != "adagrad" && val != "adagrad_norm" && val != "sgd")
        detail::cfg_error(line, "unknown optimizer.method '" + val + "'");
      cfg.method = val;
      saw_method = true;
    } else if (key == "optimizer.eta") {
      cfg.eta = detail::parse_real(val, line, key);
      if (!(cfg.eta > 0.0)) detail::cfg_error(line, "optimizer.eta must be positive");
      saw_eta = true;
    } else if (key == "optimizer.eta_rule") {
      if (val != "constant" && val != "inv_sqrt_d" && val != "sgd_tuned")
        detail::cfg_error(line, "unknown optimizer.eta_rule '" + val + "'");
      cfg.eta_rule = val;
    } else if (key == "optimizer.delta") {
      cfg.delta = detail::parse_real(val, line, key);
      if (cfg.delta < 0.0) detail::cfg_error(line, "optimizer.delta must be nonnegative");
      saw_delta = true;
    } else if (key == "optimizer.delta_rule") {
      if (val != "half_inv_d") detail::cfg_error(line, "unknown optimizer.delta_rule '" + val + "'");
      cfg.delta_rule = val;
    } else if (key == "T") {
      cfg.T = detail::parse_int(val, line, key);
      if (cfg.T < 1) detail::cfg_error(line, "T must be >= 1");
      saw_T = true;
    } else if (key == "seeds") {
      for (const std::string& it : detail::parse_list(val))
        cfg.seeds.push_back(static_cast<std::uint64_t>(detail::parse_int(it, line, key)));
      saw_seeds = true;
    } else if (key == "record.trajectory") {
      cfg.record_trajectory = detail::parse_bool(val, line, key);
    } else if (key == "record.diagnostics") {
      cfg.record_diagnostics = detail::parse_bool(val, line, key);
    } else if (key == "record.summary_only") {
      cfg.record_summary_only = detail::parse_bool(val, line, key);
    } else if (key == "output.dir") {
      cfg.output_dir = val;
    } else {
      detail::cfg_error(line, "unknown key '" + key + "'");
    }
  }

  if (!saw_kind) throw std::invalid_argument("config: missing required key 'problem.kind'");
  if (!saw_d) throw std::invalid_argument("config: missing required key 'problem.d'");
  if (!saw_method) throw std::invalid_argument("config: missing required key 'optimizer.method'");
  if (!saw_T) throw std::invalid_argument("config: missing required key 'T'");
  if (!saw_seeds) throw std::invalid_argument("config: missing required key 'seeds'");
  if (cfg.seeds.empty()) throw std::invalid_argument("config: seeds must be non-empty");
  if (saw_eta) cfg.eta_rule = "constant";
  if (saw_delta) cfg.delta_rule = "";
  if (cfg.sigma_profile == "custom" && cfg.sigma_list.empty())
    throw std::invalid_argument("config: sigma_profile=custom requires noise.sigma_list");
  if (!cfg.coeffs.empty() && static_cast<int>(cfg.coeffs.size()) != cfg.d)
    throw std::invalid_argument("config: problem.coeffs length must equal problem.d");
  if (!cfg.sigma_list.empty() && static_cast<int>(cfg.sigma_list.size()) != cfg.d)
    throw std::invalid_argument("config: noise.sigma_list length must equal problem.d");
  if (cfg.eta_rule == "constant" && !saw_eta)
    throw std::invalid_argument("config: eta_rule=constant requires optimizer.eta");
  return cfg;
}

}  // namespace adalab
