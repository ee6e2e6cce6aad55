#pragma once

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "zetares/charmod.hpp"
#include "zetares/dirpoly.hpp"
#include "zetares/errors.hpp"
#include "zetares/moments.hpp"
#include "zetares/numthy.hpp"
#include "zetares/parallel.hpp"
#include "zetares/resonator.hpp"
#include "zetares/search.hpp"
#include "zetares/zetaref.hpp"

namespace zetares::cli {

inline constexpr const char* kToolName = "zetares";
inline constexpr const char* kVersion = "0.1.0";

// Exit codes: 0 ok, 2 validation, 3 resource/resolution/accuracy,
// 4 infeasibility.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitResource = 3;
inline constexpr int kExitInfeasible = 4;

struct RunConfig {
  std::string command;
  std::vector<std::string> T_values;  // raw; huge scales like 1e10000 allowed
  std::vector<std::int64_t> q_values;
  double A = 1.0;
  double beta = 0.5;
  double epsilon = 0.0;  // 0 = auto
  double kappa = 0.0;    // 0 = unset
  double x = 3.0;
  bool x_set = false;
  double E = 17.9;
  std::int64_t Y = 0;  // 0 = per-command default
  double X = 0.0;      // 0 = auto from kappa
  std::uint64_t seed = 1;
  double grid_step = 0.0;     // 0 = per-command default
  std::int64_t samples = 0;   // 0 = per-command default
  int top_k = 5;
  unsigned workers = 0;  // 0 = available parallelism
  std::string out_path;
  std::string format = "csv";
  bool exclude_principal = false;
  std::string config_path;
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {
      "predict-bound",  "prime-sum",     "gain-trend",      "resonator-stats",
      "moments-toy",    "scan-zeta",     "verify-lemma1",   "measure-set",
      "scan-characters", "count-exceeding", "kappa-plan"};
  return names;
}

// Shortest representation that round-trips; '.' decimal always.
inline std::string fmt_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string cell_to_string(const nlohmann::ordered_json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_number_float()) return fmt_double(v.get<double>());
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  return v.dump();
}

struct OutputTable {
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::vector<std::string> columns;
  std::vector<nlohmann::ordered_json> rows;

  void set_columns(std::vector<std::string> cols) { columns = std::move(cols); }

  std::string to_csv() const {
    std::ostringstream os;
    for (const auto& [key, value] : config.items())
      os << "# " << key << " = " << cell_to_string(value) << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
      os << (i ? "," : "") << columns[i];
    os << "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) os << ",";
        const auto it = row.find(columns[i]);
        if (it != row.end()) os << cell_to_string(*it);
      }
      os << "\n";
    }
    return os.str();
  }

  std::string to_json() const {
    nlohmann::ordered_json doc;
    doc["config"] = config;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : rows) doc["rows"].push_back(row);
    return doc.dump(2) + "\n";
  }
};

// Accepts plain decimals and mantissa-e-exponent forms whose value would
// overflow a double ("1e10000"); returns the natural log of the scale.
inline double parse_log_scale(const std::string& raw) {
  if (raw.empty()) throw std::domain_error("scale: empty value");
  const auto epos = raw.find_first_of("eE");
  try {
    if (epos != std::string::npos) {
      const std::string mant = raw.substr(0, epos);
      const std::string exps = raw.substr(epos + 1);
      const double m = mant.empty() ? 1.0 : std::stod(mant);
      const double p = std::stod(exps);
      if (!(m > 0.0))
        throw std::domain_error("scale: mantissa must be positive");
      return (p + std::log10(m)) * std::numbers::ln10;
    }
    const double v = std::stod(raw);
    if (!(v > 0.0)) throw std::domain_error("scale: must be positive");
    return std::log(v);
  } catch (const std::invalid_argument&) {
    throw std::domain_error("scale: cannot parse '" + raw + "'");
  } catch (const std::out_of_range&) {
    throw std::domain_error("scale: cannot parse '" + raw + "'");
  }
}

namespace detail {

inline double require_finite_T(double log_T, double cap = 1e8) {
  const double T = std::exp(log_T);
  if (!(T <= cap))
    throw resource_error("command requires a desk-scale T <= " +
                         fmt_double(cap));
  return T;
}

inline Parameters resolve_from_config(const RunConfig& cfg, double log_T,
                                      bool strict_sigma) {
  Parameters p;
  p.log_scale = log_T;
  p.beta = cfg.beta;
  p.A = cfg.A;
  p.epsilon = cfg.epsilon;
  p.kappa = cfg.kappa;
  p.X = cfg.X;
  p.Y = cfg.Y;
  p.x = cfg.x;
  p.E = cfg.E;
  return resolve_parameters(p, strict_sigma);
}

inline void echo_common(OutputTable& out, const RunConfig& cfg) {
  out.config["tool"] = kToolName;
  out.config["version"] = kVersion;
  out.config["command"] = cfg.command;
  out.config["format"] = cfg.format;
  out.config["seed"] = cfg.seed;
  out.config["workers"] = effective_workers(cfg.workers);
}

inline void echo_parameters(OutputTable& out, const Parameters& p) {
  out.config["log10_T"] = p.log_scale / std::numbers::ln10;
  out.config["beta"] = p.beta;
  out.config["A"] = p.A;
  out.config["epsilon"] = p.epsilon;
  out.config["kappa"] = p.kappa;
  out.config["x"] = p.x;
  out.config["E"] = p.E;
  out.config["Y"] = p.Y;
  out.config["X"] = p.X;
  out.config["log2_T"] = p.log2_scale;
  out.config["sigma_A"] = p.sigma_A;
  out.config["sigma_in_theorem_range"] = p.sigma_in_theorem_range;
  if (p.epsilon > 0.0)
    out.config["Y_asymptotic_log10"] =
        (20.0 / p.epsilon) * p.log2_scale / std::numbers::ln10;
}

inline double single_log_T(const RunConfig& cfg) {
  if (cfg.T_values.empty())
    throw std::domain_error("--T is required for this command");
  if (cfg.T_values.size() > 1)
    throw std::domain_error("this command takes a single --T");
  return parse_log_scale(cfg.T_values.front());
}

inline std::vector<std::int64_t> q_list(const RunConfig& cfg) {
  if (cfg.q_values.empty())
    throw std::domain_error("--q is required for this command");
  return cfg.q_values;
}

// ---- commands ----

inline OutputTable cmd_predict_bound(const RunConfig& cfg) {
  OutputTable out;
  echo_common(out, cfg);
  const double log_T = single_log_T(cfg);
  if (!(log_T > 1.0))
    throw std::domain_error("predict-bound: log(scale) must exceed 1");
  const double log2_T = std::log(log_T);
  out.config["log10_T"] = log_T / std::numbers::ln10;
  out.config["A"] = cfg.A;
  out.set_columns({"A", "log2_T", "predicted_bound"});
  nlohmann::ordered_json row;
  row["A"] = cfg.A;
  row["log2_T"] = log2_T;
  row["predicted_bound"] = predicted_bound(cfg.A, log2_T);
  out.rows.push_back(row);
  return out;
}

inline OutputTable cmd_prime_sum(const RunConfig& cfg) {
  OutputTable out;
  echo_common(out, cfg);
  const double log_T = single_log_T(cfg);
  Parameters p = resolve_from_config(cfg, log_T, /*strict_sigma=*/true);
  if (!(p.X >= 2.0))
    throw std::domain_error("prime-sum: X unset; pass --X or --kappa");
  if (p.X > 1e8) throw resource_error("prime-sum: X beyond sieve budget");
  echo_parameters(out, p);
  const PrimeTable table(static_cast<std::int64_t>(std::ceil(p.X)));
  const auto rep = prime_sum_asymptotic_check(p.X, p.sigma_A, table);
  out.set_columns({"X", "sigma", "exact", "main_term", "relative_deviation",
                   "deviation_bound"});
  nlohmann::ordered_json row;
  row["X"] = p.X;
  row["sigma"] = p.sigma_A;
  row["exact"] = rep.exact;
  row["main_term"] = rep.main_term;
  row["relative_deviation"] = rep.relative_deviation;
  row["deviation_bound"] = 2.0 / std::log(p.X);
  out.rows.push_back(row);
  return out;
}

inline OutputTable cmd_gain_trend(const RunConfig& cfg) {
  OutputTable out;
  echo_common(out, cfg);
  if (cfg.T_values.empty())
    throw std::domain_error("gain-trend: at least one --T required");
  out.config["A"] = cfg.A;
  out.config["kappa"] = cfg.kappa;
  out.set_columns({"log10_T", "log2_T", "sigma_A", "X", "rp", "gain",
                   "predicted", "ratio", "deviation"});
  for (const auto& raw : cfg.T_values) {
    Parameters p = resolve_from_config(cfg, parse_log_scale(raw),
                                       /*strict_sigma=*/true);
    if (!(p.X >= 2.0))
      throw std::domain_error("gain-trend: X unset; pass --kappa or --X");
    if (p.X > 1e8) throw resource_error("gain-trend: X beyond sieve budget");
    const PrimeTable table(static_cast<std::int64_t>(std::ceil(p.X)));
    const auto spec = make_spec(p, table);
    const double gain = resonance_gain(spec, p.sigma_A, table);
    const double predicted = predicted_bound(p.A, p.log2_scale);
    nlohmann::ordered_json row;
    row["log10_T"] = p.log_scale / std::numbers::ln10;
    row["log2_T"] = p.log2_scale;
    row["sigma_A"] = p.sigma_A;
    row["X"] = p.X;
    row["rp"] = spec.rp;
    row["gain"] = gain;
    row["predicted"] = predicted;
    row["ratio"] = gain / predicted;
    row["deviation"] = std::abs(gain / predicted - 1.0);
    out.rows.push_back(row);
  }
  return out;
}

inline OutputTable cmd_resonator_stats(const RunConfig& cfg) {
  OutputTable out;
  echo_common(out, cfg);
  Parameters p = resolve_from_config(cfg, single_log_T(cfg),
                                     /*strict_sigma=*/true);
  if (!(p.X >= 1.0))
    throw std::domain_error("resonator-stats: X unset; pass --kappa or --X");
  if (p.X > 1e8)
    throw resource_error("resonator-stats: X beyond sieve budget");
  echo_parameters(out, p);
  const PrimeTable table(
      std::max<std::int64_t>(2, static_cast<std::int64_t>(std::ceil(p.X))));
  const auto spec = make_spec(p, table);
  out.set_columns({"X", "sigma_A", "rp", "n_primes", "log_R2_at_0",
                   "sum_r_squared", "sum_r", "gain", "predicted_bound"});
  nlohmann::ordered_json row;
  row["X"] = p.X;
  row["sigma_A"] = p.sigma_A;
  row["rp"] = spec.rp;
  row["n_primes"] = static_cast<std::int64_t>(spec.primes.size());
  row["log_R2_at_0"] = log_abs_R_squared(0.0, spec);
  row["sum_r_squared"] = sum_r_squared(spec);
  row["sum_r"] = sum_r(spec);
  row["gain"] = resonance_gain(spec, p.sigma_A, table);
  row["predicted_bound"] = predicted_bound(p.A, p.log2_scale);
  out.rows.push_back(row);
  return out;
}

inline OutputTable cmd_moments_toy(const RunConfig& cfg) {
  OutputTable out;
  echo_common(out, cfg);
  const double log_T = single_log_T(cfg);
  Parameters p = resolve_from_config(cfg, log_T, /*strict_sigma=*/true);
  if (p.Y == 0) p.Y = 50;
  if (!(p.X >= 2.0))
    throw std::domain_error("moments-toy: X unset; pass --kappa or --X");
  const double T = require_finite_T(log_T, 1e6);
  echo_parameters(out, p);

  const std::int64_t nmax = cfg.samples > 0 ? cfg.samples : 10'000;
  const PrimeTable table(std::max<std::int64_t>(
      {static_cast<std::int64_t>(std::ceil(p.X)), p.Y, 2}));
  const auto spec = make_spec(p, table);
  const auto poly = LambdaPolynomial::build(p.Y, p.sigma_A, table);
  const double step =
      cfg.grid_step > 0.0 ? cfg.grid_step
                          : 0.05 / std::log(std::max(p.X, 3.0));
  const double lo = std::pow(T, p.beta);
  const std::int64_t grid_points =
      static_cast<std::int64_t>(std::ceil((T - lo) / step)) + 1;
  out.config["grid_step"] = step;
  out.config["Nmax"] = nmax;

  const MomentReport rep = moment_report(spec, poly, T, p.beta, nmax,
                                         grid_points);
  out.set_columns({"I1", "I2", "M1", "M2", "gain", "ratio_I", "ratio_M",
                   "tail_bound", "Nmax", "i2_lower_ok", "m1_le_i1"});
  nlohmann::ordered_json row;
  row["I1"] = rep.I1;
  row["I2"] = rep.I2;
  row["M1"] = rep.M1;
  row["M2"] = rep.M2;
  row["gain"] = rep.gain;
  row["ratio_I"] = rep.ratio_I;
  row["ratio_M"] = rep.ratio_M;
  row["tail_bound"] = rep.tail_bound;
  row["Nmax"] = rep.truncation_Nmax;
  row["i2_lower_ok"] = rep.I2 >= rep.gain * rep.I1 - rep.tail_bound -
                                   1e-9 * std::abs(rep.I2);
  row["m1_le_i1"] = rep.M1 <= rep.I1 * (1.0 + 1e-6);
  out.rows.push_back(row);
  return out;
}

inline OutputTable cmd_scan_zeta(const RunConfig& cfg) {
  OutputTable out;
  echo_common(out, cfg);
  const double log_T = single_log_T(cfg);
  Parameters p = resolve_from_config(cfg, log_T, /*strict_sigma=*/true);
  if (p.Y == 0) p.Y = 10'000;
  const double T = require_finite_T(log_T);
  echo_parameters(out, p);

  const PrimeTable table(std::max<std::int64_t>(p.Y, 2));
  const auto poly = LambdaPolynomial::build(p.Y, p.sigma_A, table);
  const double step =
      cfg.grid_step > 0.0
          ? cfg.grid_step
          : 0.05 / std::log(static_cast<double>(std::max<std::int64_t>(p.Y, 3)));
  out.config["grid_step"] = step;
  out.config["top_k"] = cfg.top_k;

  const auto records =
      scan_max(poly, T, p.beta, step, cfg.top_k, cfg.workers);
  out.set_columns({"rank", "t", "value", "method", "grid_step", "refined"});
  for (std::size_t i = 0; i < records.size(); ++i) {
    nlohmann::ordered_json row;
    row["rank"] = static_cast<std::int64_t>(i + 1);
    row["t"] = records[i].location;
    row["value"] = records[i].value;
    row["method"] = to_string(records[i].method);
    row["grid_step"] = records[i].grid_step;
    row["refined"] = records[i].refined;
    out.rows.push_back(row);
  }
  return out;
}

inline OutputTable cmd_verify_lemma1(const RunConfig& cfg) {
  OutputTable out;
  echo_common(out, cfg);
  const double log_T = single_log_T(cfg);
  Parameters p = resolve_from_config(cfg, log_T, /*strict_sigma=*/true);
  if (p.Y == 0) p.Y = 1'000'000;
  const double T = require_finite_T(log_T, 1e6);
  echo_parameters(out, p);

  const std::int64_t n_points = cfg.samples > 0 ? cfg.samples : 20;
  const PrimeTable table(std::max<std::int64_t>(p.Y, 2));
  const auto poly = LambdaPolynomial::build(p.Y, p.sigma_A, table);
  const double lo = std::pow(T, p.beta);
  out.config["points"] = n_points;

  out.set_columns({"t", "lambda_re", "lambda_im", "oracle_re", "oracle_im",
                   "abs_diff", "near_zero"});
  for (std::int64_t i = 0; i < n_points; ++i) {
    const double t =
        n_points == 1
            ? lo
            : lo + (T - lo) * static_cast<double>(i) /
                       static_cast<double>(n_points - 1);
    nlohmann::ordered_json row;
    row["t"] = t;
    const std::complex<double> lam = poly.eval_at(t);
    row["lambda_re"] = lam.real();
    row["lambda_im"] = lam.imag();
    bool near_zero = false;
    try {
      const std::complex<double> ld =
          log_deriv_zeta({p.sigma_A, t}, 1e-8);
      row["oracle_re"] = ld.real();
      row["oracle_im"] = ld.imag();
      row["abs_diff"] = std::abs(lam + ld);  // Lambda-sum vs -zeta'/zeta
    } catch (const near_zero_error&) {
      near_zero = true;
      row["oracle_re"] = nullptr;
      row["oracle_im"] = nullptr;
      row["abs_diff"] = nullptr;
    }
    row["near_zero"] = near_zero;
    out.rows.push_back(row);
  }
  return out;
}

inline OutputTable cmd_measure_set(const RunConfig& cfg) {
  OutputTable out;
  echo_common(out, cfg);
  const double log_T = single_log_T(cfg);
  Parameters p = resolve_from_config(cfg, log_T, /*strict_sigma=*/true);
  if (p.Y == 0) p.Y = 10'000;
  const double T = require_finite_T(log_T);
  echo_parameters(out, p);

  const std::int64_t n = cfg.samples > 0 ? cfg.samples : 10'000;
  const PrimeTable table(std::max<std::int64_t>(p.Y, 2));
  const auto poly = LambdaPolynomial::build(p.Y, p.sigma_A, table);
  const auto rep = measure_estimate(poly, T, p.beta, p.A, p.x, p.E, n,
                                    cfg.seed, cfg.workers);
  out.set_columns({"fraction", "std_error", "threshold", "hits", "n_samples",
                   "asymptotic_exponent"});
  nlohmann::ordered_json row;
  row["fraction"] = rep.fraction;
  row["std_error"] = rep.std_error;
  row["threshold"] = rep.threshold;
  row["hits"] = rep.hits;
  row["n_samples"] = rep.n_samples;
  row["asymptotic_exponent"] = rep.asymptotic_exponent;
  out.rows.push_back(row);
  return out;
}

inline OutputTable cmd_scan_characters(const RunConfig& cfg) {
  OutputTable out;
  echo_common(out, cfg);
  const auto qs = q_list(cfg);
  const std::int64_t Y = cfg.Y > 0 ? cfg.Y : 10'000;
  out.config["A"] = cfg.A;
  out.config["Y"] = Y;
  out.set_columns({"q", "sigma_A", "theorem_range", "best_index", "best_value",
                   "mean", "stddev", "quadratic_index", "best_is_quadratic",
                   "predicted_bound"});
  for (std::int64_t q : qs) {
    const auto rep = max_over_characters(q, cfg.A, Y);
    nlohmann::ordered_json row;
    row["q"] = rep.q;
    row["sigma_A"] = rep.sigma_A;
    row["theorem_range"] = rep.theorem_range;
    row["best_index"] = rep.best_index;
    row["best_value"] = rep.best_value;
    row["mean"] = rep.mean;
    row["stddev"] = rep.stddev;
    row["quadratic_index"] = rep.quadratic_index;
    row["best_is_quadratic"] = rep.best_is_quadratic;
    row["predicted_bound"] =
        predicted_bound(cfg.A, std::log(std::log(static_cast<double>(q))));
    out.rows.push_back(row);
  }
  return out;
}

inline OutputTable cmd_count_exceeding(const RunConfig& cfg) {
  OutputTable out;
  echo_common(out, cfg);
  const auto qs = q_list(cfg);
  const std::int64_t Y = cfg.Y > 0 ? cfg.Y : 1'000;
  out.config["A"] = cfg.A;
  out.config["x"] = cfg.x;
  out.config["E"] = cfg.E;
  out.config["Y"] = Y;
  out.config["include_principal"] = !cfg.exclude_principal;
  out.set_columns({"q", "count", "total", "threshold", "sigma_A",
                   "theorem_range"});
  for (std::int64_t q : qs) {
    const auto rep =
        count_exceeding(q, cfg.A, cfg.x, Y, cfg.E, !cfg.exclude_principal);
    nlohmann::ordered_json row;
    row["q"] = rep.q;
    row["count"] = rep.count;
    row["total"] = rep.total;
    row["threshold"] = rep.threshold;
    row["sigma_A"] = rep.sigma_A;
    row["theorem_range"] = rep.theorem_range;
    out.rows.push_back(row);
  }
  return out;
}

inline OutputTable cmd_kappa_plan(const RunConfig& cfg) {
  OutputTable out;
  echo_common(out, cfg);
  // --q switches to the character-side constraints and closed form.
  const bool character_side = !cfg.q_values.empty();
  double log_scale;
  if (character_side) {
    if (cfg.q_values.size() > 1 || !cfg.T_values.empty())
      throw std::domain_error("kappa-plan: pass a single --T or --q");
    log_scale = std::log(static_cast<double>(cfg.q_values.front()));
  } else {
    log_scale = single_log_T(cfg);
  }
  std::optional<double> x;
  if (cfg.x_set) x = cfg.x;
  const KappaPlan plan = kappa_plan(cfg.A, cfg.beta, log_scale, cfg.epsilon,
                                    x, cfg.E, character_side);
  echo_parameters(out, plan.params);
  out.config["character_side"] = character_side;
  out.set_columns({"kappa", "kappa1_ok", "kappa2_ok", "sigma_A", "epsilon",
                   "X"});
  nlohmann::ordered_json row;
  row["kappa"] = plan.params.kappa;
  row["kappa1_ok"] = plan.kappa1_ok;
  row["kappa2_ok"] = plan.kappa2_ok;
  row["sigma_A"] = plan.params.sigma_A;
  row["epsilon"] = plan.params.epsilon;
  row["X"] = plan.params.X;
  out.rows.push_back(row);
  return out;
}

}  // namespace detail

inline OutputTable execute(const RunConfig& cfg) {
  if (cfg.command == "predict-bound") return detail::cmd_predict_bound(cfg);
  if (cfg.command == "prime-sum") return detail::cmd_prime_sum(cfg);
  if (cfg.command == "gain-trend") return detail::cmd_gain_trend(cfg);
  if (cfg.command == "resonator-stats") return detail::cmd_resonator_stats(cfg);
  if (cfg.command == "moments-toy") return detail::cmd_moments_toy(cfg);
  if (cfg.command == "scan-zeta") return detail::cmd_scan_zeta(cfg);
  if (cfg.command == "verify-lemma1") return detail::cmd_verify_lemma1(cfg);
  if (cfg.command == "measure-set") return detail::cmd_measure_set(cfg);
  if (cfg.command == "scan-characters") return detail::cmd_scan_characters(cfg);
  if (cfg.command == "count-exceeding") return detail::cmd_count_exceeding(cfg);
  if (cfg.command == "kappa-plan") return detail::cmd_kappa_plan(cfg);
  throw std::domain_error("unknown command '" + cfg.command + "'");
}

// Executes the command and writes the artifact; maps errors to exit codes.
inline int run(const RunConfig& cfg, std::ostream& diag = std::cerr) {
  try {
    if (cfg.format != "csv" && cfg.format != "json")
      throw std::domain_error("format must be 'csv' or 'json'");
    const OutputTable out = execute(cfg);
    const std::string text =
        cfg.format == "json" ? out.to_json() : out.to_csv();
    if (cfg.out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(cfg.out_path, std::ios::binary);
      if (!f) throw resource_error("cannot open output file " + cfg.out_path);
      f << text;
    }
    return kExitOk;
  } catch (const infeasible_error& e) {
    diag << "infeasible: " << e.what()
         << " (binding: " << e.binding_constraint() << ")\n";
    return kExitInfeasible;
  } catch (const resource_error& e) {
    diag << "resource error: " << e.what() << "\n";
    return kExitResource;
  } catch (const resolution_error& e) {
    diag << "resolution error: " << e.what() << "\n";
    return kExitResource;
  } catch (const accuracy_error& e) {
    diag << "accuracy error: " << e.what()
         << " (achieved " << fmt_double(e.achieved()) << ")\n";
    return kExitResource;
  } catch (const sampler_stall_error& e) {
    diag << "sampler error: " << e.what() << "\n";
    return kExitResource;
  } catch (const near_zero_error& e) {
    diag << "near-zero error: " << e.what() << "\n";
    return kExitResource;
  } catch (const std::exception& e) {
    diag << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

namespace detail {

inline void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::domain_error("config: cannot open " + path);
  nlohmann::json j;
  f >> j;
  if (!j.is_object()) throw std::domain_error("config: root must be an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "command") cfg.command = value.get<std::string>();
    else if (key == "T") {
      cfg.T_values.clear();
      if (value.is_array())
        for (const auto& v : value)
          cfg.T_values.push_back(v.is_string() ? v.get<std::string>()
                                               : v.dump());
      else
        cfg.T_values.push_back(value.is_string() ? value.get<std::string>()
                                                 : value.dump());
    } else if (key == "q") {
      cfg.q_values.clear();
      if (value.is_array())
        for (const auto& v : value) cfg.q_values.push_back(v.get<std::int64_t>());
      else
        cfg.q_values.push_back(value.get<std::int64_t>());
    } else if (key == "A") cfg.A = value.get<double>();
    else if (key == "beta") cfg.beta = value.get<double>();
    else if (key == "epsilon") cfg.epsilon = value.get<double>();
    else if (key == "kappa") cfg.kappa = value.get<double>();
    else if (key == "x") { cfg.x = value.get<double>(); cfg.x_set = true; }
    else if (key == "E") cfg.E = value.get<double>();
    else if (key == "Y") cfg.Y = value.get<std::int64_t>();
    else if (key == "X") cfg.X = value.get<double>();
    else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
    else if (key == "grid-step") cfg.grid_step = value.get<double>();
    else if (key == "samples") cfg.samples = value.get<std::int64_t>();
    else if (key == "top-k") cfg.top_k = value.get<int>();
    else if (key == "workers") cfg.workers = value.get<unsigned>();
    else if (key == "out") cfg.out_path = value.get<std::string>();
    else if (key == "format") cfg.format = value.get<std::string>();
    else if (key == "exclude-principal")
      cfg.exclude_principal = value.get<bool>();
    else
      throw std::domain_error("config: unknown key '" + key + "'");
  }
}

}  // namespace detail

struct ParseResult {
  int exit_code = -1;  // >= 0: terminate with this code
  RunConfig config;
};

// Precedence: command-line flags > config-file keys > defaults.
inline ParseResult parse_args(const std::vector<std::string>& args,
                              std::ostream& diag = std::cerr) {
  ParseResult result;
  RunConfig flags;  // values given on the command line
  CLI::App app{"resonance experiments for log-derivatives of zeta and "
               "Dirichlet L-functions near the 1-line"};
  app.set_help_flag("-h,--help", "print usage");

  app.add_option("command", flags.command, "one of: predict-bound, prime-sum, "
                 "gain-trend, resonator-stats, moments-toy, scan-zeta, "
                 "verify-lemma1, measure-set, scan-characters, "
                 "count-exceeding, kappa-plan")
      ->required(false);
  // One value per occurrence, so a trailing positional command still binds.
  auto* oT = app.add_option("--T", flags.T_values,
                            "scale T (repeatable; forms like 1e10000 allowed)")
                 ->type_size(1)
                 ->allow_extra_args(false);
  auto* oq = app.add_option("--q", flags.q_values, "prime modulus (repeatable)")
                 ->type_size(1)
                 ->allow_extra_args(false);
  auto* oA = app.add_option("--A", flags.A, "abscissa parameter A > 0");
  auto* obeta = app.add_option("--beta", flags.beta, "range exponent in (0,1)");
  auto* oeps = app.add_option("--epsilon", flags.epsilon,
                              "zero-density margin (default auto)");
  auto* okappa = app.add_option("--kappa", flags.kappa,
                                "resonator length coefficient");
  auto* ox = app.add_option("--x", flags.x, "threshold offset x > 0");
  auto* oE = app.add_option("--E", flags.E, "threshold exponent (default 17.9)");
  auto* oY = app.add_option("--Y", flags.Y, "Dirichlet polynomial cutoff");
  auto* oX = app.add_option("--X", flags.X,
                            "resonator smoothness bound (overrides auto)");
  auto* oseed = app.add_option("--seed", flags.seed, "random seed");
  auto* ostep = app.add_option("--grid-step", flags.grid_step,
                               "scan/quadrature step (default 0.05/log Y)");
  auto* osamples = app.add_option("--samples", flags.samples,
                                  "sample count / truncation budget");
  auto* otopk = app.add_option("--top-k", flags.top_k, "records to keep");
  auto* oworkers = app.add_option("--workers", flags.workers,
                                  "worker threads (default: all cores)");
  auto* oout = app.add_option("--out", flags.out_path, "output path");
  auto* oformat = app.add_option("--format", flags.format, "csv or json");
  auto* oexcl = app.add_flag("--exclude-principal", flags.exclude_principal,
                             "exclude the principal character from counts");
  app.add_option("--config", flags.config_path, "JSON config file");

  std::vector<std::string> argv_copy(args);
  std::vector<const char*> argv_ptrs;
  argv_ptrs.push_back(kToolName);
  for (const auto& a : argv_copy) argv_ptrs.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv_ptrs.size()), argv_ptrs.data());
  } catch (const CLI::CallForHelp& e) {
    diag << app.help();
    result.exit_code = 0;
    return result;
  } catch (const CLI::ParseError& e) {
    diag << "error: " << e.what() << "\n";
    result.exit_code = kExitValidation;
    return result;
  }

  RunConfig cfg;  // defaults
  try {
    if (!flags.config_path.empty())
      detail::apply_config_file(cfg, flags.config_path);
  } catch (const std::exception& e) {
    diag << "error: " << e.what() << "\n";
    result.exit_code = kExitValidation;
    return result;
  }

  if (!flags.command.empty()) cfg.command = flags.command;
  if (oT->count()) cfg.T_values = flags.T_values;
  if (oq->count()) cfg.q_values = flags.q_values;
  if (oA->count()) cfg.A = flags.A;
  if (obeta->count()) cfg.beta = flags.beta;
  if (oeps->count()) cfg.epsilon = flags.epsilon;
  if (okappa->count()) cfg.kappa = flags.kappa;
  if (ox->count()) { cfg.x = flags.x; cfg.x_set = true; }
  if (oE->count()) cfg.E = flags.E;
  if (oY->count()) cfg.Y = flags.Y;
  if (oX->count()) cfg.X = flags.X;
  if (oseed->count()) cfg.seed = flags.seed;
  if (ostep->count()) cfg.grid_step = flags.grid_step;
  if (osamples->count()) cfg.samples = flags.samples;
  if (otopk->count()) cfg.top_k = flags.top_k;
  if (oworkers->count()) cfg.workers = flags.workers;
  if (oout->count()) cfg.out_path = flags.out_path;
  if (oformat->count()) cfg.format = flags.format;
  if (oexcl->count()) cfg.exclude_principal = flags.exclude_principal;

  if (cfg.command.empty()) {
    diag << "error: no command given; expected one of:";
    for (const auto& name : command_names()) diag << " " << name;
    diag << "\n";
    result.exit_code = kExitValidation;
    return result;
  }
  bool known = false;
  for (const auto& name : command_names())
    if (cfg.command == name) known = true;
  if (!known) {
    diag << "error: unknown command '" << cfg.command << "'\n";
    result.exit_code = kExitValidation;
    return result;
  }
  result.config = cfg;
  return result;
}

}  // namespace zetares::cli
