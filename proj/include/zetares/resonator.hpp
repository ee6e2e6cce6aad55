#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "zetares/compensated.hpp"
#include "zetares/errors.hpp"
#include "zetares/numthy.hpp"

namespace zetares {

// Global experiment tuple. The scale is carried as log T (natural log) so
// scales like 10^10000 stay representable; T itself is only materialized by
// desk-scale operations. On the character side log_scale = log q.
struct Parameters {
  double log_scale = 0.0;
  double beta = 0.5;
  double A = 1.0;
  double epsilon = 0.0;  // 0 = auto-derived
  double kappa = 0.0;    // 0 = unset
  double X = 0.0;        // 0 = auto kappa * log T * log2 T
  std::int64_t Y = 0;    // 0 = unset
  double x = 3.0;
  double E = 17.9;

  // derived
  double log2_scale = 0.0;
  double sigma_A = 0.0;
  bool sigma_in_theorem_range = false;  // sigma_A in (1/2, 1)
  bool X_auto = false;

  double scale() const noexcept { return std::exp(log_scale); }
};

// Validates and fills in the derived fields. With strict_sigma the abscissa
// must land in (1/2, 1), which needs log2(scale) > 2A; the relaxed mode only
// requires (0, 1) and flags whether the theorem range holds.
inline Parameters resolve_parameters(Parameters p, bool strict_sigma = true,
                                     bool enforce_kappa1 = false) {
  if (!(p.log_scale > 1.0))
    throw std::domain_error("parameters: scale must satisfy log(scale) > 1");
  if (!(p.A > 0.0)) throw std::domain_error("parameters: A must be positive");
  if (!(p.beta > 0.0 && p.beta < 1.0))
    throw std::domain_error("parameters: beta must lie in (0,1)");

  p.log2_scale = std::log(p.log_scale);
  p.sigma_A = 1.0 - p.A / p.log2_scale;
  p.sigma_in_theorem_range = (p.sigma_A > 0.5 && p.sigma_A < 1.0);
  if (strict_sigma && !p.sigma_in_theorem_range)
    throw std::domain_error(
        "parameters: sigma_A outside (1/2,1); need log log scale > 2A");
  if (!(p.sigma_A > 0.0 && p.sigma_A < 1.0))
    throw std::domain_error("parameters: sigma_A outside (0,1)");

  if (p.epsilon == 0.0 && p.sigma_A > 0.5)
    p.epsilon = 0.5 * (p.sigma_A - 0.5);
  if (p.epsilon < 0.0 || (p.sigma_A > 0.5 && p.epsilon >= p.sigma_A - 0.5))
    throw std::domain_error("parameters: epsilon outside (0, sigma_A - 1/2)");

  if (p.X == 0.0 && p.kappa > 0.0) {
    p.X = p.kappa * p.log_scale * p.log2_scale;
    p.X_auto = true;
  }

  if (enforce_kappa1) {
    if (!(p.kappa > 0.0))
      throw std::domain_error("parameters: kappa required when enforced");
    if (!(p.beta + 2.0 * p.A * p.kappa < 1.0))
      throw std::domain_error("parameters: beta + 2*A*kappa < 1 violated");
  }
  return p;
}

// Completely multiplicative coefficient system: r(p) = 1 - X^(sigma_A - 1)
// for p <= X and 0 beyond. The prime coefficient is the same for every p.
struct ResonatorSpec {
  double X = 0.0;
  double sigma_A = 0.0;
  double rp = 0.0;
  std::vector<std::int64_t> primes;  // primes <= X
  std::vector<double> logs;          // cached log p
};

inline ResonatorSpec make_spec(const Parameters& params,
                               const PrimeTable& table) {
  if (!(params.sigma_A > 0.0 && params.sigma_A <= 1.0))
    throw std::domain_error("make_spec: sigma_A outside (0,1]");
  if (params.X > static_cast<double>(table.limit()))
    throw std::range_error("make_spec: X beyond sieve limit");

  ResonatorSpec spec;
  spec.X = params.X;
  spec.sigma_A = params.sigma_A;
  spec.rp = (params.X > 1.0)
                ? 1.0 - std::exp((params.sigma_A - 1.0) * std::log(params.X))
                : 0.0;
  for (std::size_t i = 0; i < table.primes().size(); ++i) {
    if (static_cast<double>(table.primes()[i]) > params.X) break;
    spec.primes.push_back(table.primes()[i]);
    spec.logs.push_back(table.prime_logs()[i]);
  }
  return spec;
}

// r(n) = rp^Omega(n) when every prime factor is <= X, else 0.
inline double r_value(std::int64_t n, const ResonatorSpec& spec) {
  if (n < 1) throw std::domain_error("r_value: n must be >= 1");
  if (n == 1) return 1.0;
  std::int64_t m = n;
  int omega = 0;
  for (std::int64_t p : spec.primes) {
    while (m % p == 0) {
      m /= p;
      ++omega;
    }
    if (m == 1) break;
  }
  if (m != 1) return 0.0;  // some prime factor exceeds X
  double r = 1.0;
  for (int i = 0; i < omega; ++i) r *= spec.rp;
  return r;
}

// log |R(t)|^2 for the Euler product R(t) = prod_p (1 - r(p) p^{-it})^{-1};
// exact up to rounding, no series truncation involved.
inline double log_abs_R_squared(double t, const ResonatorSpec& spec) {
  if (spec.rp >= 1.0)
    throw divergence_error("log_abs_R_squared: r(p) >= 1 diverges");
  CompensatedSum acc;
  const double rp = spec.rp;
  for (double lp : spec.logs) {
    const double c = std::cos(t * lp);
    // |1 - rp e^{-i t log p}|^2 = 1 - 2 rp cos + rp^2
    acc.add(std::log1p(rp * rp - 2.0 * rp * c));
  }
  return -acc.value();
}

// Closed form of sum_n r(n)^2 = prod_p (1 - rp^2)^{-1}.
inline double sum_r_squared(const ResonatorSpec& spec) {
  if (spec.rp >= 1.0) throw divergence_error("sum_r_squared: r(p) >= 1");
  const double n_primes = static_cast<double>(spec.primes.size());
  return std::exp(-n_primes * std::log1p(-spec.rp * spec.rp));
}

// Closed form of sum_n r(n) = prod_p (1 - rp)^{-1}.
inline double sum_r(const ResonatorSpec& spec) {
  if (spec.rp >= 1.0) throw divergence_error("sum_r: r(p) >= 1");
  const double n_primes = static_cast<double>(spec.primes.size());
  return std::exp(-n_primes * std::log1p(-spec.rp));
}

// Rigorous bound on sum over X-smooth n > N of r(n)^power. Uses
//   r(n)^power <= rp^{(power-theta) log N / log X} r(n)^theta
// (valid since Omega(n) >= log N / log X for smooth n > N) and minimizes
// over a theta grid.
inline double smooth_tail_bound(const ResonatorSpec& spec, double N,
                                double power = 1.0) {
  if (spec.primes.empty() || spec.rp <= 0.0) return 0.0;
  if (spec.rp >= 1.0) throw divergence_error("smooth_tail_bound: r(p) >= 1");
  const double L = N > 1.0 ? std::log(N) / std::log(spec.X) : 0.0;
  const double n_primes = static_cast<double>(spec.primes.size());
  const double log_rp = std::log(spec.rp);
  double best = std::numeric_limits<double>::infinity();
  for (int j = 1; j < 40; ++j) {
    const double theta = power * static_cast<double>(j) / 40.0;
    const double log_bound = (power - theta) * log_rp * L -
                             n_primes * std::log1p(-std::exp(theta * log_rp));
    best = std::min(best, std::exp(log_bound));
  }
  return best;
}

// Exact tail of sum r(n) past the enumerated smooth list: closed form minus
// the partial sum. Tight, but only available when enumeration is affordable.
inline double exact_smooth_tail(const ResonatorSpec& spec,
                                const std::vector<std::int64_t>& smooth) {
  CompensatedSum partial;
  for (std::int64_t n : smooth) partial.add(r_value(n, spec));
  const double tail = sum_r(spec) - partial.value();
  return std::max(tail, 0.0);
}

// rp * sum over primes p <= X of log p * p^{-sigma}.
inline double resonance_gain(const ResonatorSpec& spec, double sigma,
                             const PrimeTable& table) {
  if (!(sigma > 0.0 && sigma <= 1.0))
    throw std::domain_error("resonance_gain: sigma outside (0,1]");
  if (spec.X > static_cast<double>(table.limit()))
    throw std::range_error("resonance_gain: X beyond sieve limit");
  if (spec.rp == 0.0) return 0.0;
  CompensatedSum acc;
  for (std::size_t i = 0; i < spec.primes.size(); ++i)
    acc.add(spec.logs[i] *
            std::exp(-sigma * spec.logs[i]));
  return spec.rp * acc.value();
}

struct PrimeSumReport {
  double exact = 0.0;
  double main_term = 0.0;
  double relative_deviation = 0.0;
  bool empty_range = false;
};

// sum_{p <= X} log p * p^{-sigma} against the partial-summation main term
// X^{1-sigma}/(1-sigma).
inline PrimeSumReport prime_sum_asymptotic_check(double X, double sigma,
                                                 const PrimeTable& table) {
  if (sigma == 1.0)
    throw std::domain_error(
        "prime_sum_asymptotic_check: main term singular at sigma = 1");
  if (!(sigma > 0.0 && sigma < 1.0))
    throw std::domain_error("prime_sum_asymptotic_check: sigma outside (0,1)");
  if (X > static_cast<double>(table.limit()))
    throw std::range_error("prime_sum_asymptotic_check: X beyond sieve limit");

  PrimeSumReport report;
  if (X < 2.0) {
    report.empty_range = true;
    report.main_term = std::exp((1.0 - sigma) * std::log(std::max(X, 1.0))) /
                       (1.0 - sigma);
    report.relative_deviation = 1.0;
    return report;
  }
  CompensatedSum acc;
  for (std::size_t i = 0; i < table.primes().size(); ++i) {
    if (static_cast<double>(table.primes()[i]) > X) break;
    acc.add(table.prime_logs()[i] * std::exp(-sigma * table.prime_logs()[i]));
  }
  report.exact = acc.value();
  report.main_term = std::exp((1.0 - sigma) * std::log(X)) / (1.0 - sigma);
  report.relative_deviation = std::abs(report.exact / report.main_term - 1.0);
  return report;
}

// (e^A - 1)/A * loglog T, extended continuously to loglog T at A -> 0.
inline double predicted_bound(double A, double loglogT) {
  if (!(A > 0.0)) throw std::domain_error("predicted_bound: A must be > 0");
  if (!(loglogT > 0.0))
    throw std::domain_error("predicted_bound: loglogT must be > 0");
  if (A < 1e-8) return (1.0 + A / 2.0 + A * A / 6.0) * loglogT;
  return (std::expm1(A) / A) * loglogT;
}

}  // namespace zetares
