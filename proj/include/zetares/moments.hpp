#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "zetares/compensated.hpp"
#include "zetares/dirpoly.hpp"
#include "zetares/errors.hpp"
#include "zetares/resonator.hpp"

namespace zetares {

// Gaussian kernel and its Fourier transform: Phi(u) = e^{-u^2/2},
// Phi_hat(xi) = sqrt(2 pi) Phi(xi). Phi_hat > 0 everywhere, which is what
// makes dropping off-diagonal pairs a one-sided move.
inline double phi(double u) { return std::exp(-0.5 * u * u); }
inline double phi_hat(double xi) {
  return std::sqrt(2.0 * std::numbers::pi) * phi(xi);
}

// Enumerated X-smooth support with cached logs and coefficients.
struct SmoothSupport {
  std::vector<std::int64_t> numbers;
  std::vector<double> logs;
  std::vector<double> r;

  static SmoothSupport build(const ResonatorSpec& spec, std::int64_t nmax) {
    if (nmax < 1)
      throw std::domain_error("SmoothSupport: Nmax must include n = 1");
    SmoothSupport s;
    s.numbers = smooth_numbers_from(spec.primes, nmax);
    s.logs.reserve(s.numbers.size());
    s.r.reserve(s.numbers.size());
    for (std::int64_t n : s.numbers) {
      s.logs.push_back(std::log(static_cast<double>(n)));
      s.r.push_back(r_value(n, spec));
    }
    return s;
  }
};

namespace detail {

// sum over pairs (n, m) in the support, n <= first_cutoff, of
//   r(n) r(m) * sqrt(2pi) * scale * Phi(scale * (shift + log n - log m)).
// Every integral of (n/m)^{it} against the kernel is evaluated through the
// exact Gaussian transform identity, never numerically. Pairs with kernel
// argument beyond 40 are skipped (Phi(40) < 1e-300).
inline double pair_kernel_sum(const SmoothSupport& sup, double scale,
                              double shift, std::int64_t first_cutoff) {
  const double norm = std::sqrt(2.0 * std::numbers::pi) * scale;
  const double window = 40.0 / scale;
  const std::size_t S = sup.numbers.size();
  CompensatedSum acc;
  for (std::size_t i = 0; i < S; ++i) {
    if (sup.numbers[i] > first_cutoff) break;
    if (sup.r[i] == 0.0) continue;
    const double center = shift + sup.logs[i];
    const auto lo = std::lower_bound(sup.logs.begin(), sup.logs.end(),
                                     center - window);
    const auto hi = std::upper_bound(sup.logs.begin(), sup.logs.end(),
                                     center + window);
    for (auto it = lo; it != hi; ++it) {
      const std::size_t j = static_cast<std::size_t>(it - sup.logs.begin());
      if (sup.r[j] == 0.0) continue;
      const double u = scale * (center - sup.logs[j]);
      acc.add(sup.r[i] * sup.r[j] * norm * phi(u));
    }
  }
  return acc.value();
}

}  // namespace detail

struct I1Result {
  double value = 0.0;
  double tail_bound = 0.0;
};

// I1 = integral of |R(t)|^2 Phi(t log T / T) dt over the whole line,
// truncated to the enumerated support; the dropped pairs are all positive,
// and their total is bounded by the exact smooth tail.
inline I1Result i1_closed(const ResonatorSpec& spec, double T,
                          std::int64_t nmax) {
  if (!(T > std::numbers::e))
    throw std::domain_error("i1_closed: T must exceed e");
  const auto sup = SmoothSupport::build(spec, nmax);
  const double scale = T / std::log(T);
  I1Result res;
  res.value = detail::pair_kernel_sum(sup, scale, 0.0,
                                      std::numeric_limits<std::int64_t>::max());
  const double tau = exact_smooth_tail(spec, sup.numbers);
  res.tail_bound = std::sqrt(2.0 * std::numbers::pi) * scale * tau *
                   (2.0 * sum_r(spec) - tau);
  return res;
}

struct I2Result {
  double value = 0.0;
  double restricted_lower = 0.0;  // v = 1, n = pk chain, computed exactly
  double gain = 0.0;              // rp * sum_{p <= X} log p p^{-sigma}
  double tail_bound = 0.0;        // exact deficit making I2 >= gain*I1 - tail
};

// I2 with the Lambda factor expanded over prime powers; all kernel weights
// in closed form. Also evaluates the restricted (v = 1, n = pk) chain and
// the exact truncation deficit, so that
//   I2 >= restricted_lower = gain * I1 - tail_bound
// holds term by term at the truncated level.
inline I2Result i2_closed(const ResonatorSpec& spec,
                          const LambdaPolynomial& poly, double T,
                          std::int64_t nmax) {
  if (!(T > std::numbers::e))
    throw std::domain_error("i2_closed: T must exceed e");
  const auto sup = SmoothSupport::build(spec, nmax);
  const double scale = T / std::log(T);
  constexpr std::int64_t kAll = std::numeric_limits<std::int64_t>::max();

  I2Result res;
  {
    CompensatedSum acc;
    for (const auto& term : poly.terms())
      acc.add(term.coeff *
              detail::pair_kernel_sum(sup, scale, term.log_n, kAll));
    res.value = acc.value();
  }

  const double i1_pairs = detail::pair_kernel_sum(sup, scale, 0.0, kAll);
  const double sigma = poly.sigma();
  CompensatedSum gain, restricted, tail;
  for (std::size_t i = 0; i < spec.primes.size(); ++i) {
    const std::int64_t p = spec.primes[i];
    const double w_p = spec.logs[i] * std::exp(-sigma * spec.logs[i]) * spec.rp;
    gain.add(w_p);
    if (p > poly.cutoff()) {
      // No matching Lambda term below Y; charge this prime's share fully.
      tail.add(w_p * i1_pairs);
      continue;
    }
    const double b_p = detail::pair_kernel_sum(sup, scale, 0.0, nmax / p);
    restricted.add(w_p * b_p);
    tail.add(w_p * (i1_pairs - b_p));
  }
  res.gain = gain.value();
  res.restricted_lower = restricted.value();
  res.tail_bound = tail.value();
  return res;
}

// Composite-Simpson quadrature of M1 and M2 over [T^beta, T], with |R(t)|^2
// taken from the Euler product (log space, peak factored out to avoid
// overflow).
inline std::pair<double, double> m_quadrature(const ResonatorSpec& spec,
                                              const LambdaPolynomial& poly,
                                              double T, double beta,
                                              std::int64_t grid_points) {
  if (!(T > std::numbers::e))
    throw std::domain_error("m_quadrature: T must exceed e");
  if (T > 1e6)
    throw resource_error("m_quadrature: direct quadrature capped at T = 1e6");
  if (!(beta > 0.0 && beta < 1.0))
    throw std::domain_error("m_quadrature: beta outside (0,1)");
  if (grid_points < 3)
    throw std::domain_error("m_quadrature: need at least 3 grid points");

  const double lo = std::pow(T, beta);
  const double hi = T;
  if (!(lo < hi)) throw std::domain_error("m_quadrature: empty range");

  // Oscillation budget: |R|^2 carries frequencies up to sum of log p.
  if (spec.X >= 3.0) {
    const double dt0 = (hi - lo) / static_cast<double>(grid_points - 1);
    if (dt0 > 0.1 / std::log(spec.X))
      throw resolution_error("m_quadrature: grid too coarse for log X");
  }

  std::int64_t n = grid_points;
  if (n % 2 == 0) ++n;  // Simpson needs an even interval count
  const double dt = (hi - lo) / static_cast<double>(n - 1);

  const double n_primes = static_cast<double>(spec.primes.size());
  const double peak_log =
      (spec.X > 1.0 && spec.rp > 0.0)
          ? 2.0 * n_primes * (1.0 - spec.sigma_A) * std::log(spec.X)
          : 0.0;
  if (peak_log > 600.0)
    throw resource_error("m_quadrature: |R|^2 overflows direct quadrature");

  const double a = std::log(T) / T;
  CompensatedSum acc1, acc2;
  poly.eval_grid_visit(lo, dt, 0, static_cast<std::size_t>(n),
                       [&](std::size_t k, std::complex<double> lam) {
                         const double t = lo + static_cast<double>(k) * dt;
                         const double logw =
                             log_abs_R_squared(t, spec) - peak_log -
                             0.5 * (t * a) * (t * a);
                         const double w = std::exp(logw);
                         const double simpson =
                             (k == 0 || k + 1 == static_cast<std::size_t>(n))
                                 ? 1.0
                                 : (k % 2 == 1 ? 4.0 : 2.0);
                         acc1.add(simpson * w);
                         acc2.add(simpson * lam.real() * w);
                       });
  const double factor = std::exp(peak_log) * dt / 3.0;
  return {acc1.value() * factor, acc2.value() * factor};
}

struct MomentReport {
  double I1 = 0.0;
  double I2 = 0.0;
  double M1 = 0.0;
  double M2 = 0.0;
  double gain = 0.0;
  double ratio_I = 0.0;
  double ratio_M = 0.0;
  std::int64_t truncation_Nmax = 0;
  double tail_bound = 0.0;
};

inline MomentReport moment_report(const ResonatorSpec& spec,
                                  const LambdaPolynomial& poly, double T,
                                  double beta, std::int64_t nmax,
                                  std::int64_t grid_points) {
  MomentReport rep;
  const I1Result i1 = i1_closed(spec, T, nmax);
  const I2Result i2 = i2_closed(spec, poly, T, nmax);
  const auto [m1, m2] = m_quadrature(spec, poly, T, beta, grid_points);
  rep.I1 = i1.value;
  rep.I2 = i2.value;
  rep.M1 = m1;
  rep.M2 = m2;
  rep.gain = i2.gain;
  rep.ratio_I = i2.value / i1.value;
  rep.ratio_M = m2 / m1;
  rep.truncation_Nmax = nmax;
  rep.tail_bound = i2.tail_bound;
  return rep;
}

}  // namespace zetares
