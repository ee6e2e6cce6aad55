#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>

#include "zetares/errors.hpp"

namespace zetares {

struct ComplexPoint {
  double sigma;
  double t;
};

struct ZetaEval {
  std::complex<double> zeta;
  std::complex<double> zeta_prime;
  double err_zeta;
  double err_zeta_prime;
};

struct LogDerivResult {
  std::complex<double> value;  // zeta'/zeta(s)
  double err;
};

namespace detail {

// Euler-Maclaurin for zeta(s) and zeta'(s) with N leading terms and
// Bernoulli corrections through B10; the first omitted correction (B12)
// feeds the error estimate. The derivative comes from differentiating the
// expansion term by term, never from finite differences, so it stays usable
// near zeros of zeta. All accumulation is in long double.
struct EmResult {
  std::complex<long double> zeta;
  std::complex<long double> zeta_prime;
  long double est_zeta;
  long double est_prime;
};

inline EmResult euler_maclaurin(long double sigma, long double t,
                                std::int64_t N) {
  using C = std::complex<long double>;
  static constexpr long double kB[6] = {
      1.0L / 6.0L,  -1.0L / 30.0L,     1.0L / 42.0L,
      -1.0L / 30.0L, 5.0L / 66.0L,    -691.0L / 2730.0L};
  static constexpr long double kFact[6] = {2.0L,       24.0L,      720.0L,
                                           40320.0L,   3628800.0L, 479001600.0L};
  const C s{sigma, t};

  C sum0{0.0L, 0.0L}, sum1{0.0L, 0.0L};
  long double mag0 = 0.0L, mag1 = 0.0L;  // sum n^-sigma, sum log n * n^-sigma
  for (std::int64_t n = 1; n < N; ++n) {
    const long double ln = std::log(static_cast<long double>(n));
    const C term = std::exp(-s * ln);
    sum0 += term;
    sum1 -= ln * term;
    const long double a = std::abs(term);
    mag0 += a;
    mag1 += ln * a;
  }

  const long double lnN = std::log(static_cast<long double>(N));
  const C n_pow_1ms = std::exp((C{1.0L, 0.0L} - s) * lnN);  // N^{1-s}
  const C n_pow_ms = std::exp(-s * lnN);                    // N^{-s}
  const C sm1 = s - C{1.0L, 0.0L};

  C zeta = sum0 + n_pow_1ms / sm1 + 0.5L * n_pow_ms;
  C zp = sum1 - lnN * n_pow_1ms / sm1 - n_pow_1ms / (sm1 * sm1) -
         0.5L * lnN * n_pow_ms;

  // Correction T_k = B_{2k}/(2k)! * N^{1-s-2k} * prod_{j=0}^{2k-2}(s+j),
  // k = 1..5; d/ds T_k = T_k (hsum_k - log N).
  C poch = s;
  C hsum = C{1.0L, 0.0L} / s;
  C npow = n_pow_1ms;  // N^{1-s-2k}, updated by / N^2 each k
  const long double invN2 = 1.0L / (static_cast<long double>(N) * N);
  C T{0.0L, 0.0L};
  for (int k = 1; k <= 5; ++k) {
    npow *= invN2;
    T = (kB[k - 1] / kFact[k - 1]) * npow * poch;
    zeta += T;
    zp += T * (hsum - lnN);
    const C a = s + C{2.0L * k - 1.0L, 0.0L};
    const C b = s + C{2.0L * k, 0.0L};
    poch *= a * b;
    hsum += C{1.0L, 0.0L} / a + C{1.0L, 0.0L} / b;
  }
  // First omitted correction, scaled Backlund-style.
  const C T6 = (kB[5] / kFact[5]) * (npow * invN2) * poch;
  const long double backlund =
      std::abs(s + C{11.0L, 0.0L}) / (sigma + 11.0L);
  const long double trunc = std::abs(T6) * backlund;

  // Phase noise of exp(-s log n) at working precision.
  const long double eps = 1.1e-19L;
  const long double pn0 = eps * std::abs(t) * mag1 + eps * mag0;
  const long double pn1 =
      eps * std::abs(t) * mag1 * lnN + eps * mag1;

  EmResult r;
  r.zeta = zeta;
  r.zeta_prime = zp;
  r.est_zeta = trunc + pn0;
  r.est_prime = trunc * (lnN + 3.0L) + pn1;
  return r;
}

}  // namespace detail

// Reference evaluation of (zeta(s), zeta'(s)) with an internal error
// estimate <= target_abs_error. Accuracy contract: sigma >= 0.55,
// |t| <= 1e8, target >= 1e-12.
inline ZetaEval zeta_and_derivative(ComplexPoint s, double target_abs_error) {
  if (!(s.sigma >= 0.55))
    throw std::domain_error("zeta_and_derivative: sigma must be >= 0.55");
  if (!(std::abs(s.t) <= 1e8))
    throw std::domain_error("zeta_and_derivative: |t| must be <= 1e8");
  if (!(target_abs_error >= 1e-12))
    throw std::domain_error("zeta_and_derivative: target below 1e-12");

  if (s.t < 0.0) {
    ZetaEval e = zeta_and_derivative({s.sigma, -s.t}, target_abs_error);
    e.zeta = std::conj(e.zeta);
    e.zeta_prime = std::conj(e.zeta_prime);
    return e;
  }

  std::int64_t N = std::max<std::int64_t>(
      10, static_cast<std::int64_t>(std::ceil(2.0 * s.t)));
  detail::EmResult r{};
  for (;;) {
    r = detail::euler_maclaurin(s.sigma, s.t, N);
    if (static_cast<double>(std::max(r.est_zeta, r.est_prime)) <=
        target_abs_error)
      break;
    if (N > 400'000'000 / 2)
      throw accuracy_error("zeta_and_derivative: target unattainable",
                           static_cast<double>(
                               std::max(r.est_zeta, r.est_prime)));
    N *= 2;
  }
  ZetaEval out;
  out.zeta = std::complex<double>(static_cast<double>(r.zeta.real()),
                                  static_cast<double>(r.zeta.imag()));
  out.zeta_prime =
      std::complex<double>(static_cast<double>(r.zeta_prime.real()),
                           static_cast<double>(r.zeta_prime.imag()));
  out.err_zeta = static_cast<double>(r.est_zeta);
  out.err_zeta_prime = static_cast<double>(r.est_prime);
  return out;
}

// zeta'/zeta(s) as the quotient of the pair above, with propagated error.
// Refuses points where |zeta| < 10 * target (too close to a zero).
inline LogDerivResult log_deriv_zeta_full(ComplexPoint s,
                                          double target_abs_error) {
  double inner = target_abs_error / 4.0;
  for (int attempt = 0;; ++attempt) {
    const ZetaEval e = zeta_and_derivative(s, std::max(inner, 1e-12));
    const double az = std::abs(e.zeta);
    if (az < 10.0 * target_abs_error)
      throw near_zero_error("log_deriv_zeta: point too close to a zero");
    const std::complex<double> q = e.zeta_prime / e.zeta;
    const double err =
        (e.err_zeta_prime + std::abs(q) * e.err_zeta) / (az - e.err_zeta);
    if (err <= target_abs_error || attempt >= 2) {
      if (err > target_abs_error)
        throw accuracy_error("log_deriv_zeta: target unattainable", err);
      return {q, err};
    }
    inner = target_abs_error * az / (8.0 * (1.0 + std::abs(q)));
  }
}

inline std::complex<double> log_deriv_zeta(ComplexPoint s,
                                           double target_abs_error) {
  return log_deriv_zeta_full(s, target_abs_error).value;
}

}  // namespace zetares
