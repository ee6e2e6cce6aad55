#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "zetares/compensated.hpp"
#include "zetares/dirpoly.hpp"
#include "zetares/errors.hpp"
#include "zetares/numthy.hpp"
#include "zetares/resonator.hpp"

namespace zetares {

namespace detail {

inline std::int64_t mod_pow(std::int64_t base, std::int64_t exp,
                            std::int64_t mod) {
  std::int64_t result = 1 % mod;
  base %= mod;
  while (exp > 0) {
    if (exp & 1) result = result * base % mod;  // mod <= 1e6, no overflow
    base = base * base % mod;
    exp >>= 1;
  }
  return result;
}

inline bool is_prime_trial(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline std::vector<std::int64_t> prime_divisors(std::int64_t n) {
  std::vector<std::int64_t> out;
  for (std::int64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

}  // namespace detail

// Multiplicative group structure mod a prime q: a primitive root g, the
// discrete-log table index[n] with g^index[n] = n (mod q), and cached roots
// of unity of order q-1. Every character mod q is chi_a(n) =
// e(a * index[n] / (q-1)) for a in 0..q-2; a = 0 is the principal character
// and a = (q-1)/2 the quadratic one.
class CharacterTable {
public:
  static CharacterTable build(std::int64_t q) {
    if (q < 3 || !detail::is_prime_trial(q))
      throw std::domain_error("CharacterTable: q must be an odd prime >= 3");
    if (q > 1'000'000)
      throw resource_error("CharacterTable: q exceeds table budget");

    CharacterTable t;
    t.q_ = q;
    const auto divisors = detail::prime_divisors(q - 1);
    for (std::int64_t g = 2; g < q; ++g) {
      bool primitive = true;
      for (std::int64_t r : divisors) {
        if (detail::mod_pow(g, (q - 1) / r, q) == 1) {
          primitive = false;
          break;
        }
      }
      if (primitive) {
        t.g_ = g;
        break;
      }
    }

    t.index_.assign(static_cast<std::size_t>(q), -1);
    std::int64_t pow = 1;
    for (std::int64_t k = 0; k < q - 1; ++k) {
      t.index_[static_cast<std::size_t>(pow)] = static_cast<std::int32_t>(k);
      pow = pow * t.g_ % q;
    }

    t.roots_.resize(static_cast<std::size_t>(q - 1));
    const double step = 2.0 * std::numbers::pi / static_cast<double>(q - 1);
    for (std::int64_t j = 0; j < q - 1; ++j)
      t.roots_[static_cast<std::size_t>(j)] = {std::cos(step * j),
                                               std::sin(step * j)};
    return t;
  }

  std::int64_t modulus() const noexcept { return q_; }
  std::int64_t generator() const noexcept { return g_; }
  std::int64_t order() const noexcept { return q_ - 1; }
  std::int64_t quadratic_index() const noexcept { return (q_ - 1) / 2; }

  std::int32_t index_of(std::int64_t n) const {
    const std::int64_t m = ((n % q_) + q_) % q_;
    if (m == 0) throw std::domain_error("index_of: n divisible by q");
    return index_[static_cast<std::size_t>(m)];
  }

  std::complex<double> char_value(std::int64_t a, std::int64_t n) const {
    if (a < 0 || a > q_ - 2)
      throw std::domain_error("char_value: character index outside 0..q-2");
    const std::int64_t m = ((n % q_) + q_) % q_;
    if (m == 0) return {0.0, 0.0};
    const std::int64_t j =
        a * static_cast<std::int64_t>(index_[static_cast<std::size_t>(m)]) %
        (q_ - 1);
    return roots_[static_cast<std::size_t>(j)];
  }

private:
  std::int64_t q_ = 0;
  std::int64_t g_ = 0;
  std::vector<std::int32_t> index_;
  std::vector<std::complex<double>> roots_;
};

// Direct summation of sum_a chi_a(n) conj(chi_a(m)); equals
// (q-1) [n = m (mod q), gcd(nq, q) = 1] up to rounding. Kept as a literal
// loop so it can serve as an orthogonality test fixture.
inline std::complex<double> orthogonality_sum(const CharacterTable& table,
                                              std::int64_t n, std::int64_t m) {
  if (((m % table.modulus()) + table.modulus()) % table.modulus() == 0)
    throw std::domain_error("orthogonality_sum: gcd(m, q) must be 1");
  CompensatedSum re, im;
  for (std::int64_t a = 0; a <= table.order() - 1; ++a) {
    const std::complex<double> v =
        table.char_value(a, n) * std::conj(table.char_value(a, m));
    re.add(v.real());
    im.add(v.imag());
  }
  return {re.value(), im.value()};
}

// Relaxed abscissa for the character side: requires sigma_A in (0,1) but
// only flags whether the theorem range (1/2,1) holds, so small desk moduli
// remain runnable.
inline double sigma_for_modulus(std::int64_t q, double A,
                                bool* theorem_range = nullptr) {
  if (!(A > 0.0)) throw std::domain_error("sigma_for_modulus: A must be > 0");
  const double log_q = std::log(static_cast<double>(q));
  if (!(log_q > 1.0))
    throw std::domain_error("sigma_for_modulus: q too small (log q <= 1)");
  const double log2_q = std::log(log_q);
  if (!(log2_q > 0.0))
    throw std::domain_error("sigma_for_modulus: loglog q <= 0");
  const double sigma = 1.0 - A / log2_q;
  if (!(sigma > 0.0 && sigma < 1.0))
    throw std::domain_error("sigma_for_modulus: sigma_A outside (0,1)");
  if (theorem_range) *theorem_range = sigma > 0.5;
  return sigma;
}

struct RChiResult {
  std::complex<double> value;
  double tail_bound;
};

// R(chi) = sum over X-smooth n <= Nmax of r(n) chi(n), with the exact tail
// of the dropped part of sum r(n) as the bound.
inline RChiResult R_chi(const CharacterTable& table, std::int64_t a,
                        const ResonatorSpec& spec, std::int64_t Nmax) {
  if (spec.rp >= 1.0) throw divergence_error("R_chi: r(p) >= 1");
  const auto smooth = smooth_numbers_from(spec.primes, Nmax);
  CompensatedSum re, im;
  for (std::int64_t n : smooth) {
    const double r = r_value(n, spec);
    const std::complex<double> w = table.char_value(a, n);
    re.add(r * w.real());
    im.add(r * w.imag());
  }
  return {{re.value(), im.value()}, exact_smooth_tail(spec, smooth)};
}

struct SSumsReport {
  double S1 = 0.0;
  double S1_by_congruence = 0.0;
  double S2 = 0.0;
  double S2_lower = 0.0;  // gain * S1
  double gain = 0.0;
  double tail_bound = 0.0;
};

// The first and second character moments of the resonator, each computed
// two ways: S1 by direct summation over characters and by orthogonality
// (congruence classes); S2 directly, against the restricted lower bound
// gain * S1 - tail with the truncation deficit computed exactly.
inline SSumsReport s_sums(const CharacterTable& table,
                          const ResonatorSpec& spec,
                          const LambdaPolynomial& poly, std::int64_t Nmax) {
  const std::int64_t q = table.modulus();
  if (q > 3000)
    throw resource_error("s_sums: q beyond full double-check budget (3000)");

  const auto smooth = smooth_numbers_from(spec.primes, Nmax);
  const std::size_t S = smooth.size();
  std::vector<double> rvals(S);
  std::vector<std::int32_t> residue(S);
  for (std::size_t i = 0; i < S; ++i) {
    rvals[i] = r_value(smooth[i], spec);
    residue[i] = static_cast<std::int32_t>(smooth[i] % q);
  }

  SSumsReport rep;

  // Per-character sums.
  std::vector<double> abs_R2(static_cast<std::size_t>(q - 1));
  {
    CompensatedSum s1;
    for (std::int64_t a = 0; a <= q - 2; ++a) {
      CompensatedSum re, im;
      for (std::size_t i = 0; i < S; ++i) {
        if (residue[i] == 0) continue;
        const std::complex<double> w = table.char_value(a, smooth[i]);
        re.add(rvals[i] * w.real());
        im.add(rvals[i] * w.imag());
      }
      const double r2 = re.value() * re.value() + im.value() * im.value();
      abs_R2[static_cast<std::size_t>(a)] = r2;
      s1.add(r2);
    }
    rep.S1 = s1.value();
  }

  // Congruence-class form of S1.
  auto bucket_sums = [&](std::int64_t cutoff) {
    std::vector<double> B(static_cast<std::size_t>(q), 0.0);
    for (std::size_t i = 0; i < S; ++i) {
      if (smooth[i] > cutoff) break;
      B[static_cast<std::size_t>(residue[i])] += rvals[i];
    }
    return B;
  };
  const auto B_full = bucket_sums(Nmax);
  {
    CompensatedSum acc;
    for (std::int64_t rho = 1; rho <= q - 1; ++rho)
      acc.add(B_full[static_cast<std::size_t>(rho)] *
              B_full[static_cast<std::size_t>(rho)]);
    rep.S1_by_congruence = static_cast<double>(q - 1) * acc.value();
  }

  // S2 directly.
  {
    CompensatedSum s2;
    for (std::int64_t a = 0; a <= q - 2; ++a) {
      const std::complex<double> lam =
          poly.eval_char([&](std::int64_t n) { return table.char_value(a, n); });
      s2.add(lam.real() * abs_R2[static_cast<std::size_t>(a)]);
    }
    rep.S2 = s2.value();
  }

  // gain over p <= min(X, Y), skipping p = q, plus the exact truncation
  // deficit of the restricted chain.
  {
    CompensatedSum gain, tail;
    const double sigma = poly.sigma();
    for (std::size_t i = 0; i < spec.primes.size(); ++i) {
      const std::int64_t p = spec.primes[i];
      if (p == q) continue;
      const double w_p =
          spec.logs[i] * std::exp(-sigma * spec.logs[i]) * spec.rp;
      if (p > poly.cutoff()) {
        // Prime in the gain with no matching Lambda term: charge it fully.
        tail.add(w_p * rep.S1_by_congruence);
        gain.add(w_p);
        continue;
      }
      const auto B_cut = bucket_sums(Nmax / p);
      CompensatedSum deficit;
      for (std::int64_t rho = 1; rho <= q - 1; ++rho) {
        const double b = B_full[static_cast<std::size_t>(rho)];
        deficit.add(b * (b - B_cut[static_cast<std::size_t>(rho)]));
      }
      tail.add(w_p * static_cast<double>(q - 1) * deficit.value());
      gain.add(w_p);
    }
    rep.gain = gain.value();
    rep.tail_bound = tail.value();
    rep.S2_lower = rep.gain * rep.S1;
  }
  return rep;
}

struct CharScanReport {
  std::int64_t q = 0;
  double sigma_A = 0.0;
  bool theorem_range = false;
  std::int64_t best_index = 0;
  double best_value = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  std::int64_t quadratic_index = 0;
  bool best_is_quadratic = false;
  std::int64_t n_characters = 0;
};

// Values of the proxy for -Re L'/L(sigma_A, chi) over all non-principal
// characters mod q: Re sum_{n <= Y} Lambda(n) chi(n) n^{-sigma_A}.
inline CharScanReport max_over_characters(const CharacterTable& table,
                                          const LambdaPolynomial& poly,
                                          double sigma_A, bool theorem_range) {
  const std::int64_t q = table.modulus();
  CharScanReport rep;
  rep.q = q;
  rep.sigma_A = sigma_A;
  rep.theorem_range = theorem_range;
  rep.quadratic_index = table.quadratic_index();
  rep.n_characters = q - 2;

  CompensatedSum sum, sum_sq;
  double best = -std::numeric_limits<double>::infinity();
  std::int64_t best_a = 1;
  for (std::int64_t a = 1; a <= q - 2; ++a) {
    const std::complex<double> lam =
        poly.eval_char([&](std::int64_t n) { return table.char_value(a, n); });
    const double v = lam.real();
    sum.add(v);
    sum_sq.add(v * v);
    if (v > best) {
      best = v;
      best_a = a;
    }
  }
  const double n = static_cast<double>(q - 2);
  rep.best_index = best_a;
  rep.best_value = best;
  rep.mean = sum.value() / n;
  const double var = std::max(sum_sq.value() / n - rep.mean * rep.mean, 0.0);
  rep.stddev = std::sqrt(var);
  rep.best_is_quadratic = (best_a == rep.quadratic_index);
  return rep;
}

inline CharScanReport max_over_characters(std::int64_t q, double A,
                                          std::int64_t Y) {
  bool in_range = false;
  const double sigma = sigma_for_modulus(q, A, &in_range);
  const auto table = CharacterTable::build(q);
  const PrimeTable primes(std::max<std::int64_t>(Y, 2));
  const auto poly = LambdaPolynomial::build(Y, sigma, primes);
  return max_over_characters(table, poly, sigma, in_range);
}

struct CountReport {
  std::int64_t q = 0;
  std::int64_t count = 0;
  std::int64_t total = 0;
  double threshold = 0.0;
  double sigma_A = 0.0;
  bool theorem_range = false;
  bool include_principal = true;
};

// #N(q, x): characters whose proxy value meets the threshold
// (log2 q / log3 q) * ((e^A - 1)/A * log3 q - x). The threshold drops as x
// grows, so the count is nondecreasing in x.
inline CountReport count_exceeding(const CharacterTable& table,
                                   const LambdaPolynomial& poly, double A,
                                   double x, double sigma_A,
                                   bool theorem_range,
                                   bool include_principal = true) {
  if (!(x > 0.0)) throw std::domain_error("count_exceeding: x must be > 0");
  const std::int64_t q = table.modulus();
  const double log_q = std::log(static_cast<double>(q));
  const double log2_q = std::log(log_q);
  if (!(log2_q > 1.0))
    throw std::domain_error("count_exceeding: q too small for log3 q");
  const double log3_q = std::log(log2_q);

  CountReport rep;
  rep.q = q;
  rep.sigma_A = sigma_A;
  rep.theorem_range = theorem_range;
  rep.include_principal = include_principal;
  rep.threshold = log2_q / log3_q * (predicted_bound(A, log3_q) - x);
  const std::int64_t a_lo = include_principal ? 0 : 1;
  rep.total = q - 1 - a_lo;
  for (std::int64_t a = a_lo; a <= q - 2; ++a) {
    const std::complex<double> lam =
        poly.eval_char([&](std::int64_t n) { return table.char_value(a, n); });
    if (lam.real() >= rep.threshold) ++rep.count;
  }
  return rep;
}

// E is accepted for config echo only; it cancels out of the counting
// threshold.
inline CountReport count_exceeding(std::int64_t q, double A, double x,
                                   std::int64_t Y, double /*E*/,
                                   bool include_principal = true) {
  bool in_range = false;
  const double sigma = sigma_for_modulus(q, A, &in_range);
  const auto table = CharacterTable::build(q);
  const PrimeTable primes(std::max<std::int64_t>(Y, 2));
  const auto poly = LambdaPolynomial::build(Y, sigma, primes);
  return count_exceeding(table, poly, A, x, sigma, in_range,
                         include_principal);
}

}  // namespace zetares
