#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "zetares/compensated.hpp"
#include "zetares/errors.hpp"
#include "zetares/numthy.hpp"

namespace zetares {

struct LambdaTerm {
  std::int64_t n;  // prime power p^v <= Y
  double coeff;    // Lambda(n) * n^{-sigma}, always positive
  double log_n;    // v * log p, bit-identical to the sieve's cached log p
};

// Sum over prime powers n <= Y of Lambda(n) n^{-sigma - it}; the working
// stand-in for -zeta'/zeta near the 1-line. Immutable after build, eval
// operations are pure.
class LambdaPolynomial {
public:
  static constexpr std::size_t kAnchorInterval = 1024;

  static LambdaPolynomial build(std::int64_t Y, double sigma,
                                const PrimeTable& table) {
    if (!(sigma > 0.0 && sigma <= 3.0))
      throw std::domain_error("LambdaPolynomial: sigma outside (0, 3]");
    if (Y < 1) throw std::domain_error("LambdaPolynomial: Y must be >= 1");
    if (Y > table.limit())
      throw std::range_error("LambdaPolynomial: Y beyond sieve limit");

    LambdaPolynomial poly;
    poly.Y_ = Y;
    poly.sigma_ = sigma;
    const auto& primes = table.primes();
    const auto& logs = table.prime_logs();
    for (std::size_t i = 0; i < primes.size() && primes[i] <= Y; ++i) {
      const double log_p = logs[i];
      std::int64_t n = primes[i];
      double log_n = log_p;
      while (n <= Y) {
        poly.terms_.push_back({n, log_p * std::exp(-sigma * log_n), log_n});
        if (n > Y / primes[i]) break;
        n *= primes[i];
        log_n += log_p;
      }
    }
    std::sort(poly.terms_.begin(), poly.terms_.end(),
              [](const LambdaTerm& a, const LambdaTerm& b) { return a.n < b.n; });
    CompensatedSum c0, c1;
    for (const auto& term : poly.terms_) {
      c0.add(term.coeff);
      c1.add(term.coeff * term.log_n);
    }
    poly.coeff_sum_ = c0.value();
    poly.lipschitz_ = c1.value();
    return poly;
  }

  std::int64_t cutoff() const noexcept { return Y_; }
  double sigma() const noexcept { return sigma_; }
  const std::vector<LambdaTerm>& terms() const noexcept { return terms_; }

  // sum of all coefficients = eval_at(0).real(); also the sup of |eval_at|.
  double coeff_sum() const noexcept { return coeff_sum_; }
  // sum of coeff * log n, a Lipschitz constant for t -> eval_at(t).
  double lipschitz() const noexcept { return lipschitz_; }

  std::complex<double> eval_at(double t) const {
    CompensatedSum re, im;
    for (const auto& term : terms_) {
      const double phase = t * term.log_n;
      re.add(term.coeff * std::cos(phase));
      im.add(-term.coeff * std::sin(phase));
    }
    return {re.value(), im.value()};
  }

  // Streamed evaluation at t0 + k*dt for k in [from, to). Per-term phase
  // rotation with a from-scratch re-anchor every kAnchorInterval steps
  // measured from `from`; callers that partition a grid must split at
  // multiples of kAnchorInterval to reproduce the single-pass values.
  template <class Visitor>
  void eval_grid_visit(double t0, double dt, std::size_t from, std::size_t to,
                       Visitor&& visit) const {
    if (!(dt > 0.0)) throw std::domain_error("eval_grid: dt must be > 0");
    const std::size_t m = terms_.size();
    if (m == 0) {
      for (std::size_t k = from; k < to; ++k)
        visit(k, std::complex<double>{0.0, 0.0});
      return;
    }
    std::vector<double> zr_v(m), zi_v(m), rr_v(m), ri_v(m), c_v(m), ln_v(m);
    double* __restrict zr = zr_v.data();
    double* __restrict zi = zi_v.data();
    double* __restrict rr = rr_v.data();
    double* __restrict ri = ri_v.data();
    double* __restrict c = c_v.data();
    double* __restrict ln = ln_v.data();
    for (std::size_t i = 0; i < m; ++i) {
      const double w = dt * terms_[i].log_n;
      rr[i] = std::cos(w);
      ri[i] = -std::sin(w);
      c[i] = terms_[i].coeff;
      ln[i] = terms_[i].log_n;
    }
    for (std::size_t k = from; k < to; ++k) {
      double sr = 0.0, si = 0.0;
      if ((k - from) % kAnchorInterval == 0) {
        const double t = t0 + static_cast<double>(k) * dt;
        for (std::size_t i = 0; i < m; ++i) {
          const double phase = t * ln[i];
          zr[i] = std::cos(phase);
          zi[i] = -std::sin(phase);
          sr += c[i] * zr[i];
          si += c[i] * zi[i];
        }
      } else {
        for (std::size_t i = 0; i < m; ++i) {
          const double nr = zr[i] * rr[i] - zi[i] * ri[i];
          const double ni = zr[i] * ri[i] + zi[i] * rr[i];
          zr[i] = nr;
          zi[i] = ni;
          sr += c[i] * nr;
          si += c[i] * ni;
        }
      }
      visit(k, std::complex<double>{sr, si});
    }
  }

  std::vector<std::complex<double>> eval_grid(double t0, double dt,
                                              std::size_t count) const {
    if (count < 1) throw std::domain_error("eval_grid: count must be >= 1");
    if (count > 200'000'000)
      throw resource_error("eval_grid: count exceeds memory budget");
    std::vector<std::complex<double>> out(count);
    eval_grid_visit(t0, dt, 0, count,
                    [&](std::size_t k, std::complex<double> v) { out[k] = v; });
    return out;
  }

  // Sum over prime powers n <= Y of Lambda(n) chi(n) n^{-sigma}; chi must
  // map int64 -> complex<double> and vanish on multiples of the modulus.
  template <class Chi>
  std::complex<double> eval_char(Chi&& chi) const {
    CompensatedSum re, im;
    for (const auto& term : terms_) {
      const std::complex<double> w = chi(term.n);
      re.add(term.coeff * w.real());
      im.add(term.coeff * w.imag());
    }
    return {re.value(), im.value()};
  }

private:
  std::int64_t Y_ = 1;
  double sigma_ = 1.0;
  double coeff_sum_ = 0.0;
  double lipschitz_ = 0.0;
  std::vector<LambdaTerm> terms_;
};

}  // namespace zetares
