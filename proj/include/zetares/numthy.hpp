#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "zetares/compensated.hpp"
#include "zetares/errors.hpp"

namespace zetares {

// Linear sieve with a smallest-prime-factor array, so Lambda(n) and
// smoothness queries cost O(log n). log p is computed once per prime and
// reused everywhere, which keeps sums bit-identical across modules.
class PrimeTable {
public:
  static constexpr std::int64_t kMaxLimit = 250'000'000;

  explicit PrimeTable(std::int64_t limit) : limit_(limit) {
    if (limit < 2) throw std::domain_error("PrimeTable: limit must be >= 2");
    if (limit > kMaxLimit)
      throw resource_error("PrimeTable: limit exceeds memory budget");

    spf_.assign(static_cast<std::size_t>(limit) + 1, 0);
    for (std::int64_t i = 2; i <= limit; ++i) {
      if (spf_[i] == 0) {
        spf_[i] = static_cast<std::int32_t>(i);
        primes_.push_back(i);
      }
      for (std::int64_t p : primes_) {
        if (p > spf_[i] || i * p > limit) break;
        spf_[i * p] = static_cast<std::int32_t>(p);
      }
    }
    logs_.reserve(primes_.size());
    for (std::int64_t p : primes_)
      logs_.push_back(std::log(static_cast<double>(p)));
  }

  std::int64_t limit() const noexcept { return limit_; }
  const std::vector<std::int64_t>& primes() const noexcept { return primes_; }
  const std::vector<double>& prime_logs() const noexcept { return logs_; }

  std::int32_t smallest_prime_factor(std::int64_t n) const {
    if (n < 2 || n > limit_)
      throw std::range_error("smallest_prime_factor: n outside table");
    return spf_[static_cast<std::size_t>(n)];
  }

  bool is_prime(std::int64_t n) const {
    if (n < 2 || n > limit_) return false;
    return spf_[static_cast<std::size_t>(n)] == n;
  }

  // Cached log p for the prime at primes()[i].
  double log_prime(std::size_t i) const { return logs_[i]; }

  double log_of_prime(std::int64_t p) const {
    const auto it = std::lower_bound(primes_.begin(), primes_.end(), p);
    if (it == primes_.end() || *it != p)
      throw std::domain_error("log_of_prime: not a prime in table");
    return logs_[static_cast<std::size_t>(it - primes_.begin())];
  }

  // Lambda(n): log p when n = p^v, else 0.
  double von_mangoldt(std::int64_t n) const {
    if (n < 1) throw std::domain_error("von_mangoldt: n must be >= 1");
    if (n == 1) return 0.0;
    if (n > limit_) throw std::range_error("von_mangoldt: n outside table");
    const std::int64_t p = spf_[static_cast<std::size_t>(n)];
    std::int64_t m = n;
    while (m % p == 0) m /= p;
    if (m != 1) return 0.0;
    return log_of_prime(p);
  }

  // theta(x) = sum of log p over primes p <= x.
  double chebyshev_theta(double x) const {
    if (x > static_cast<double>(limit_))
      throw std::range_error("chebyshev_theta: x beyond table limit");
    CompensatedSum acc;
    for (std::size_t i = 0; i < primes_.size(); ++i) {
      if (static_cast<double>(primes_[i]) > x) break;
      acc.add(logs_[i]);
    }
    return acc.value();
  }

private:
  std::int64_t limit_;
  std::vector<std::int32_t> spf_;
  std::vector<std::int64_t> primes_;
  std::vector<double> logs_;
};

namespace detail {

inline void smooth_rec(const std::vector<std::int64_t>& ps, std::size_t i,
                       std::int64_t val, std::int64_t nmax,
                       std::vector<std::int64_t>& out) {
  constexpr std::size_t kMaxCount = 50'000'000;
  if (out.size() >= kMaxCount)
    throw resource_error("smooth_numbers: enumeration budget exceeded");
  out.push_back(val);
  for (std::size_t j = i; j < ps.size(); ++j) {
    if (val > nmax / ps[j]) break;
    smooth_rec(ps, j, val * ps[j], nmax, out);
  }
}

}  // namespace detail

// All n <= nmax whose prime factors all lie in `primes` (which must be
// ascending), including 1. Sorted ascending.
inline std::vector<std::int64_t> smooth_numbers_from(
    const std::vector<std::int64_t>& primes, std::int64_t nmax) {
  if (nmax < 1) throw std::domain_error("smooth_numbers: Nmax must be >= 1");
  std::vector<std::int64_t> out;
  detail::smooth_rec(primes, 0, 1, nmax, out);
  std::sort(out.begin(), out.end());
  return out;
}

// All X-smooth n <= nmax, including 1.
inline std::vector<std::int64_t> smooth_numbers(std::int64_t x_bound,
                                                std::int64_t nmax) {
  if (x_bound < 2) throw std::domain_error("smooth_numbers: X must be >= 2");
  if (nmax < 1) throw std::domain_error("smooth_numbers: Nmax must be >= 1");
  if (x_bound > PrimeTable::kMaxLimit)
    throw resource_error("smooth_numbers: X exceeds sieve budget");
  // Plain sieve for the prime list; nmax caps useful primes anyway.
  const std::int64_t top = std::min(x_bound, nmax);
  std::vector<std::int64_t> ps;
  if (top >= 2) {
    std::vector<char> composite(static_cast<std::size_t>(top) + 1, 0);
    for (std::int64_t i = 2; i <= top; ++i) {
      if (!composite[i]) {
        ps.push_back(i);
        for (std::int64_t j = i * i; j <= top; j += i) composite[j] = 1;
      }
    }
  }
  return smooth_numbers_from(ps, nmax);
}

}  // namespace zetares
