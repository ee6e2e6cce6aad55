#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "zetares/dirpoly.hpp"
#include "zetares/errors.hpp"
#include "zetares/parallel.hpp"
#include "zetares/resonator.hpp"
#include "zetares/rng.hpp"

namespace zetares {

// The search objective throughout is the proxy for -Re zeta'/zeta:
//   S(t) = Re sum_{n <= Y} Lambda(n) n^{-sigma - it}.
inline double objective(const LambdaPolynomial& poly, double t) {
  return poly.eval_at(t).real();
}

enum class SearchMethod { grid, refined, weighted_sample };

inline const char* to_string(SearchMethod m) {
  switch (m) {
    case SearchMethod::grid: return "grid";
    case SearchMethod::refined: return "refined";
    case SearchMethod::weighted_sample: return "weighted-sample";
  }
  return "unknown";
}

struct ExtremeRecord {
  double location = 0.0;  // t, or a character index on the q side
  double value = 0.0;     // objective at location, re-evaluated from scratch
  SearchMethod method = SearchMethod::grid;
  double grid_step = 0.0;
  bool refined = false;
};

// Threshold bookkeeping for the measure/count experiments:
//   f(T) = exp(-loglog T),
//   J_x  = (e^A-1)/A * log3 T - x + (log T)^{-E} + f(T)/2,
//   J~_x = J_x - f(T)/2,
//   threshold = (log2 T / log3 T) * (J~_x - (log T)^{-E}).
struct ThresholdSpec {
  double x = 0.0;
  double E = 0.0;
  double f_value = 0.0;
  double J_x = 0.0;
  double J_x_tilde = 0.0;
  double threshold = 0.0;
  double log2_scale = 0.0;
  double log3_scale = 0.0;

  static ThresholdSpec make(double log_scale, double A, double x, double E) {
    if (!(x > 0.0)) throw std::domain_error("ThresholdSpec: x must be > 0");
    if (!(log_scale > 1.0))
      throw std::domain_error("ThresholdSpec: log(scale) must exceed 1");
    ThresholdSpec ts;
    ts.x = x;
    ts.E = E;
    ts.log2_scale = std::log(log_scale);
    if (!(ts.log2_scale > 1.0))
      throw std::domain_error("ThresholdSpec: scale too small for log3");
    ts.log3_scale = std::log(ts.log2_scale);
    ts.f_value = std::exp(-ts.log2_scale);
    const double logE = std::exp(-E * ts.log2_scale);  // (log scale)^{-E}
    ts.J_x_tilde = predicted_bound(A, ts.log3_scale) - x + logE;
    ts.J_x = ts.J_x_tilde + 0.5 * ts.f_value;
    ts.threshold = ts.log2_scale / ts.log3_scale * (ts.J_x_tilde - logE);
    return ts;
  }
};

// Golden-section maximization of the objective on [t0-window, t0+window] to
// location tolerance 1e-9. Never returns less than the value at t0.
inline ExtremeRecord refine(const LambdaPolynomial& poly, double t0,
                            double window) {
  if (window < 0.0) throw std::domain_error("refine: window must be >= 0");
  ExtremeRecord rec;
  rec.method = SearchMethod::refined;
  rec.refined = true;
  if (window == 0.0) {
    rec.location = t0;
    rec.value = objective(poly, t0);
    return rec;
  }
  constexpr double kTol = 1e-9;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = t0 - window;
  double b = t0 + window;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(poly, c);
  double fd = objective(poly, d);
  while (b - a > kTol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(poly, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(poly, d);
    }
  }
  const double mid = 0.5 * (a + b);
  const double fmid = objective(poly, mid);
  const double f0 = objective(poly, t0);
  if (fmid >= f0) {
    rec.location = mid;
    rec.value = fmid;
  } else {
    rec.location = t0;
    rec.value = f0;
  }
  return rec;
}

namespace detail {

struct GridCandidate {
  std::int64_t k;
  double value;
};

inline bool candidate_less(const GridCandidate& a, const GridCandidate& b) {
  if (a.value != b.value) return a.value > b.value;
  return a.k < b.k;
}

}  // namespace detail

// Top-k refined local maxima of the objective over the anchored grid
// t = k * grid_step restricted to [T^beta, T]. The grid is absolute (phase
// anchored at t = 0), so windows for growing T scan supersets of the same
// points, and block decomposition is fixed independently of the worker
// count, which makes the output bit-identical for any number of workers.
inline std::vector<ExtremeRecord> scan_max(const LambdaPolynomial& poly,
                                           double T, double beta,
                                           double grid_step, int top_k,
                                           unsigned workers = 0) {
  if (!(grid_step > 0.0))
    throw std::domain_error("scan_max: grid_step must be > 0");
  if (top_k < 1) throw std::domain_error("scan_max: top_k must be >= 1");
  const double lo = std::pow(T, beta);
  const double hi = T;
  if (!(lo >= 10.0)) throw std::domain_error("scan_max: T^beta must be >= 10");
  if (!(lo < hi)) throw std::domain_error("scan_max: empty range");
  if (poly.cutoff() >= 3 &&
      grid_step > 0.1 / std::log(static_cast<double>(poly.cutoff())))
    throw resolution_error("scan_max: grid step too coarse for log Y");

  const std::int64_t k_lo = static_cast<std::int64_t>(std::ceil(lo / grid_step - 1e-9));
  const std::int64_t k_hi = static_cast<std::int64_t>(std::floor(hi / grid_step + 1e-9));
  if (k_hi < k_lo) throw std::domain_error("scan_max: no grid points in range");
  const std::int64_t count = k_hi - k_lo + 1;

  constexpr std::int64_t kBlock = 4 * static_cast<std::int64_t>(
      LambdaPolynomial::kAnchorInterval);
  const std::size_t n_blocks =
      static_cast<std::size_t>((count + kBlock - 1) / kBlock);
  const std::size_t keep = static_cast<std::size_t>(std::max(top_k, 4));

  std::vector<std::vector<detail::GridCandidate>> per_block(n_blocks);
  parallel_blocks(n_blocks, workers, [&](std::size_t b) {
    const std::int64_t from = k_lo + static_cast<std::int64_t>(b) * kBlock;
    const std::int64_t to = std::min(from + kBlock, k_hi + 1);
    // Edge values come from scratch so the block result does not depend on
    // neighbouring blocks.
    double prev = (from > k_lo)
                      ? objective(poly, static_cast<double>(from - 1) * grid_step)
                      : -std::numeric_limits<double>::infinity();
    double curr = 0.0;
    std::int64_t curr_k = from - 1;
    bool have_curr = false;
    std::vector<detail::GridCandidate> found;
    auto flush = [&](double next_value) {
      if (have_curr && curr > prev && curr >= next_value)
        found.push_back({curr_k, curr});
    };
    poly.eval_grid_visit(
        0.0, grid_step, static_cast<std::size_t>(from),
        static_cast<std::size_t>(to),
        [&](std::size_t k, std::complex<double> v) {
          const double val = v.real();
          if (have_curr) {
            flush(val);
            prev = curr;
          }
          curr = val;
          curr_k = static_cast<std::int64_t>(k);
          have_curr = true;
        });
    const double next = (to <= k_hi)
                            ? objective(poly, static_cast<double>(to) * grid_step)
                            : -std::numeric_limits<double>::infinity();
    flush(next);
    std::sort(found.begin(), found.end(), detail::candidate_less);
    if (found.size() > keep) found.resize(keep);
    per_block[b] = std::move(found);
  });

  std::vector<detail::GridCandidate> all;
  for (const auto& blk : per_block)
    all.insert(all.end(), blk.begin(), blk.end());
  if (all.empty()) {
    // Flat or monotone objective: fall back to the range endpoints.
    all.push_back({k_lo, objective(poly, static_cast<double>(k_lo) * grid_step)});
    if (k_hi != k_lo)
      all.push_back({k_hi, objective(poly, static_cast<double>(k_hi) * grid_step)});
    std::sort(all.begin(), all.end(), detail::candidate_less);
  } else {
    std::sort(all.begin(), all.end(), detail::candidate_less);
  }
  if (all.size() > static_cast<std::size_t>(top_k)) all.resize(top_k);

  std::vector<ExtremeRecord> records;
  records.reserve(all.size());
  for (const auto& cand : all) {
    const double t0 = static_cast<double>(cand.k) * grid_step;
    ExtremeRecord rec = refine(poly, t0, 2.0 * grid_step);
    rec.location = std::clamp(rec.location, lo, hi);
    rec.value = objective(poly, rec.location);
    rec.grid_step = grid_step;
    records.push_back(rec);
  }
  std::sort(records.begin(), records.end(),
            [](const ExtremeRecord& a, const ExtremeRecord& b) {
              if (a.value != b.value) return a.value > b.value;
              return a.location < b.location;
            });
  // Merge records that refined into the same peak.
  std::vector<ExtremeRecord> unique;
  for (const auto& rec : records) {
    bool dup = false;
    for (const auto& kept : unique)
      if (std::abs(kept.location - rec.location) < 0.5 * grid_step) dup = true;
    if (!dup) unique.push_back(rec);
  }
  return unique;
}

// Metropolis sampling with target density proportional to
// |R(t)|^2 Phi(t log T / T) on [T^beta, T]; log densities throughout since
// |R|^2 spans hundreds of orders of magnitude. Proposal: uniform window of
// width 2 pi / log 2. Draw k consumes counters (2k-1, 2k) of the stream, so
// a fixed seed reproduces the chain exactly.
inline ExtremeRecord weighted_sample_max(const LambdaPolynomial& poly,
                                         const ResonatorSpec& spec, double T,
                                         double beta, std::int64_t n_samples,
                                         std::uint64_t seed) {
  if (n_samples < 1)
    throw std::domain_error("weighted_sample_max: n_samples must be >= 1");
  const double lo = std::pow(T, beta);
  const double hi = T;
  if (!(lo < hi)) throw std::domain_error("weighted_sample_max: empty range");

  const double a = std::log(T) / T;
  const auto log_density = [&](double t) {
    return log_abs_R_squared(t, spec) - 0.5 * (t * a) * (t * a);
  };
  const double width = 2.0 * std::numbers::pi / std::log(2.0);

  CounterRng rng(seed);
  double t = rng.uniform(0, lo, hi);
  double ld = log_density(t);
  double best_t = t;
  double best_val = objective(poly, t);
  std::int64_t accepted = 0;

  for (std::int64_t i = 1; i < n_samples; ++i) {
    const double u1 = rng.uniform01(2 * static_cast<std::uint64_t>(i) - 1);
    const double u2 = rng.uniform01(2 * static_cast<std::uint64_t>(i));
    const double proposal = t + (u1 - 0.5) * width;
    if (proposal >= lo && proposal <= hi) {
      const double ld_new = log_density(proposal);
      if (std::log(std::max(u2, 1e-300)) < ld_new - ld) {
        t = proposal;
        ld = ld_new;
        ++accepted;
        const double val = objective(poly, t);
        if (val > best_val || (val == best_val && t < best_t)) {
          best_val = val;
          best_t = t;
        }
      }
    }
  }
  if (accepted == 0 && n_samples > 1)
    throw sampler_stall_error(
        "weighted_sample_max: no proposal accepted over the whole run");

  const double window =
      poly.cutoff() >= 3
          ? 0.1 / std::log(static_cast<double>(poly.cutoff()))
          : 0.1;
  ExtremeRecord rec = refine(poly, best_t, window);
  rec.location = std::clamp(rec.location, lo, hi);
  rec.value = objective(poly, rec.location);
  rec.method = SearchMethod::weighted_sample;
  rec.grid_step = 0.0;
  return rec;
}

// Equal-budget baseline: n_samples uniform draws, best one refined with the
// same protocol as the weighted sampler.
inline ExtremeRecord uniform_sample_max(const LambdaPolynomial& poly, double T,
                                        double beta, std::int64_t n_samples,
                                        std::uint64_t seed) {
  if (n_samples < 1)
    throw std::domain_error("uniform_sample_max: n_samples must be >= 1");
  const double lo = std::pow(T, beta);
  const double hi = T;
  if (!(lo < hi)) throw std::domain_error("uniform_sample_max: empty range");

  CounterRng rng(seed);
  double best_t = lo;
  double best_val = -std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i < n_samples; ++i) {
    const double t = rng.uniform(static_cast<std::uint64_t>(i), lo, hi);
    const double val = objective(poly, t);
    if (val > best_val || (val == best_val && t < best_t)) {
      best_val = val;
      best_t = t;
    }
  }
  const double window =
      poly.cutoff() >= 3
          ? 0.1 / std::log(static_cast<double>(poly.cutoff()))
          : 0.1;
  ExtremeRecord rec = refine(poly, best_t, window);
  rec.location = std::clamp(rec.location, lo, hi);
  rec.value = objective(poly, rec.location);
  rec.method = SearchMethod::refined;
  rec.grid_step = 0.0;
  return rec;
}

struct MeasureReport {
  double fraction = 0.0;
  double std_error = 0.0;
  double threshold = 0.0;
  std::int64_t hits = 0;
  std::int64_t n_samples = 0;
  double asymptotic_exponent = 0.0;  // 1 - (1-beta) e^{-x}, reported, not asserted
};

// Monte-Carlo estimate of meas(M(T,x)) / (T - T^beta): the fraction of
// uniformly sampled t whose objective meets the large-value threshold.
// Sample i is a pure function of (seed, i), and hit counts are integers, so
// the result is identical for any worker count.
inline MeasureReport measure_estimate(const LambdaPolynomial& poly, double T,
                                      double beta, double A, double x,
                                      double E, std::int64_t n_samples,
                                      std::uint64_t seed,
                                      unsigned workers = 0) {
  if (!(x > 0.0)) throw std::domain_error("measure_estimate: x must be > 0");
  if (n_samples < 100)
    throw std::domain_error("measure_estimate: need at least 100 samples");
  const double lo = std::pow(T, beta);
  const double hi = T;
  if (!(lo < hi)) throw std::domain_error("measure_estimate: empty range");

  const ThresholdSpec ts = ThresholdSpec::make(std::log(T), A, x, E);
  CounterRng rng(seed);

  constexpr std::int64_t kBlock = 4096;
  const std::size_t n_blocks =
      static_cast<std::size_t>((n_samples + kBlock - 1) / kBlock);
  std::vector<std::int64_t> block_hits(n_blocks, 0);
  parallel_blocks(n_blocks, workers, [&](std::size_t b) {
    const std::int64_t from = static_cast<std::int64_t>(b) * kBlock;
    const std::int64_t to = std::min(from + kBlock, n_samples);
    std::int64_t hits = 0;
    for (std::int64_t i = from; i < to; ++i) {
      const double t = rng.uniform(static_cast<std::uint64_t>(i), lo, hi);
      if (objective(poly, t) >= ts.threshold) ++hits;
    }
    block_hits[b] = hits;
  });

  MeasureReport rep;
  rep.threshold = ts.threshold;
  rep.n_samples = n_samples;
  for (std::int64_t h : block_hits) rep.hits += h;
  rep.fraction =
      static_cast<double>(rep.hits) / static_cast<double>(n_samples);
  rep.std_error = std::sqrt(
      std::max(rep.fraction * (1.0 - rep.fraction), 1e-12) /
      static_cast<double>(n_samples));
  rep.asymptotic_exponent = 1.0 - (1.0 - beta) * std::exp(-x);
  return rep;
}

struct KappaPlan {
  Parameters params;
  bool kappa1_ok = false;
  bool kappa2_ok = false;
};

// Picks kappa. Without x: the largest kappa on a 1e-6 grid satisfying both
//   (kappa1) beta + 2 A kappa < 1,
//   (kappa2) 2 A kappa + 3(1 - sigma_A + eps)/(2 - sigma_A + eps) < 1.
// With x: the closed form ((1-beta)/2A) exp(-x + (log T)^{-E} + f(T)),
// flagged for feasibility against both constraints. On the character side
// the range exponent plays no role: the first constraint is 2 A kappa < 1
// and the closed form drops the (1-beta) factor.
inline KappaPlan kappa_plan(double A, double beta, double log_scale,
                            double epsilon, std::optional<double> x,
                            double E, bool character_side = false) {
  if (!(A > 0.0)) throw std::domain_error("kappa_plan: A must be > 0");
  if (!(beta > 0.0 && beta < 1.0))
    throw std::domain_error("kappa_plan: beta outside (0,1)");
  if (!(log_scale > 1.0)) throw std::domain_error("kappa_plan: scale too small");

  constexpr double kGrid = 1e-6;
  const double bound1 =
      (character_side ? 1.0 : 1.0 - beta) / (2.0 * A);
  if (!x.has_value() && std::floor(bound1 / kGrid) * kGrid < kGrid)
    throw infeasible_error("kappa_plan: no kappa >= 1e-6 satisfies kappa1",
                           "kappa1");

  Parameters p;
  p.log_scale = log_scale;
  p.beta = beta;
  p.A = A;
  p.epsilon = epsilon;
  p.E = E;
  p = resolve_parameters(p, /*strict_sigma=*/true);

  const double ratio =
      3.0 * (1.0 - p.sigma_A + p.epsilon) / (2.0 - p.sigma_A + p.epsilon);
  const auto kappa1_ok = [&](double kappa) {
    return (character_side ? 0.0 : beta) + 2.0 * A * kappa < 1.0;
  };
  const auto kappa2_ok = [&](double kappa) {
    return 2.0 * A * kappa + ratio < 1.0;
  };

  KappaPlan plan;
  if (x.has_value()) {
    if (!(*x > 0.0)) throw std::domain_error("kappa_plan: x must be > 0");
    p.x = *x;
    const double logE = std::exp(-E * p.log2_scale);
    const double f = std::exp(-p.log2_scale);
    p.kappa = bound1 * std::exp(-*x + logE + f);
  } else {
    const double bound2 = (1.0 - ratio) / (2.0 * A);
    const std::string binding = bound1 <= bound2 ? "kappa1" : "kappa2";
    double kappa = std::floor(std::min(bound1, bound2) / kGrid) * kGrid;
    while (kappa >= kGrid && !(kappa1_ok(kappa) && kappa2_ok(kappa)))
      kappa -= kGrid;
    if (kappa < kGrid)
      throw infeasible_error("kappa_plan: no kappa >= 1e-6 satisfies both",
                             binding);
    p.kappa = kappa;
  }
  p.X = 0.0;
  p = resolve_parameters(p, /*strict_sigma=*/true);
  plan.params = p;
  plan.kappa1_ok = kappa1_ok(p.kappa);
  plan.kappa2_ok = kappa2_ok(p.kappa);
  return plan;
}

struct VwzPoint {
  double t = 0.0;
  double objective = 0.0;     // Re Lambda-sum at sigma_A
  double neg_re_logderiv = 0.0;  // -Re zeta'/zeta oracle, when available
  bool has_oracle = false;
};

struct VwzCounts {
  std::int64_t V = 0;
  std::int64_t W = 0;
  std::int64_t Z = 0;          // among points with an oracle value
  std::int64_t W_with_oracle = 0;
  std::int64_t W_verified_in_Z = 0;   // error below the gap and in Z
  std::int64_t W_unverifiable = 0;    // error above the gap
  double v_threshold = 0.0;
  double z_threshold = 0.0;
};

// V/W partition the sample at (log2/log3) J~_x; Z uses the oracle value
// against the slightly lower threshold. Membership W => Z is only checkable
// where the proxy error is below the threshold gap.
inline VwzCounts classify_vwz(std::span<const VwzPoint> points, double log_T,
                              double A, double x, double E) {
  const ThresholdSpec ts = ThresholdSpec::make(log_T, A, x, E);
  VwzCounts counts;
  counts.v_threshold = ts.log2_scale / ts.log3_scale * ts.J_x_tilde;
  counts.z_threshold = ts.threshold;
  const double gap = counts.v_threshold - counts.z_threshold;
  for (const auto& pt : points) {
    const bool in_w = pt.objective > counts.v_threshold;
    if (in_w)
      ++counts.W;
    else
      ++counts.V;
    if (pt.has_oracle) {
      const bool in_z = pt.neg_re_logderiv > counts.z_threshold;
      if (in_z) ++counts.Z;
      if (in_w) {
        ++counts.W_with_oracle;
        const double err = std::abs(pt.neg_re_logderiv - pt.objective);
        if (err <= gap) {
          if (in_z) ++counts.W_verified_in_Z;
        } else {
          ++counts.W_unverifiable;
        }
      }
    }
  }
  return counts;
}

}  // namespace zetares
