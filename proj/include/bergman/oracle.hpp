#pragma once

// Exact-series reference evaluator ("the oracle"). Everything here is a
// certified enclosure: the returned rel_err covers series truncation,
// accumulated rounding, and the Robbins factorial error.

#include <cmath>
#include <cstdint>
#include <string>

#include "bergman/numerics.hpp"

namespace bergman {

struct KernelPoint {
  std::int64_t k = 0;
  double t = 0.0;  // t = -log|z|^2, t > 0
};

struct SeriesConfig {
  double rel_tol = 1e-12;
  std::int64_t max_terms = 10'000'000;
};

namespace detail {

// One peak-outward certified pass over terms e^{phi(a)}, a = 1, 2, ...
// phi must be concave in a (true for m*log(a) - a*t and its weighted
// variants), so once terms decrease away from the peak, the one-step ratio
// bounds every later ratio and gives a geometric tail certificate.
struct SeriesSum {
  double log_value;   // log of the accumulated sum
  double rel_err;     // truncation + rounding, relative
  std::int64_t terms;
};

}  // namespace detail

// S(m, t) = sum_{a>=1} a^m e^{-a t}, certified.
inline Enclosure power_series(std::int64_t m, double t, SeriesConfig cfg = {}) {
  if (!(t > 0.0)) throw std::domain_error("power_series: t must be positive");
  if (m < 0) throw std::domain_error("power_series: m must be >= 0");

  const double md = static_cast<double>(m);
  std::int64_t a0 = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::llround(md / t)));
  auto phi = [&](std::int64_t a) { return md * std::log(static_cast<double>(a)) - static_cast<double>(a) * t; };
  const double phi0 = phi(a0);

  // Linear accumulation scaled so the peak term is 1.
  double sum = 1.0;
  std::int64_t n_terms = 1;
  double tail_up = 0.0, tail_down = 0.0;

  // Upward walk: ratio term(a+1)/term(a) = ((a+1)/a)^m e^{-t}, decreasing.
  {
    double term = 1.0;
    std::int64_t a = a0;
    for (;;) {
      const double r = std::exp(md * std::log1p(1.0 / static_cast<double>(a)) - t);
      if (r < 1.0) {
        const double tail = term * r / (1.0 - r);
        if (tail <= cfg.rel_tol * sum) {
          tail_up = tail;
          break;
        }
      }
      if (++n_terms > cfg.max_terms)
        throw TermBudgetExceeded("power_series: m=" + std::to_string(m) + " t=" + std::to_string(t));
      term *= r;
      ++a;
      sum += term;
    }
  }

  // Downward walk: ratio term(a-1)/term(a) = ((a-1)/a)^m e^{t}, decreasing
  // as a decreases once below the peak.
  {
    double term = 1.0;
    std::int64_t a = a0;
    while (a > 1) {
      const double r = std::exp(md * std::log1p(-1.0 / static_cast<double>(a)) + t);
      if (r < 1.0) {
        const double tail = term * r / (1.0 - r);
        if (tail <= cfg.rel_tol * sum) {
          tail_down = tail;
          break;
        }
      }
      if (++n_terms > cfg.max_terms)
        throw TermBudgetExceeded("power_series: m=" + std::to_string(m) + " t=" + std::to_string(t));
      term *= r;
      --a;
      sum += term;
    }
  }

  const double rounding = 4.0 * static_cast<double>(n_terms) * std::numeric_limits<double>::epsilon();
  return Enclosure{LogValue{false, phi0 + std::log(sum)},
                   (tail_up + tail_down) / sum + rounding};
}

// Bergman kernel of the punctured disk with the complete hyperbolic metric,
// as a function of t = -log|z|^2:
//   rho(k, t) = t^{k+1} S(k, t) / (2*pi*(k-1)!)
inline Enclosure rho(KernelPoint p, SeriesConfig cfg = {}) {
  if (p.k < 2) throw std::domain_error("rho: k must be >= 2");
  Enclosure s = power_series(p.k, p.t, cfg);
  const double lg = static_cast<double>(p.k + 1) * std::log(p.t) + s.value.log -
                    kLog2Pi - log_factorial(p.k - 1);
  return Enclosure{LogValue{false, lg},
                   s.rel_err + 2.0 * log_factorial_abs_error(p.k - 1)};
}

// Norm of the gradient of rho in the hyperbolic metric: sqrt(2)*t*|d rho/dt|.
// The derivative is the signed series
//   d rho/dt = t^{k+1}/(2*pi*(k-1)!) * sum_a ((k+1)/t - a) a^k e^{-a t},
// split into positive and negative parts; throws CancellationLoss when the
// signed total is more than 1e8 times smaller than the magnitude sum.
inline Enclosure rho_gradient_norm(KernelPoint p, SeriesConfig cfg = {}) {
  if (p.k < 2) throw std::domain_error("rho_gradient_norm: k must be >= 2");
  const double t = p.t;
  const double kd = static_cast<double>(p.k);
  const double cross = (kd + 1.0) / t;  // weight (k+1)/t - a changes sign here

  auto phi = [&](std::int64_t a) { return kd * std::log(static_cast<double>(a)) - static_cast<double>(a) * t; };
  std::int64_t a0 = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::llround(kd / t)));
  const double scale = phi(a0);

  double pos = 0.0, neg = 0.0, mag_tail = 0.0;
  std::int64_t n_terms = 0;
  auto add = [&](std::int64_t a, double scaled_bare) {
    const double w = cross - static_cast<double>(a);
    (w >= 0 ? pos : neg) += std::abs(w) * scaled_bare;
  };

  // Upward walk from the peak. For a beyond the crossing the weight magnitude
  // |w| = a - cross grows by a factor <= 1 + 1/(a - cross) per step, so the
  // one-step ratio bound stays certified.
  {
    double bare = 1.0;  // e^{phi(a) - scale}
    std::int64_t a = a0;
    for (;;) {
      add(a, bare);
      ++n_terms;
      const double ad = static_cast<double>(a);
      const double r_bare = std::exp(kd * std::log1p(1.0 / ad) - t);
      if (ad > cross) {
        const double w = ad - cross;
        const double r = r_bare * (1.0 + 1.0 / w);
        if (r < 1.0) {
          const double tail = bare * w * r / (1.0 - r);
          if (tail <= cfg.rel_tol * (pos + neg)) {
            mag_tail += tail;
            break;
          }
        }
      }
      if (n_terms > cfg.max_terms)
        throw TermBudgetExceeded("rho_gradient_norm: k=" + std::to_string(p.k) + " t=" + std::to_string(t));
      bare *= r_bare;
      ++a;
    }
  }
  // Downward walk, weight magnitude grows by <= 1 + 1/(cross - a) per step.
  {
    double bare = 1.0;
    std::int64_t a = a0;
    while (a > 1) {
      const double ad = static_cast<double>(a);
      const double r_bare = std::exp(kd * std::log1p(-1.0 / ad) + t);
      if (ad < cross && r_bare < 1.0) {
        const double w = cross - ad;
        const double r = r_bare * (1.0 + 1.0 / w);
        if (r < 1.0) {
          const double tail = bare * w * r / (1.0 - r);
          if (tail <= cfg.rel_tol * (pos + neg)) {
            mag_tail += tail;
            break;
          }
        }
      }
      if (++n_terms > cfg.max_terms)
        throw TermBudgetExceeded("rho_gradient_norm: k=" + std::to_string(p.k) + " t=" + std::to_string(t));
      bare *= r_bare;
      --a;
      add(a, bare);
    }
  }

  const double magnitude = pos + neg;
  const double signed_sum = std::abs(pos - neg);
  if (signed_sum == 0.0 || magnitude / signed_sum > 1e8)
    throw CancellationLoss("rho_gradient_norm: k=" + std::to_string(p.k) + " t=" + std::to_string(t));

  const double rounding = 4.0 * static_cast<double>(n_terms) * std::numeric_limits<double>::epsilon();
  const double series_rel = (mag_tail / magnitude + rounding) * (magnitude / signed_sum);
  const double lg = 0.5 * std::numbers::ln2 + std::log(t) +                    // sqrt(2) * t
                    (kd + 1.0) * std::log(t) + scale + std::log(signed_sum) -  // t^{k+1} * |sum|
                    kLog2Pi - log_factorial(p.k - 1);
  return Enclosure{LogValue{false, lg},
                   series_rel + 2.0 * log_factorial_abs_error(p.k - 1)};
}

// Square of the normalizing constant of the monomial section z^a:
//   tau_a^2 = a^{k-1} / (2*pi*(k-2)!)
inline LogValue tau_sq(std::int64_t k, std::int64_t a) {
  if (k < 2 || a < 1) throw std::domain_error("tau_sq: need k >= 2, a >= 1");
  return {false, static_cast<double>(k - 1) * std::log(static_cast<double>(a)) -
                     kLog2Pi - log_factorial(k - 2)};
}

}  // namespace bergman
