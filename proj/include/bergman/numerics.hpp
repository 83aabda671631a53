#pragma once

// Log-domain scalar types and the handful of certified primitives everything
// else is built from. All quantities in this library are positive (or signed
// sums of positives handled explicitly), so a value is represented by its
// natural log plus an is_zero flag.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

#include "bergman/errors.hpp"

namespace bergman {

inline constexpr double kLog2Pi = 1.8378770664093454835606594728112353;  // log(2*pi)

struct LogValue {
  bool is_zero = false;
  double log = 0.0;  // natural log of the magnitude; meaningless if is_zero

  static LogValue zero() { return {true, 0.0}; }
  static LogValue from_linear(double x) {
    return x == 0.0 ? zero() : LogValue{false, std::log(x)};
  }
  double linear() const { return is_zero ? 0.0 : std::exp(log); }
};

// A value together with a guaranteed relative-error radius: the true quantity
// lies in [value*(1-rel_err), value*(1+rel_err)].
struct Enclosure {
  LogValue value;
  double rel_err = 0.0;

  double lower_log() const { return value.log + std::log1p(-rel_err); }
  double upper_log() const { return value.log + std::log1p(rel_err); }
};

// log(e^a + e^b), stable for any magnitudes.
inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (std::isinf(a) && a < 0) return a;  // both -inf
  return a + std::log1p(std::exp(b - a));
}

inline LogValue log_add(LogValue a, LogValue b) {
  if (a.is_zero) return b;
  if (b.is_zero) return a;
  return {false, log_add(a.log, b.log)};
}

// log(e^a - e^b), requires a >= b; returns -inf when a == b.
inline double log_sub(double a, double b) {
  if (b > a) throw CancellationLoss("log_sub: negative result");
  if (b == a) return -std::numeric_limits<double>::infinity();
  return a + std::log1p(-std::exp(b - a));
}

// Accumulates sum(e^{x_i}) with a running-max renormalization so arbitrarily
// long sums never overflow the scaled linear accumulator.
class LogAccumulator {
 public:
  void add(double log_term) {
    if (empty_) {
      shift_ = log_term;
      sum_ = 1.0;
      empty_ = false;
      return;
    }
    if (log_term > shift_) {
      sum_ = sum_ * std::exp(shift_ - log_term) + 1.0;
      shift_ = log_term;
    } else {
      sum_ += std::exp(log_term - shift_);
    }
  }
  void add(LogValue v) {
    if (!v.is_zero) add(v.log);
  }
  bool empty() const { return empty_; }
  LogValue total() const {
    if (empty_ || sum_ == 0.0) return LogValue::zero();
    return {false, shift_ + std::log(sum_)};
  }

 private:
  bool empty_ = true;
  double shift_ = 0.0;
  double sum_ = 0.0;
};

inline LogValue log_sum(const std::vector<double>& log_terms) {
  LogAccumulator acc;
  for (double t : log_terms) acc.add(t);
  return acc.total();
}

// log(n!). Exact accumulation for n <= 20 (n! fits in a double exactly),
// Robbins Stirling beyond: the true value lies between the 1/(12n+1) and
// 1/(12n) corrections, and we return the upper form. The (n+1/2) log n term
// reaches ~10^6, so it is evaluated in extended precision: the final rounding
// to double would otherwise swamp the ~1/(144 n^2) Robbins gap.
inline double log_factorial(std::int64_t n) {
  if (n < 0) throw std::domain_error("log_factorial: negative argument");
  if (n <= 20) {
    double f = 1.0;
    for (std::int64_t i = 2; i <= n; ++i) f *= static_cast<double>(i);
    return std::log(f);
  }
  const long double nd = static_cast<long double>(n);
  return static_cast<double>(0.5L * std::log(2.0L * std::numbers::pi_v<long double>) +
                             (nd + 0.5L) * std::log(nd) - nd + 1.0L / (12.0L * nd));
}

// Certified bound on |log_factorial(n) - log(n!)|: the Robbins gap plus the
// rounding of the returned double (the raw value is ~n log n).
inline double log_factorial_abs_error(std::int64_t n) {
  if (n <= 20) return 4.0 * std::numeric_limits<double>::epsilon();
  const double nd = static_cast<double>(n);
  return 1.0 / (12.0 * nd) - 1.0 / (12.0 * nd + 1.0) +
         2.0 * nd * std::log(nd) * std::numeric_limits<double>::epsilon();
}

// Tail bound for sums of e^{phi(a)} with phi concave in a: past a term with
// log value `log_term`, if successive ratios are bounded by r < 1 (which
// concavity guarantees once the terms are decreasing), the tail is at most
// e^{log_term} * r/(1-r). Returned in linear scale relative to e^{scale}.
inline double concave_tail_bound(double log_term, double ratio, double scale) {
  if (!(ratio < 1.0) || ratio < 0.0) return std::numeric_limits<double>::infinity();
  return std::exp(log_term - scale) * ratio / (1.0 - ratio);
}

}  // namespace bergman
