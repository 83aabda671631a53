#pragma once

// The three proven approximation regimes (inside two-term, lattice, neck,
// outside/Poisson) with their theorem envelopes, plus automatic regime
// selection by smallest envelope.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>

#include "bergman/oracle.hpp"

namespace bergman {

struct Regime {
  enum class Tag { InsideTwoTerm, Lattice, Neck, Outside, Oracle };
  Tag tag = Tag::Oracle;
  std::int64_t a = 0;  // inside: bracketing integer
  std::int64_t b = 0;  // lattice/neck: lattice index
  double u = 0.0;      // neck: fractional offset 1 - t*b/k

  std::string name() const {
    switch (tag) {
      case Tag::InsideTwoTerm: return "inside";
      case Tag::Lattice: return "lattice";
      case Tag::Neck: return "neck";
      case Tag::Outside: return "outside";
      case Tag::Oracle: return "oracle";
    }
    return "?";
  }
};

struct ApproxResult {
  Enclosure value;
  double envelope = 0.0;      // proven relative envelope (may be inf/overflow)
  double envelope_log = 0.0;  // same bound in log domain
  Regime regime;
  // Lattice only: the sandwich is two-sided, S < dev < 2S; this is log(S).
  double lower_envelope_log = -std::numeric_limits<double>::infinity();
  // Inside only: the theorem's envelope is absolute; this is its log.
  double envelope_abs_log = -std::numeric_limits<double>::infinity();
};

namespace detail {
inline double env_linear(double env_log) {
  return env_log > 700.0 ? std::numeric_limits<double>::infinity() : std::exp(env_log);
}
}  // namespace detail

// f_b(t) = sum_{c >= 1-b} (1 + c/b)^k e^{-c t}, the relative profile of rho
// against the lattice leading term; f_b(k/b) - 1 is the lattice error.
inline Enclosure f_profile(std::int64_t k, double t, std::int64_t b, SeriesConfig cfg = {}) {
  if (b < 1) throw std::domain_error("f_profile: b must be >= 1");
  if (!(t > 0.0)) throw std::domain_error("f_profile: t must be positive");
  const double kd = static_cast<double>(k), bd = static_cast<double>(b);
  // Terms are a^k e^{-a t} / (b^k e^{-b t}) with a = b + c; reuse the peak-
  // outward walk of the oracle around a* = k/t and rescale.
  Enclosure s = power_series(k, t, cfg);
  const double lg = s.value.log - (kd * std::log(bd) - bd * t);
  return Enclosure{LogValue{false, lg}, s.rel_err};
}

// Theorem regime at the outermost lattice point t = k (b = 1):
// rho = t^{k+1} e^{-t} / (2*pi*(k-1)!) * (1 + eps), 0 < eps <= 2^{k+1} e^{-t}.
inline ApproxResult rho_lattice_b1(std::int64_t k, double t) {
  if (k < 2) throw std::domain_error("rho_lattice_b1: k must be >= 2");
  if (!(t > 0.0) || t > static_cast<double>(k))
    throw RegimeOutOfRange("rho_lattice_b1: requires 0 < t <= k");
  const double kd = static_cast<double>(k);
  const double lg = (kd + 1.0) * std::log(t) - t - kLog2Pi - log_factorial(k - 1);
  const double env_log = (kd + 1.0) * std::numbers::ln2 - t;
  ApproxResult r;
  r.value = Enclosure{LogValue{false, lg}, 2.0 * log_factorial_abs_error(k - 1)};
  r.envelope_log = env_log;
  r.envelope = detail::env_linear(env_log);
  r.lower_envelope_log = -std::numeric_limits<double>::infinity();  // eps > 0
  r.regime = {Regime::Tag::Lattice, 0, 1, 0.0};
  return r;
}

// Lattice points t = k/b, b >= 2, k/(b(b+1)) >= log 2:
// rho = k^{k+1} e^{-k} / (2 b pi (k-1)!) * (1 + eps), S < eps < 2S,
// S = (1+1/b)^k e^{-k/b} + (1-1/b)^k e^{k/b}.
inline ApproxResult rho_lattice(std::int64_t k, std::int64_t b) {
  if (k < 2) throw std::domain_error("rho_lattice: k must be >= 2");
  if (b < 2 || static_cast<double>(k) / (static_cast<double>(b) * (b + 1.0)) < std::numbers::ln2)
    throw RegimeOutOfRange("rho_lattice: requires b >= 2 and k/(b(b+1)) >= log 2");
  const double kd = static_cast<double>(k), bd = static_cast<double>(b);
  const double lg = (kd + 1.0) * std::log(kd) - kd - std::log(2.0 * bd) -
                    std::log(std::numbers::pi) - log_factorial(k - 1);
  const double s_up = kd * std::log1p(1.0 / bd) - kd / bd;
  const double s_dn = kd * std::log1p(-1.0 / bd) + kd / bd;
  const double s_log = log_add(s_up, s_dn);
  ApproxResult r;
  r.value = Enclosure{LogValue{false, lg}, 2.0 * log_factorial_abs_error(k - 1)};
  r.envelope_log = std::numbers::ln2 + s_log;
  r.envelope = detail::env_linear(r.envelope_log);
  r.lower_envelope_log = s_log;
  r.regime = {Regime::Tag::Lattice, 0, b, 0.0};
  return r;
}

// Between lattice points, inside region: rho is approximated by the two-term
// model (h_a + h_{a+1})/(2 pi (k-1)!), h_a(t) = t^{k+1} a^k e^{-a t}, with
// absolute error at most (E_a + E_{a+1}) * k^{k+1} e^{-k}/(2 pi (k-1)!),
// E_a = 2 (1+1/a)^k e^{-k/a}.
namespace detail {
inline void check_inside_domain(std::int64_t k, double t, std::int64_t a,
                                const char* who) {
  const double kd = static_cast<double>(k), ad = static_cast<double>(a);
  if (k < 55) throw RegimeOutOfRange(std::string(who) + ": requires k >= 55");
  if (a < 1 || ad > std::sqrt(kd) / std::log(kd) - 1.0)
    throw RegimeOutOfRange(std::string(who) + ": requires 1 <= a <= sqrt(k)/log(k) - 1");
  if (!(t > kd / (ad + 1.0)) || !(t < kd / ad))
    throw RegimeOutOfRange(std::string(who) + ": requires t in (k/(a+1), k/a)");
}
inline double log_h(std::int64_t k, double t, std::int64_t a) {
  const double kd = static_cast<double>(k), ad = static_cast<double>(a);
  return (kd + 1.0) * std::log(t) + kd * std::log(ad) - ad * t;
}
inline double log_E(std::int64_t k, std::int64_t a) {
  const double kd = static_cast<double>(k), ad = static_cast<double>(a);
  return std::numbers::ln2 + kd * std::log1p(1.0 / ad) - kd / ad;
}
}  // namespace detail

inline ApproxResult rho_inside_two_term(std::int64_t k, double t, std::int64_t a) {
  detail::check_inside_domain(k, t, a, "rho_inside_two_term");
  const double kd = static_cast<double>(k);
  const double norm = kLog2Pi + log_factorial(k - 1);
  const double lg = log_add(detail::log_h(k, t, a), detail::log_h(k, t, a + 1)) - norm;
  const double unit_log = (kd + 1.0) * std::log(kd) - kd - norm;  // k^{k+1}e^{-k}/(2pi(k-1)!)
  ApproxResult r;
  r.value = Enclosure{LogValue{false, lg}, 2.0 * log_factorial_abs_error(k - 1)};
  r.envelope_abs_log = log_add(detail::log_E(k, a), detail::log_E(k, a + 1)) + unit_log;
  r.envelope_log = r.envelope_abs_log - lg;
  r.envelope = detail::env_linear(r.envelope_log);
  r.regime = {Regime::Tag::InsideTwoTerm, a, 0, 0.0};
  return r;
}

// Golden-section search for the unique interior minimum of the two-term
// model. The search runs on ((k+2)/(a+1), k/a): on the full lattice interval
// (k/(a+1), k/a) the model still carries the h_{a+1} peak at t=(k+1)/(a+1)
// near the left edge, but right of (k+2)/(a+1) it is decreasing-then-
// increasing. That unimodality is verified by a grid scan before searching;
// a violation throws rather than silently returning a wrong minimizer.
inline std::pair<double, Enclosure> locate_interior_minimum(std::int64_t k, std::int64_t a) {
  const double kd = static_cast<double>(k), ad = static_cast<double>(a);
  {
    const double probe = 0.5 * (kd / (ad + 1.0) + kd / ad);
    detail::check_inside_domain(k, probe, a, "locate_interior_minimum");
  }
  auto f = [&](double t) { return log_add(detail::log_h(k, t, a), detail::log_h(k, t, a + 1)); };

  const double lo = (kd + 2.0) / (ad + 1.0), hi = kd / ad;
  // Unimodality scan: one descent run, then one ascent run, with eps-level
  // slack for plateaus near the minimum.
  {
    const int n = 64;
    std::vector<double> vals(n + 1);
    std::size_t arg_min = 0;
    for (int i = 0; i <= n; ++i) {
      vals[static_cast<std::size_t>(i)] = f(lo + (hi - lo) * i / n);
      if (vals[static_cast<std::size_t>(i)] < vals[arg_min]) arg_min = static_cast<std::size_t>(i);
    }
    for (std::size_t i = 0; i + 1 <= static_cast<std::size_t>(n); ++i) {
      const double slack = 64.0 * std::numeric_limits<double>::epsilon() *
                           std::max(std::abs(vals[i]), std::abs(vals[i + 1]));
      const bool ok = i < arg_min ? vals[i] >= vals[i + 1] - slack
                                  : vals[i + 1] >= vals[i] - slack;
      if (!ok)
        throw ConvexityViolation("locate_interior_minimum: unimodality scan failed");
    }
  }

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = lo, x4 = hi;
  double x2 = x4 - inv_phi * (x4 - x1);
  double x3 = x1 + inv_phi * (x4 - x1);
  double f2 = f(x2), f3 = f(x3);
  const double tol = 1e-8 * kd / ad;
  while (x4 - x1 > tol) {
    if (f2 < f3) {
      x4 = x3;
      x3 = x2;
      f3 = f2;
      x2 = x4 - inv_phi * (x4 - x1);
      f2 = f(x2);
    } else {
      x1 = x2;
      x2 = x3;
      f2 = f3;
      x3 = x1 + inv_phi * (x4 - x1);
      f3 = f(x3);
    }
  }
  const double t_min = 0.5 * (x1 + x4);
  if (!(t_min > (kd + 2.0) / (ad + 1.0)) || !(t_min < kd / ad))
    throw ConvexityViolation("locate_interior_minimum: minimizer outside ((k+2)/(a+1), k/a)");
  const double lg = f(t_min) - kLog2Pi - log_factorial(k - 1);
  return {t_min, Enclosure{LogValue{false, lg}, 2.0 * log_factorial_abs_error(k - 1)}};
}

// Theta-style neck sum gamma_b(u) = sum_{c in Z} e^{-(k/2)(c/b - u)^2},
// certified by Gaussian one-step ratio tail bounds.
inline Enclosure gamma_b(std::int64_t k, std::int64_t b, double u) {
  if (k < 1 || b < 1) throw std::domain_error("gamma_b: need k >= 1, b >= 1");
  const double kd = static_cast<double>(k), bd = static_cast<double>(b);
  auto lterm = [&](std::int64_t c) {
    const double d = static_cast<double>(c) / bd - u;
    return -0.5 * kd * d * d;
  };
  const std::int64_t c0 = std::llround(bd * u);
  double sum = std::exp(lterm(c0));  // scaled by e^0; peak term is <= 1 anyway
  std::int64_t n_terms = 1;
  double tail = 0.0;
  // Right: ratio term(c+1)/term(c) = exp(-(k/2)(2d/b + 1/b^2)), d = c/b - u,
  // strictly decreasing in c; certified once d >= 0.
  for (std::int64_t c = c0;; ++c) {
    const double d = static_cast<double>(c) / bd - u;
    const double r = std::exp(-0.5 * kd * (2.0 * d / bd + 1.0 / (bd * bd)));
    if (d >= 0.0 && r < 1.0) {
      const double t = std::exp(lterm(c)) * r / (1.0 - r);
      if (t <= 1e-16 * sum) {
        tail += t;
        break;
      }
    }
    sum += std::exp(lterm(c + 1));
    ++n_terms;
  }
  // Left, mirrored.
  for (std::int64_t c = c0;; --c) {
    const double d = u - static_cast<double>(c) / bd;
    const double r = std::exp(-0.5 * kd * (2.0 * d / bd + 1.0 / (bd * bd)));
    if (d >= 0.0 && r < 1.0) {
      const double t = std::exp(lterm(c)) * r / (1.0 - r);
      if (t <= 1e-16 * sum) {
        tail += t;
        break;
      }
    }
    sum += std::exp(lterm(c - 1));
    ++n_terms;
  }
  const double rounding = 4.0 * static_cast<double>(n_terms) * std::numeric_limits<double>::epsilon();
  return Enclosure{LogValue{false, std::log(sum)}, tail / sum + rounding};
}

// Proven two-sided neck bounds (lower, upper) for rho near t ~ sqrt(k).
// At lattice points (|t b / k - 1| <= 2^-40):
//   lower = e^{-1/(12k)}/b (k/2pi)^{3/2} [(1 - 8(log k)^4/k) gamma_b(0)
//            - (6 + 2 e^{8(log k)^3/(3 sqrt k)}) k^{-2 log k}]
//   upper = (1/b) (k/2pi)^{3/2} gamma_b(0)
// Between lattice points, with u = 1 - t b/k in (0, 1/(b+1)):
//   lower = t sqrt(k) e^{-1/(12k)}/(2pi)^{3/2} [(1 - (log k)^3/(3 sqrt k)) gamma_b(u)
//            - 12 e^{-(k/2)(log k/sqrt k - u)^2}]
//   upper = t sqrt(k)/(2pi)^{3/2} (1 + (log k)^3/(3 sqrt k)) gamma_b(u)
inline std::pair<Enclosure, Enclosure> rho_neck_bounds(std::int64_t k, double t, std::int64_t b) {
  const double kd = static_cast<double>(k), bd = static_cast<double>(b);
  if (!(bd > 3.0) || bd > std::sqrt(kd) * std::log(kd))
    throw RegimeOutOfRange("rho_neck_bounds: requires 3 < b <= sqrt(k) log k");
  const double logk = std::log(kd);
  const double norm32 = 1.5 * (logk - kLog2Pi);  // log (k/2pi)^{3/2}
  const bool at_lattice = std::abs(t * bd / kd - 1.0) <= std::ldexp(1.0, -40);

  if (at_lattice) {
    Enclosure g = gamma_b(k, b, 0.0);
    const double gv = g.value.linear();
    Enclosure upper{LogValue{false, -std::log(bd) + norm32 + g.value.log}, g.rel_err};
    const double c1 = 1.0 - 8.0 * std::pow(logk, 4) / kd;
    const double c2 = (6.0 + 2.0 * std::exp(8.0 * std::pow(logk, 3) / (3.0 * std::sqrt(kd)))) *
                      std::exp(-2.0 * logk * logk);
    const double bracket = c1 * gv - c2;
    Enclosure lower;
    if (bracket <= 0.0) {
      lower = Enclosure{LogValue::zero(), 0.0};
    } else {
      lower = Enclosure{LogValue{false, -1.0 / (12.0 * kd) - std::log(bd) + norm32 +
                                            std::log(bracket)},
                        g.rel_err * (c1 * gv / bracket)};
    }
    return {lower, upper};
  }

  const double u = 1.0 - t * bd / kd;
  if (!(u > 0.0) || !(u < 1.0 / (bd + 1.0)))
    throw RegimeOutOfRange("rho_neck_bounds: t must lie in (k/(b+1), k/b]");
  Enclosure g = gamma_b(k, b, u);
  const double gv = g.value.linear();
  const double fac = std::pow(logk, 3) / (3.0 * std::sqrt(kd));
  const double pre = std::log(t) + 0.5 * logk - 1.5 * kLog2Pi;  // log t sqrt(k)/(2pi)^{3/2}
  Enclosure upper{LogValue{false, pre + std::log1p(fac) + g.value.log}, g.rel_err};
  const double gap = logk / std::sqrt(kd) - u;
  const double corr = 12.0 * std::exp(-0.5 * kd * gap * gap);
  const double bracket = (1.0 - fac) * gv - corr;
  Enclosure lower;
  if (bracket <= 0.0) {
    lower = Enclosure{LogValue::zero(), 0.0};
  } else {
    lower = Enclosure{LogValue{false, pre - 1.0 / (12.0 * kd) + std::log(bracket)},
                      g.rel_err * ((1.0 - fac) * gv / bracket)};
  }
  return {lower, upper};
}

// Neck as an ApproxResult: value = geometric midpoint of the bounds,
// envelope = half the relative gap.
inline ApproxResult rho_neck(std::int64_t k, double t, std::int64_t b) {
  auto [lower, upper] = rho_neck_bounds(k, t, b);
  ApproxResult r;
  const double kd = static_cast<double>(k), bd = static_cast<double>(b);
  r.regime = {Regime::Tag::Neck, 0, b,
              std::abs(t * bd / kd - 1.0) <= std::ldexp(1.0, -40) ? 0.0 : 1.0 - t * bd / kd};
  if (lower.value.is_zero) {
    r.value = upper;
    r.envelope = std::numeric_limits<double>::infinity();
    r.envelope_log = std::numeric_limits<double>::infinity();
    return r;
  }
  const double mid = 0.5 * (lower.lower_log() + upper.upper_log());
  const double half_gap = 0.5 * (upper.upper_log() - lower.lower_log());
  r.value = Enclosure{LogValue{false, mid}, 0.0};
  r.envelope_log = half_gap + std::log1p(-std::exp(-half_gap));  // log(e^{gap} - 1)
  r.envelope = detail::env_linear(r.envelope_log);
  return r;
}

// Outside regime (t well below k): Poisson-resummed form
//   rho = k/(2 pi) * [1 + 2 sum_{xi>=1} cos((k+1) atan(2 pi xi/t))
//                                       (1 + (2 pi xi/t)^2)^{-(k+1)/2}]
// with proven envelope
//   eps_t = (t^2/(pi^2 (k-1)) + 2(k+1)/(k-1)) (1 + (2pi/t)^2)^{-(k+1)/2}.
inline ApproxResult rho_outside(std::int64_t k, double t, SeriesConfig cfg = {}) {
  if (k < 2) throw std::domain_error("rho_outside: k must be >= 2");
  if (!(t > 0.0)) throw std::domain_error("rho_outside: t must be positive");
  const double kd = static_cast<double>(k);
  if (t > kd) throw SlowConvergence("rho_outside: requires t <= k");

  double acc = 1.0;
  double abs_acc = 1.0;
  std::int64_t xi = 1;
  double tail;
  for (;; ++xi) {
    const double q = 2.0 * std::numbers::pi * static_cast<double>(xi) / t;
    const double mag = std::exp(-0.5 * (kd + 1.0) * std::log1p(q * q));
    // Integral tail bound: 2 * sum_{x > xi} mag(x) <= t^2/(2 pi^2 xi (k-1)) *
    // (1 + (2 pi xi/t)^2)^{-(k-1)/2}.
    tail = t * t / (std::numbers::pi * std::numbers::pi * static_cast<double>(xi) * (kd - 1.0)) *
           std::exp(-0.5 * (kd - 1.0) * std::log1p(q * q));
    acc += 2.0 * std::cos((kd + 1.0) * std::atan(q)) * mag;
    abs_acc += 2.0 * mag;
    if (tail <= cfg.rel_tol * std::abs(acc) && 2.0 * mag < std::abs(acc)) break;
    if (xi > cfg.max_terms) throw TermBudgetExceeded("rho_outside: k=" + std::to_string(k));
  }
  if (!(acc > 0.0)) throw CancellationLoss("rho_outside: resummed series lost its sign");

  const double q1 = 2.0 * std::numbers::pi / t;
  const double env_log = std::log(t * t / (std::numbers::pi * std::numbers::pi * (kd - 1.0)) +
                                  2.0 * (kd + 1.0) / (kd - 1.0)) -
                         0.5 * (kd + 1.0) * std::log1p(q1 * q1);
  ApproxResult r;
  const double rounding = 8.0 * static_cast<double>(xi) * std::numeric_limits<double>::epsilon() *
                          (abs_acc / acc);
  r.value = Enclosure{LogValue{false, std::log(kd) - kLog2Pi + std::log(acc)},
                      tail / acc + rounding};
  r.envelope_log = env_log;
  r.envelope = detail::env_linear(env_log);
  r.regime = {Regime::Tag::Outside, 0, 0, 0.0};
  return r;
}

// Picks the regime with the smallest proven envelope at (k, t); falls back to
// the oracle when no envelope beats 1e-2. Lattice candidacy uses the relative
// snap tolerance |t b/k - 1| <= 2^-40. Ties prefer Lattice, then Inside,
// then Neck, then Outside.
inline Regime select_regime(std::int64_t k, double t) {
  if (k < 2 || !(t > 0.0)) throw std::domain_error("select_regime: need k >= 2, t > 0");
  const double kd = static_cast<double>(k);
  double best = std::log(1e-2);
  Regime pick{Regime::Tag::Oracle, 0, 0, 0.0};

  const std::int64_t b_near = std::llround(kd / t);
  if (b_near >= 1 && std::abs(t * static_cast<double>(b_near) / kd - 1.0) <= std::ldexp(1.0, -40)) {
    try {
      ApproxResult lat = b_near == 1 ? rho_lattice_b1(k, kd) : rho_lattice(k, b_near);
      if (lat.envelope_log <= best) {
        best = lat.envelope_log;
        pick = lat.regime;
      }
    } catch (const RegimeOutOfRange&) {
    }
  }
  {
    const std::int64_t a = static_cast<std::int64_t>(std::floor(kd / t));
    if (a >= 1) {
      try {
        ApproxResult in = rho_inside_two_term(k, t, a);
        if (in.envelope_log < best) {
          best = in.envelope_log;
          pick = in.regime;
        }
      } catch (const RegimeOutOfRange&) {
      }
    }
  }
  {
    const std::int64_t b = static_cast<std::int64_t>(std::floor(kd / t));
    if (b > 3) {
      try {
        ApproxResult nk = rho_neck(k, t, b);
        if (nk.envelope_log < best) {
          best = nk.envelope_log;
          pick = nk.regime;
        }
      } catch (const RegimeOutOfRange&) {
      }
    }
  }
  if (t <= kd) {
    try {
      ApproxResult out = rho_outside(k, t);
      if (out.envelope_log < best) {
        best = out.envelope_log;
        pick = out.regime;
      }
    } catch (const SlowConvergence&) {
    } catch (const CancellationLoss&) {
    } catch (const TermBudgetExceeded&) {
    }
  }
  return pick;
}

// Evaluate rho at (k, t) through the best regime; oracle fallback.
inline ApproxResult rho_eval(std::int64_t k, double t, SeriesConfig cfg = {}) {
  Regime reg = select_regime(k, t);
  try {
    switch (reg.tag) {
      case Regime::Tag::Lattice:
        return reg.b == 1 ? rho_lattice_b1(k, t) : rho_lattice(k, reg.b);
      case Regime::Tag::InsideTwoTerm:
        return rho_inside_two_term(k, t, reg.a);
      case Regime::Tag::Neck:
        return rho_neck(k, t, reg.b);
      case Regime::Tag::Outside:
        return rho_outside(k, t, cfg);
      case Regime::Tag::Oracle:
        break;
    }
  } catch (const RegimeOutOfRange&) {
  }
  ApproxResult r;
  r.value = rho({k, t}, cfg);
  r.envelope = r.value.rel_err;
  r.envelope_log = r.envelope > 0.0 ? std::log(r.envelope)
                                    : -std::numeric_limits<double>::infinity();
  r.regime = {Regime::Tag::Oracle, 0, 0, 0.0};
  return r;
}

// Figure profile h(x) = sum_c e^{-(c-x)^2/2}: the k-independent shape of the
// neck oscillation.
inline double reference_profile(double x) {
  double s = 0.0;
  const double xf = x - std::floor(x);
  for (std::int64_t c = -10; c <= 11; ++c) {
    const double d = static_cast<double>(c) - xf;
    s += std::exp(-0.5 * d * d);
  }
  return s;
}

}  // namespace bergman
