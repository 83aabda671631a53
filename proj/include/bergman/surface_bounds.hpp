#pragma once

// Effective-constant calculator for the punctured-Riemann-surface comparison:
// assumption predicates, the A_a/B_a/E bounds, the I/II/III dominance
// comparison, and the final error envelopes. Pure arithmetic in
// (k, epsilon, lambda, R, d); no sections are ever constructed.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

#include "bergman/numerics.hpp"

namespace bergman {

struct SurfaceParams {
  std::int64_t k = 3;
  double epsilon = 1.0;  // curvature lower bound: iR^L >= epsilon * omega
  double lambda = 0.0;   // Ricci lower bound: Ric(omega) >= lambda * omega
  double R = 0.5;        // coordinate disk radius, R <= 1/2
  double d = 1.0;        // degree of L

  void validate() const {
    if (k < 3) throw std::domain_error("SurfaceParams: k must be >= 3");
    if (!(epsilon > 0.0)) throw std::domain_error("SurfaceParams: epsilon must be > 0");
    if (!(R > 0.0) || R > 0.5) throw std::domain_error("SurfaceParams: R must be in (0, 1/2]");
    if (!(d > 0.0)) throw std::domain_error("SurfaceParams: d must be > 0");
  }
  // Derived quantities used throughout section-comparison bounds.
  double log_r2() const { return std::log(R / 2.0); }          // log(R/2) < 0
  double a1() const { return static_cast<double>(k - 2) / (-2.0 * std::log(R)); }
  double a2() const { return std::pow(static_cast<double>(k), 0.75); }
  double t1() const { return -2.0 * std::log(R) + 0.5; }
};

struct AssumptionReport {
  std::array<bool, 5> ok{};
  std::array<double, 5> margin{};  // log-domain slack; >= 0 iff ok
  bool all() const {
    for (bool b : ok)
      if (!b) return false;
    return true;
  }
  bool first_three() const { return ok[0] && ok[1] && ok[2]; }
};

// The five standing assumptions. All margins are "LHS - RHS" of the predicate
// rewritten so that >= 0 (or > 0 for assumption 1) means satisfied.
inline AssumptionReport check_assumptions(const SurfaceParams& p) {
  p.validate();
  const double kd = static_cast<double>(p.k);
  const double logk = std::log(kd);
  AssumptionReport rep;

  // 1. log k + log(-log R) - log(eps + lambda/k) > 0
  rep.margin[0] = logk + std::log(-std::log(p.R)) - std::log(p.epsilon + p.lambda / kd);
  rep.ok[0] = rep.margin[0] > 0.0;

  // 2. k - 2 >= (-9 log R)^4
  rep.margin[1] = std::log(kd - 2.0) - 4.0 * std::log(-9.0 * std::log(p.R));
  rep.ok[1] = rep.margin[1] >= 0.0;

  // 3. k >= 23190
  rep.margin[2] = logk - std::log(23190.0);
  rep.ok[2] = rep.margin[2] >= 0.0;

  // 4. k^{1/4} sqrt(k eps + lambda) (R/2)^{k/(-2e log(R/2))} <= 1
  rep.margin[3] = -(0.25 * logk + 0.5 * std::log(kd * p.epsilon + p.lambda) +
                    kd / (-2.0 * std::numbers::e * p.log_r2()) * p.log_r2());
  rep.ok[3] = rep.margin[3] >= 0.0;

  // 5. (log k)/4 >= log(-2e log(R/2)) - (1/k) log(eps + lambda/k)
  rep.margin[4] = 0.25 * logk - std::log(-2.0 * std::numbers::e * p.log_r2()) +
                  std::log(p.epsilon + p.lambda / kd) / kd;
  rep.ok[4] = rep.margin[4] >= 0.0;

  return rep;
}

// A_a = ((k-1)/(5 sqrt k)) (-2 e a log(R/2) / k)^{k-1} (R/2)^{2a}:
// the mass of the model section tau_a z^a outside radius R/2.
inline LogValue bound_A(const SurfaceParams& p, std::int64_t a) {
  p.validate();
  if (a < 1) throw std::domain_error("bound_A: a must be >= 1");
  const double kd = static_cast<double>(p.k), ad = static_cast<double>(a);
  const double lg = std::log(kd - 1.0) - std::log(5.0) - 0.5 * std::log(kd) +
                    (kd - 1.0) * std::log(2.0 * std::numbers::e * ad * (-p.log_r2()) / kd) +
                    2.0 * ad * p.log_r2();
  return {false, lg};
}

namespace detail {
// Extended precision internally: the k*log(...) terms reach ~10^5, and the
// theorem-envelope transcription check below demands 1-ulp log agreement.
inline long double log_bound_B_ext(const SurfaceParams& p, long double ad) {
  const long double kd = static_cast<long double>(p.k);
  const long double lr2 = std::log(static_cast<long double>(p.R) / 2.0L);
  return 0.5L * std::log(kd) + std::log(kd - 1.0L) - std::log(ad) -
         std::log(kd * static_cast<long double>(p.epsilon) + static_cast<long double>(p.lambda)) +
         kd * std::log(2.0L * std::numbers::e_v<long double> * ad * (-lr2) / kd) +
         2.0L * ad * lr2;
}
inline double log_bound_B(const SurfaceParams& p, double ad) {
  return static_cast<double>(log_bound_B_ext(p, static_cast<long double>(ad)));
}
}  // namespace detail

// B_a = (sqrt(k)(k-1)/(a(k eps + lambda))) (-2 e a log(R/2) / k)^k (R/2)^{2a}:
// the dbar-correction energy bound.
inline LogValue bound_B(const SurfaceParams& p, std::int64_t a) {
  p.validate();
  if (a < 1) throw std::domain_error("bound_B: a must be >= 1");
  return {false, detail::log_bound_B(p, static_cast<double>(a))};
}

// log of B_{a+1}/B_a = ((a+1)/a)^{k-1} (R/2)^2; positive while
// a <= (k-1)/(-2 log(R/2)).
inline double bound_B_ratio_log(const SurfaceParams& p, std::int64_t a) {
  p.validate();
  if (a < 1) throw std::domain_error("bound_B_ratio_log: a must be >= 1");
  return static_cast<double>(p.k - 1) * std::log1p(1.0 / static_cast<double>(a)) +
         2.0 * p.log_r2();
}

struct DominanceReport {
  LogValue I, II, III;
  bool I_gt_II = false;
  bool II_gt_III = false;
};

// The three competing tails in the section-comparison lemma:
//   I   = 2 a2 B_{a2}                    (Gram-Schmidt corrections, a <= a2)
//   II  = 6 k^{(k-1)/8} e^{k - k^{9/8}}  (bare monomials a2 < i <= a1)
//   III = 2 u1 (u2(a1))^2                (far tail i > a1)
// The proof needs I > II > III so that I controls everything.
inline DominanceReport dominance_check(const SurfaceParams& p) {
  p.validate();
  const double kd = static_cast<double>(p.k);
  const double logk = std::log(kd);
  DominanceReport rep;

  rep.I = {false, std::numbers::ln2 + std::log(p.a2()) + detail::log_bound_B(p, p.a2())};
  rep.II = {false, std::log(6.0) + (kd - 1.0) / 8.0 * logk + kd - std::pow(kd, 9.0 / 8.0)};

  const double km2 = kd - 2.0;
  const double log_u1 = std::log(1.5) - std::log(p.a1() - km2 / (-2.0 * p.log_r2())) +
                        km2 * (std::log(-p.log_r2()) - std::log(p.t1())) +
                        (kd - 1.0) * (0.375 * std::log(km2) - std::log(-p.log_r2()));
  const double log_u2_a1 = -p.a1() * (0.88 + std::pow(km2, 0.375) / 4.0 + 2.0 * p.log_r2());
  rep.III = {false, std::numbers::ln2 + log_u1 + 2.0 * log_u2_a1};

  rep.I_gt_II = rep.I.log > rep.II.log;
  rep.II_gt_III = rep.II.log > rep.III.log;
  return rep;
}

// Relative-error envelope of the surface comparison theorem:
//   |rho_k - rho_{0,k}| <= 50 (1+d) a2 sqrt(B_{a2}) * rho_{0,k}   on W_k.
// Computed by two independently arranged routes (the compact form above and
// its full expansion) and cross-asserted to within 1 ulp of the log.
inline LogValue envelope_T15(const SurfaceParams& p) {
  if (!check_assumptions(p).first_three())
    throw InapplicableAssumptions("envelope_T15: assumptions 1-3 required");
  const long double kd = static_cast<long double>(p.k);
  const long double logk = std::log(kd);
  const long double a2 = std::pow(kd, 0.75L);
  const long double lr2 = std::log(static_cast<long double>(p.R) / 2.0L);
  const long double coef = std::log(50.0L * (1.0L + static_cast<long double>(p.d)));
  const double route1 =
      static_cast<double>(coef + std::log(a2) + 0.5L * detail::log_bound_B_ext(p, a2));
  const double route2 = static_cast<double>(
      coef + 0.625L * logk - kd / 8.0L * logk + 0.5L * std::log(kd - 1.0L) -
      0.5L * std::log(kd * static_cast<long double>(p.epsilon) + static_cast<long double>(p.lambda)) +
      0.5L * kd * std::log(2.0L * std::numbers::e_v<long double> * (-lr2)) + a2 * lr2);
  const double ulp = std::max(std::abs(route1) * std::numeric_limits<double>::epsilon(),
                              std::numeric_limits<double>::denorm_min());
  if (std::abs(route1 - route2) > ulp)
    throw std::logic_error("envelope_T15: route disagreement beyond 1 ulp");
  return {false, route1};
}

// t-threshold of the W_k region: |z| <= e^{-(k-2)^{3/8}} iff t >= 2(k-2)^{3/8}.
inline double wk_threshold(std::int64_t k) {
  if (k < 3) throw std::domain_error("wk_threshold: k must be >= 3");
  return 2.0 * std::pow(static_cast<double>(k - 2), 0.375);
}

// Gradient-difference envelope:
//   |grad(rho_k - rho_{0,k})| <= (1 + d/k^2) 25 sqrt(2) k t sqrt(a2 B_{a2}) rho_{0,k}
// for t >= wk_threshold(k), requiring additionally 2k^{3/4} >= log(eps+lambda/k)/log(R/2).
inline LogValue envelope_T16(const SurfaceParams& p, double t) {
  if (!check_assumptions(p).first_three())
    throw InapplicableAssumptions("envelope_T16: assumptions 1-3 required");
  const double kd = static_cast<double>(p.k);
  if (2.0 * p.a2() < std::log(p.epsilon + p.lambda / kd) / p.log_r2())
    throw InapplicableAssumptions("envelope_T16: 2k^{3/4} >= log(eps+lambda/k)/log(R/2) required");
  if (!(t >= wk_threshold(p.k)))
    throw InapplicableAssumptions("envelope_T16: t must be >= the W_k threshold");
  const double lg = std::log1p(p.d / (kd * kd)) + std::log(25.0) + 0.5 * std::numbers::ln2 +
                    std::log(t) + std::log(kd) +
                    0.5 * (std::log(p.a2()) + detail::log_bound_B(p, p.a2()));
  return {false, lg};
}

}  // namespace bergman
