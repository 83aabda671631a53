#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <utility>
#include <vector>

#include "bergman/regimes.hpp"

using namespace bergman;

TEST_CASE("f_profile: b=1 lemma bounds") {
  // 0 < f_1(k) - 1 < 2^k e^{-k}/(1 - e^{-k/2})
  for (std::int64_t k : {50, 100, 200}) {
    const double kd = static_cast<double>(k);
    Enclosure f1 = f_profile(k, kd, 1);
    const double dev = std::expm1(f1.value.log);
    const double bound = std::exp(kd * std::numbers::ln2 - kd) / (1.0 - std::exp(-kd / 2.0));
    // The true margin is ~e^{-k/2} relative, so the comparison only holds up
    // to the certified evaluation width.
    CHECK(dev - 2.0 * f1.rel_err < bound);
    CHECK(dev > -f1.rel_err * 2.0);  // positivity up to the certificate
  }
}

TEST_CASE("f_profile: b>=2 lemma bounds") {
  const std::int64_t k = 100;
  for (std::int64_t b : {2, 3}) {
    const double kd = 100.0, bd = static_cast<double>(b);
    Enclosure fb = f_profile(k, kd / bd, b);
    const double dev = std::expm1(fb.value.log);
    const double s_up = std::exp(kd * std::log1p(1.0 / bd) - kd / bd);
    const double s_dn = std::exp(kd * std::log1p(-1.0 / bd) + kd / bd);
    // Geometric tails: the exponent is concave in c, so the ascending side
    // contracts by e^{-k/(b(b+1))} per step and the descending side by
    // e^{-k/(b(b-1))}.
    const double bound = s_up / (1.0 - std::exp(-kd / (bd * (bd + 1.0)))) +
                         s_dn / (1.0 - std::exp(-kd / (bd * (bd - 1.0))));
    CHECK(dev > 0.0);
    CHECK(dev - 2.0 * fb.rel_err < bound);
  }
}

TEST_CASE("f_profile tends to 1 deep outside") {
  Enclosure f = f_profile(100, 1000.0, 1);
  CHECK(std::exp(f.value.log) == Catch::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("lattice b=1 containment at the outermost band") {
  const std::int64_t k = 100;
  for (double t : {90.0, 100.0}) {
    ApproxResult lead = rho_lattice_b1(k, t);
    Enclosure o = rho({k, t});
    const double dev = std::exp(o.value.log - lead.value.value.log) - 1.0;
    const double infl = o.rel_err + lead.value.rel_err;
    CHECK(dev + infl > 0.0);
    CHECK(dev - infl <= lead.envelope);
  }
  CHECK_THROWS_AS(rho_lattice_b1(100, 120.0), RegimeOutOfRange);
}

TEST_CASE("lattice b>=2 sandwich") {
  const std::int64_t k = 200, b = 2;
  ApproxResult lat = rho_lattice(k, b);
  Enclosure o = rho({k, 100.0});
  const double dev = std::exp(o.value.log - lat.value.value.log) - 1.0;
  const double infl = (1.0 + dev) * (o.rel_err + lat.value.rel_err);
  CHECK(dev + infl > std::exp(lat.lower_envelope_log));
  CHECK(dev - infl < lat.envelope);
  CHECK(lat.envelope == Catch::Approx(2.0 * std::exp(lat.lower_envelope_log)));
  CHECK_THROWS_AS(rho_lattice(100, 12), RegimeOutOfRange);  // k/(b(b+1)) < log 2
  CHECK_THROWS_AS(rho_lattice(100, 1), RegimeOutOfRange);
}

TEST_CASE("lattice envelope transcription and decay") {
  for (std::int64_t k : {200, 1000}) {
    const double kd = static_cast<double>(k);
    for (std::int64_t b = 2; static_cast<double>(b) < std::sqrt(kd) / std::log(kd); ++b) {
      const double bd = static_cast<double>(b);
      ApproxResult lat = rho_lattice(k, b);
      // Envelope = 2S with S dominated by its ascending term, so
      // log env <= 2 log 2 + k (log(1+1/b) - 1/b) ~ 2 log 2 - k/(2b^2).
      CHECK(lat.envelope_log <=
            2.0 * std::numbers::ln2 + kd * (std::log1p(1.0 / bd) - 1.0 / bd) + 1e-12);
    }
    // Envelope shrinks as k grows at fixed b.
    CHECK(rho_lattice(5 * k, 2).envelope_log < rho_lattice(k, 2).envelope_log);
  }
}

TEST_CASE("inside two-term endpoint equals the lattice leading term") {
  // h_a(k/a) = (k/a)^{k+1} a^k e^{-k}: at t=k/a the dominant two-term piece
  // reproduces the lattice value times 2 pi (k-1)!.
  const std::int64_t k = 400, a = 2;
  const double kd = 400.0, ad = 2.0;
  const double h = (kd + 1.0) * std::log(kd / ad) + kd * std::log(ad) - kd;
  const double lattice_log = rho_lattice(k, a).value.value.log;
  CHECK(h - kLog2Pi - log_factorial(k - 1) == Catch::Approx(lattice_log).epsilon(1e-13));
}

TEST_CASE("inside two-term containment") {
  const std::int64_t k = 400, a = 2;
  for (double t : {135.0, 150.0, 190.0}) {
    ApproxResult two = rho_inside_two_term(k, t, a);
    Enclosure o = rho({k, t});
    const double dev = std::abs(std::exp(o.value.log - two.value.value.log) - 1.0);
    const double env_rel = std::exp(two.envelope_abs_log - two.value.value.log);
    CHECK(dev <= env_rel + o.rel_err + two.value.rel_err);
  }
}

TEST_CASE("inside two-term preconditions") {
  CHECK_THROWS_AS(rho_inside_two_term(40, 25.0, 1), RegimeOutOfRange);   // k < 55
  CHECK_THROWS_AS(rho_inside_two_term(100, 45.0, 2), RegimeOutOfRange);  // a > sqrt(k)/log k - 1
  CHECK_THROWS_AS(rho_inside_two_term(400, 210.0, 2), RegimeOutOfRange); // t outside (k/3, k/2)
}

TEST_CASE("interior minimum location and convexity") {
  const std::vector<std::pair<std::int64_t, std::int64_t>> cases{{100, 1}, {400, 1}, {400, 2}};
  for (auto [k, a] : cases) {
    auto [t_min, v] = locate_interior_minimum(k, a);
    const double kd = static_cast<double>(k), ad = static_cast<double>(a);
    CHECK(t_min > (kd + 2.0) / (ad + 1.0));
    CHECK(t_min < kd / ad);
    // Grid scan agrees: no sampled point is lower than the minimum.
    for (int i = 1; i < 50; ++i) {
      const double t = kd / (ad + 1.0) + (kd / ad - kd / (ad + 1.0)) * i / 50.0;
      const double f = log_add((kd + 1.0) * std::log(t) + kd * std::log(ad) - ad * t,
                               (kd + 1.0) * std::log(t) + kd * std::log(ad + 1.0) - (ad + 1.0) * t) -
                       kLog2Pi - log_factorial(k - 1);
      CHECK(f >= v.value.log - 1e-9 * std::abs(v.value.log));
    }
  }
}

TEST_CASE("interior minimum satisfies the e^{-k/(17a^2)} bound") {
  const std::vector<std::pair<std::int64_t, std::int64_t>> cases{{100, 1}, {400, 2}};
  for (auto [k, a] : cases) {
    auto [t_min, v] = locate_interior_minimum(k, a);
    const double kd = static_cast<double>(k), ad = static_cast<double>(a);
    const double bound = -kd / (17.0 * ad * ad) + (kd + 1.0) * std::log(kd) - kd - kLog2Pi -
                         log_factorial(k - 1) + std::log(1.0 / ad + 1.0 / (ad + 1.0));
    CHECK(v.value.log <= bound);
  }
}

TEST_CASE("gamma_b basics") {
  // k/b^2 = 1 gives the reference profile scale: gamma(0) = sum e^{-c^2/2}.
  Enclosure g = gamma_b(100, 10, 0.0);
  CHECK(std::exp(g.value.log) == Catch::Approx(2.5066282880429055).epsilon(1e-12));
  // Periodicity: gamma_b(u + 1/b) = gamma_b(u).
  Enclosure g1 = gamma_b(10000, 100, 0.003);
  Enclosure g2 = gamma_b(10000, 100, 0.003 + 0.01);
  CHECK(g1.value.log == Catch::Approx(g2.value.log).margin(1e-12));
  // Symmetry: gamma_b(-u) = gamma_b(u).
  Enclosure g3 = gamma_b(10000, 100, -0.003);
  CHECK(g1.value.log == Catch::Approx(g3.value.log).margin(1e-12));
}

TEST_CASE("neck bounds contain the oracle at k=10^4") {
  const std::int64_t k = 10000;
  for (std::int64_t b : {99, 100}) {
    const double t = 10000.0 / static_cast<double>(b);
    auto [lower, upper] = rho_neck_bounds(k, t, b);
    Enclosure o = rho({k, t});
    CHECK(o.lower_log() <= upper.upper_log());
    if (!lower.value.is_zero) CHECK(o.upper_log() >= lower.lower_log());
  }
  // Interior point.
  const double t = 10000.0 / 100.0 * (1.0 - 0.004);
  auto [lower, upper] = rho_neck_bounds(k, t, 100);
  Enclosure o = rho({k, t});
  CHECK(o.lower_log() <= upper.upper_log());
  if (!lower.value.is_zero) CHECK(o.upper_log() >= lower.lower_log());
}

TEST_CASE("neck preconditions") {
  CHECK_THROWS_AS(rho_neck_bounds(10000, 3333.0, 3), RegimeOutOfRange);   // b <= 3
  CHECK_THROWS_AS(rho_neck_bounds(100, 0.05, 2000), RegimeOutOfRange);    // b > sqrt(k) log k
  CHECK_THROWS_AS(rho_neck_bounds(10000, 120.0, 100), RegimeOutOfRange);  // t not in (k/(b+1), k/b]
}

TEST_CASE("outside regime matches the oracle") {
  for (std::int64_t k : {20, 50}) {
    for (double t : {0.5, 2.0, 5.0}) {
      ApproxResult out = rho_outside(k, t);
      Enclosure o = rho({k, t});
      const double dev = std::abs(std::exp(out.value.value.log - o.value.log) - 1.0);
      CHECK(dev <= out.value.rel_err + o.rel_err + 1e-14);
    }
  }
}

TEST_CASE("outside value tends to k/(2 pi) as t -> 0") {
  ApproxResult out = rho_outside(100, 1e-3);
  CHECK(out.value.value.log == Catch::Approx(std::log(100.0) - kLog2Pi).margin(1e-12));
}

TEST_CASE("outside envelope below e^{-k} when 2 pi / t >= e") {
  for (std::int64_t k : {50, 100, 500}) {
    for (double t : {0.1, 1.0, 2.0 * std::numbers::pi / std::numbers::e}) {
      ApproxResult out = rho_outside(k, t);
      CHECK(out.envelope_log < -static_cast<double>(k));
    }
  }
}

TEST_CASE("outside rejects t > k") {
  CHECK_THROWS_AS(rho_outside(50, 51.0), SlowConvergence);
}

TEST_CASE("select_regime dispatch") {
  CHECK(select_regime(100, 1e-3).tag == Regime::Tag::Outside);
  CHECK(select_regime(400, 400.0).tag == Regime::Tag::Lattice);
  CHECK(select_regime(400, 400.0).b == 1);
  CHECK(select_regime(400, 200.0).tag == Regime::Tag::Lattice);
  CHECK(select_regime(400, 200.0).b == 2);
  // Interior of (k/2, k) at large k: inside two-term wins.
  CHECK(select_regime(10000, 7300.0).tag == Regime::Tag::InsideTwoTerm);
  // Near t ~ sqrt(k) between lattice points the Poisson envelope is
  // sharper than the neck sandwich, so honest comparison picks Outside.
  CHECK(select_regime(10000, 100.5).tag == Regime::Tag::Outside);
  // No proven envelope below 1e-2: fall back to the oracle.
  CHECK(select_regime(100, 45.0).tag == Regime::Tag::Oracle);
}

TEST_CASE("rho_eval agrees with the oracle everywhere it certifies") {
  for (std::int64_t k : {100, 400}) {
    const double kd = static_cast<double>(k);
    for (double t : {1e-3, 1.0, kd / 2.0, 0.8 * kd, kd}) {
      ApproxResult r = rho_eval(k, t);
      Enclosure o = rho({k, t});
      const double dev = std::abs(std::exp(r.value.value.log - o.value.log) - 1.0);
      if (std::isfinite(r.envelope))
        CHECK(dev <= r.envelope + r.value.rel_err + o.rel_err);
    }
  }
}

TEST_CASE("rho_eval is deterministic") {
  ApproxResult r1 = rho_eval(400, 123.456);
  ApproxResult r2 = rho_eval(400, 123.456);
  CHECK(r1.value.value.log == r2.value.value.log);
  CHECK(r1.regime.tag == r2.regime.tag);
}

TEST_CASE("reference profile is 1-periodic, peaked at integers") {
  for (double x : {0.0, 0.25, 0.5, 0.75, 1.5, 2.3}) {
    CHECK(reference_profile(x) == Catch::Approx(reference_profile(x + 1.0)).epsilon(1e-14));
  }
  CHECK(reference_profile(0.0) > reference_profile(0.1));
  CHECK(reference_profile(0.5) < reference_profile(0.4));
  CHECK(reference_profile(0.0) == Catch::Approx(2.5066282880429055).epsilon(1e-12));
}
