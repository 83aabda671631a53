#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "bergman/verifier.hpp"

using namespace bergman;

TEST_CASE("theorem id round trip") {
  for (TheoremId id : all_theorems()) {
    auto back = theorem_from_string(to_string(id));
    REQUIRE(back.has_value());
    CHECK(*back == id);
  }
  CHECK_FALSE(theorem_from_string("T9_9").has_value());
  CHECK(all_theorems().size() == 11);
}

TEST_CASE("verifier output is deterministic for a fixed seed") {
  GridSpec grid;
  grid.k_list = {100, 200};
  grid.points_per_interval = 3;
  grid.seed = 42;
  const std::string j1 = to_json(verify_all(grid)).dump(2);
  const std::string j2 = to_json(verify_all(grid)).dump(2);
  CHECK(j1 == j2);

  GridSpec other = grid;
  other.seed = 43;
  CHECK(to_json(verify_all(other)).dump(2) != j1);
}

TEST_CASE("leading-band comparison passes on small k") {
  GridSpec grid;
  grid.k_list = {50, 100, 150};
  grid.seed = 7;
  for (const TheoremCheck& c : verify_theorem(TheoremId::T1_1a, grid)) {
    INFO("k=" << c.k << " t=" << c.t << " note=" << c.note);
    CHECK((c.skipped || c.passed));
  }
}

TEST_CASE("lattice sandwich passes for k in {79, 200, 500}") {
  GridSpec grid;
  grid.k_list = {79, 200, 500};
  grid.seed = 11;
  auto checks = verify_theorem(TheoremId::T1_1b, grid);
  bool saw_b2 = false, saw_b3 = false;
  for (const TheoremCheck& c : checks) {
    INFO("k=" << c.k << " b=" << c.b << " note=" << c.note);
    REQUIRE_FALSE(c.skipped);
    CHECK(c.passed);
    saw_b2 |= c.b == 2;
    saw_b3 |= c.b == 3;
  }
  CHECK(saw_b2);
  CHECK(saw_b3);
}

TEST_CASE("stirling factor comparison") {
  GridSpec grid;
  grid.k_list = {50, 500};
  auto checks = verify_theorem(TheoremId::Cor_Stirling, grid);
  for (const TheoremCheck& c : checks) {
    if (c.k == 50) {
      CHECK(c.skipped);  // below the stated k floor
    } else {
      REQUIRE_FALSE(c.skipped);
      CHECK(c.passed);
    }
  }
}

TEST_CASE("uniform limit at tiny t") {
  GridSpec grid;
  grid.k_list = {3, 5, 10};
  // The t = 1e-6 series peaks near a = k / t, so the default term budget is
  // too small for k = 10.
  grid.series.max_terms = 200'000'000;
  auto checks = verify_theorem(TheoremId::Cor_Limit, grid);
  REQUIRE(checks.size() == 3);
  for (const TheoremCheck& c : checks) {
    REQUIRE_FALSE(c.skipped);
    CHECK(c.passed);
    CHECK(c.t == 1e-6);
  }
}

TEST_CASE("summation identity cross-check at k = 20") {
  GridSpec grid;
  grid.k_list = {20};
  grid.seed = 5;
  for (const TheoremCheck& c : verify_theorem(TheoremId::Poisson_identity, grid)) {
    INFO("t=" << c.t << " note=" << c.note);
    CHECK((c.skipped || c.passed));
  }
}

TEST_CASE("side-peak lemmas pass on a small grid") {
  GridSpec grid;
  grid.k_list = {20, 60, 200};
  for (TheoremId id : {TheoremId::L_f1, TheoremId::L_fb}) {
    for (const TheoremCheck& c : verify_theorem(id, grid)) {
      INFO(to_string(id) << " k=" << c.k << " b=" << c.b);
      CHECK((c.skipped || c.passed));
      // The true margins shrink like e^{-k/2}, which falls below log-domain
      // rounding; allow the same slack the pass rule uses.
      if (!c.skipped)
        CHECK(c.margin >= -8.0 * std::numeric_limits<double>::epsilon() *
                              std::abs(c.rhs));
    }
  }
}

TEST_CASE("skips are recorded, not dropped") {
  GridSpec grid;
  grid.k_list = {1};  // below every theorem's floor
  for (TheoremId id : all_theorems()) {
    auto checks = verify_theorem(id, grid);
    REQUIRE_FALSE(checks.empty());
    for (const TheoremCheck& c : checks) {
      CHECK(c.skipped);
      CHECK_FALSE(c.note.empty());
    }
  }
}

TEST_CASE("checks are sorted by theorem, k, b, a, t") {
  GridSpec grid;
  grid.k_list = {200, 100};  // deliberately unsorted
  grid.seed = 3;
  auto checks = verify_theorem(TheoremId::T1_1b, grid);
  CHECK(std::is_sorted(checks.begin(), checks.end(),
                       [](const TheoremCheck& x, const TheoremCheck& y) {
                         if (x.k != y.k) return x.k < y.k;
                         return x.b < y.b;
                       }));
}

TEST_CASE("json schema") {
  GridSpec grid;
  grid.k_list = {100};
  auto j = to_json(verify_theorem(TheoremId::Cor_Limit, grid));
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 1);
  const auto& o = j[0];
  for (const char* key : {"theorem_id", "k", "t", "a", "b", "u", "lhs", "rhs", "margin",
                          "passed", "skipped", "note"})
    CHECK(o.contains(key));
  CHECK(o["theorem_id"] == "Cor_Limit");
  CHECK(o["k"] == 100);
  // Round trip through the parser.
  auto parsed = nlohmann::json::parse(j.dump());
  CHECK(parsed[0]["passed"].is_boolean());
}

TEST_CASE("csv header and row count") {
  GridSpec grid;
  grid.k_list = {100, 200};
  auto checks = verify_theorem(TheoremId::Cor_Limit, grid);
  const std::string csv = to_csv(checks);
  CHECK(csv.rfind("theorem_id,k,t,a,b,u,lhs,rhs,margin,passed,skipped,note\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + static_cast<long>(checks.size()));
}

TEST_CASE("neck profile table") {
  auto rows = neck_profile(2000, 10, 16);
  REQUIRE(rows.size() == 16);
  CHECK(rows.front().u == 0.0);
  for (const NeckProfileRow& r : rows) {
    CHECK(r.t == Catch::Approx(2000.0 * (1.0 - r.u) / 10.0));
    CHECK(r.oracle_log <= r.upper_log + 1e-9);
    if (!r.lower_is_zero) CHECK(r.oracle_log >= r.lower_log - 1e-9);
  }
  CHECK_THROWS_AS(neck_profile(2000, 10, 1), std::domain_error);
}
