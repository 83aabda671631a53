// Command-line surface: evaluation, sweeps, verification, figure data, and
// the surface-bounds calculator.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bergman/regimes.hpp"
#include "bergman/surface_bounds.hpp"
#include "bergman/verifier.hpp"

namespace {

constexpr int kExitVerifyFail = 1;
constexpr int kExitOutOfRange = 2;
constexpr int kExitBudget = 3;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// "overflow" when exp(value_log) is not representable.
std::string linear_or_overflow(double value_log) {
  if (value_log > 709.78) return "overflow";
  return fmt(std::exp(value_log));
}

struct OutputRecord {
  std::int64_t k;
  double t;
  std::string method;
  double value_log;
  double rel_err;
  double envelope;
};

std::string record_csv(const OutputRecord& r, bool header) {
  std::ostringstream os;
  if (header) os << "k,t,method,value_log,value,rel_err,envelope\n";
  os << r.k << ',' << fmt(r.t) << ',' << r.method << ',' << fmt(r.value_log) << ','
     << linear_or_overflow(r.value_log) << ',' << fmt(r.rel_err) << ',' << fmt(r.envelope)
     << '\n';
  return os.str();
}

nlohmann::ordered_json record_json(const OutputRecord& r) {
  nlohmann::ordered_json o;
  o["k"] = r.k;
  o["t"] = r.t;
  o["method"] = r.method;
  o["value_log"] = r.value_log;
  if (r.value_log > 709.78)
    o["value"] = "overflow";
  else
    o["value"] = std::exp(r.value_log);
  o["rel_err"] = r.rel_err;
  o["envelope"] = r.envelope;
  return o;
}

double default_rel_tol() {
  if (const char* env = std::getenv("BERGMAN_REL_TOL")) {
    try {
      double v = std::stod(env);
      if (v > 0.0 && v < 1.0) return v;
    } catch (...) {
    }
  }
  return 1e-13;
}

bergman::ApproxResult eval_method(std::int64_t k, double t, const std::string& method,
                                  bergman::SeriesConfig cfg) {
  using namespace bergman;
  if (method == "auto") return rho_eval(k, t, cfg);
  if (method == "oracle") {
    ApproxResult r;
    r.value = rho({k, t}, cfg);
    r.envelope = r.value.rel_err;
    r.envelope_log = r.envelope > 0 ? std::log(r.envelope) : -1e308;
    r.regime = {Regime::Tag::Oracle, 0, 0, 0.0};
    return r;
  }
  const double kd = static_cast<double>(k);
  if (method == "lattice") {
    const std::int64_t b = std::llround(kd / t);
    if (b < 1 || std::abs(t * static_cast<double>(b) / kd - 1.0) > std::ldexp(1.0, -40))
      throw RegimeOutOfRange("lattice: t is not a lattice point k/b");
    return b == 1 ? rho_lattice_b1(k, t) : rho_lattice(k, b);
  }
  if (method == "inside") {
    const std::int64_t a = static_cast<std::int64_t>(std::floor(kd / t));
    return rho_inside_two_term(k, t, a);
  }
  if (method == "neck") {
    const std::int64_t b = static_cast<std::int64_t>(std::floor(kd / t));
    return rho_neck(k, t, std::abs(t * std::round(kd / t) / kd - 1.0) <= std::ldexp(1.0, -40)
                              ? std::llround(kd / t)
                              : b);
  }
  if (method == "outside") return rho_outside(k, t, cfg);
  throw CLI::ValidationError("--method", "unknown method " + method);
}

void write_out(const std::string& path, const std::string& payload) {
  if (path.empty()) {
    std::cout << payload;
  } else {
    std::ofstream f(path, std::ios::binary);
    f << payload;
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace bergman;
  CLI::App app{"Certified Bergman kernel evaluator for the punctured disk"};
  app.require_subcommand(1);

  // ---- eval ----
  auto* eval = app.add_subcommand("eval", "evaluate rho at a single point");
  std::int64_t e_k = 0;
  double e_t = 0.0;
  std::string e_method = "auto";
  double e_rel_tol = default_rel_tol();
  bool e_json = false, e_csv = false;
  eval->add_option("--k", e_k, "weight k")->required();
  eval->add_option("--t", e_t, "t = -log|z|^2")->required();
  eval->add_option("--method", e_method)
      ->check(CLI::IsMember({"auto", "oracle", "inside", "lattice", "neck", "outside"}));
  eval->add_option("--rel-tol", e_rel_tol);
  eval->add_flag("--json", e_json);
  eval->add_flag("--csv", e_csv);

  // ---- sweep ----
  auto* sweep = app.add_subcommand("sweep", "evaluate rho across a t range (CSV)");
  std::int64_t s_k = 0;
  double s_tmin = 0.0, s_tmax = 0.0;
  int s_points = 0;
  bool s_log = false;
  std::string s_method = "auto", s_out;
  double s_rel_tol = default_rel_tol();
  sweep->add_option("--k", s_k)->required();
  sweep->add_option("--t-min", s_tmin)->required();
  sweep->add_option("--t-max", s_tmax)->required();
  sweep->add_option("--points", s_points)->required()->check(CLI::PositiveNumber);
  sweep->add_flag("--log-spacing", s_log);
  sweep->add_option("--method", s_method)
      ->check(CLI::IsMember({"auto", "oracle", "inside", "lattice", "neck", "outside"}));
  sweep->add_option("--rel-tol", s_rel_tol);
  sweep->add_option("--out", s_out);

  // ---- verify ----
  auto* verify = app.add_subcommand("verify", "run theorem checks over a k grid (JSON)");
  std::string v_theorem = "all", v_klist, v_out;
  std::uint64_t v_seed = 0;
  int v_points = 5;
  verify->add_option("--theorem", v_theorem)->required();
  verify->add_option("--k-list", v_klist, "comma-separated k values")->required();
  verify->add_option("--seed", v_seed);
  verify->add_option("--points", v_points)->check(CLI::PositiveNumber);
  verify->add_option("--out", v_out);

  // ---- figure ----
  auto* figure = app.add_subcommand("figure", "emit figure data (CSV)");
  std::string f_profile, f_out;
  std::int64_t f_k = 0, f_b = 0;
  int f_samples = 512;
  figure->add_option("--profile", f_profile)->required()
      ->check(CLI::IsMember({"neck-reference", "neck"}));
  figure->add_option("--k", f_k);
  figure->add_option("--b", f_b);
  figure->add_option("--samples", f_samples)->check(CLI::PositiveNumber);
  figure->add_option("--out", f_out);

  // ---- surface ----
  auto* surface = app.add_subcommand("surface", "surface-bound calculator (JSON)");
  SurfaceParams sp;
  double su_t = -1.0;
  std::string su_out;
  surface->add_option("--k", sp.k)->required();
  surface->add_option("--epsilon", sp.epsilon)->required();
  surface->add_option("--lambda", sp.lambda)->required();
  surface->add_option("--R", sp.R)->required();
  surface->add_option("--d", sp.d)->required();
  surface->add_option("--t", su_t, "evaluate the gradient envelope at this t");
  surface->add_option("--out", su_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 64;
  }

  try {
    if (*eval) {
      ApproxResult r = eval_method(e_k, e_t, e_method, SeriesConfig{e_rel_tol, 1'000'000'000});
      OutputRecord rec{e_k, e_t, r.regime.name(), r.value.value.log, r.value.rel_err, r.envelope};
      if (e_json)
        std::cout << record_json(rec).dump(2) << '\n';
      else
        std::cout << record_csv(rec, true);
      return 0;
    }

    if (*sweep) {
      if (!(s_tmax >= s_tmin) || (s_log && !(s_tmin > 0.0)))
        throw CLI::ValidationError("--t-min/--t-max", "bad range");
      std::ostringstream os;
      os << "k,t,method,value_log,value,rel_err,envelope,reason\n";
      for (int i = 0; i < s_points; ++i) {
        const double frac = s_points == 1 ? 0.0 : static_cast<double>(i) / (s_points - 1);
        const double t = s_log ? s_tmin * std::exp(frac * std::log(s_tmax / s_tmin))
                               : s_tmin + frac * (s_tmax - s_tmin);
        try {
          ApproxResult r = eval_method(s_k, t, s_method, SeriesConfig{s_rel_tol, 100'000'000});
          os << s_k << ',' << fmt(t) << ',' << r.regime.name() << ',' << fmt(r.value.value.log)
             << ',' << linear_or_overflow(r.value.value.log) << ',' << fmt(r.value.rel_err)
             << ',' << fmt(r.envelope) << ",\n";
        } catch (const std::exception& ex) {
          std::string reason = ex.what();
          for (char& ch : reason)
            if (ch == ',' || ch == '\n') ch = ';';
          os << s_k << ',' << fmt(t) << ",error,nan,nan,nan,nan," << reason << '\n';
        }
      }
      write_out(s_out, os.str());
      return 0;
    }

    if (*verify) {
      GridSpec grid;
      grid.seed = v_seed;
      grid.points_per_interval = v_points;
      std::stringstream ks(v_klist);
      std::string item;
      while (std::getline(ks, item, ','))
        if (!item.empty()) grid.k_list.push_back(std::stoll(item));
      if (grid.k_list.empty()) throw CLI::ValidationError("--k-list", "empty");

      std::vector<TheoremCheck> checks;
      if (v_theorem == "all") {
        checks = verify_all(grid);
      } else {
        auto id = theorem_from_string(v_theorem);
        if (!id) throw CLI::ValidationError("--theorem", "unknown theorem id " + v_theorem);
        checks = verify_theorem(*id, grid);
      }
      write_out(v_out, to_json(checks).dump(2) + "\n");
      for (const auto& c : checks)
        if (!c.skipped && !c.passed) {
          std::cerr << "FAIL " << to_string(c.theorem_id) << " k=" << c.k << " t=" << fmt(c.t)
                    << " margin=" << fmt(c.margin) << '\n';
          return kExitVerifyFail;
        }
      return 0;
    }

    if (*figure) {
      std::ostringstream os;
      if (f_profile == "neck-reference") {
        os << "x,h\n";
        for (int i = 0; i < f_samples; ++i) {
          const double x = 4.0 * static_cast<double>(i) / (f_samples - 1);
          os << fmt(x) << ',' << fmt(reference_profile(x)) << '\n';
        }
      } else {
        if (f_k <= 0 || f_b <= 0)
          throw CLI::ValidationError("--k/--b", "required for --profile neck");
        os << "u,lower,upper,oracle\n";
        for (const auto& row : neck_profile(f_k, f_b, f_samples)) {
          os << fmt(row.u) << ','
             << (row.lower_is_zero ? std::string("0") : linear_or_overflow(row.lower_log)) << ','
             << linear_or_overflow(row.upper_log) << ',' << linear_or_overflow(row.oracle_log)
             << '\n';
        }
      }
      write_out(f_out, os.str());
      return 0;
    }

    if (*surface) {
      AssumptionReport rep = check_assumptions(sp);
      DominanceReport dom = dominance_check(sp);
      nlohmann::ordered_json o;
      o["k"] = sp.k;
      o["epsilon"] = sp.epsilon;
      o["lambda"] = sp.lambda;
      o["r"] = sp.R;
      o["d"] = sp.d;
      for (int i = 0; i < 5; ++i) {
        o["assumptions"]["a" + std::to_string(i + 1)] = rep.ok[static_cast<std::size_t>(i)];
        o["margins"]["a" + std::to_string(i + 1)] = rep.margin[static_cast<std::size_t>(i)];
      }
      o["dominance"] = {{"log_i", dom.I.log},
                        {"log_ii", dom.II.log},
                        {"log_iii", dom.III.log},
                        {"i_gt_ii", dom.I_gt_II},
                        {"ii_gt_iii", dom.II_gt_III}};
      o["wk_threshold"] = wk_threshold(sp.k);
      if (rep.first_three()) {
        o["envelope_t15_log"] = envelope_T15(sp).log;
        if (su_t >= 0.0) {
          try {
            o["envelope_t16_log"] = envelope_T16(sp, su_t).log;
          } catch (const InapplicableAssumptions&) {
            o["envelope_t16_log"] = "out_of_region";
          }
        }
      } else {
        o["envelope_t15_log"] = "inapplicable";
      }
      write_out(su_out, o.dump(2) + "\n");
      return rep.first_three() ? 0 : 1;
    }
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << '\n';
    return 64;
  } catch (const RegimeOutOfRange& e) {
    std::cerr << "out of range: " << e.what() << '\n';
    return kExitOutOfRange;
  } catch (const SlowConvergence& e) {
    std::cerr << "out of range: " << e.what() << '\n';
    return kExitOutOfRange;
  } catch (const TermBudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const CancellationLoss& e) {
    std::cerr << "cancellation: " << e.what() << '\n';
    return kExitBudget;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 64;
  }
  return 0;
}
