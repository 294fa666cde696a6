// Acceptance run: one PASS/FAIL line per criterion.
//
// Usage: heiscr_acceptance [--cli PATH] [--expect-fail N]...
// Exit status is 0 when every criterion passes, except those named with
// --expect-fail, which must fail (a known limitation that should not pass silently).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "heiscr/crmaps.hpp"
#include "heiscr/error.hpp"
#include "heiscr/fields.hpp"
#include "heiscr/movesphere.hpp"
#include "heiscr/rng.hpp"
#include "heiscr/verify.hpp"

#ifndef HEISCR_CLI_PATH
#define HEISCR_CLI_PATH "heiscr"
#endif

using namespace heiscr;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Runs the named checks with their registered settings and a runtime budget.
Outcome suite_criterion(const std::vector<std::string>& names, double budget_s) {
  std::vector<CheckSpec> suite;
  for (const auto& n : names) suite.push_back(default_check(n, 42));
  auto t0 = std::chrono::steady_clock::now();
  auto results = run_suite(suite);
  double elapsed = seconds_since(t0);
  bool pass = elapsed < budget_s;
  std::string detail;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    pass = pass && r.pass;
    if (!detail.empty()) detail += ", ";
    detail += r.name + " " + sci(r.max_err) + (r.pass ? "" : " > " + sci(suite[i].tolerance));
  }
  detail += "; " + sci(elapsed) + " s of " + sci(budget_s) + " s";
  return {pass, detail};
}

Outcome fixed_point_criterion() {
  CounterRng rng(42, 7);
  double worst_res = 0.0, worst_norm = 0.0;
  int worst_it = 0;
  int cases = 0;
  for (int n = 1; n <= 2; ++n) {
    for (int k = 0; k < 10; ++k) {
      FBetaParams fp{rng.uniform(0.5, 6.0), rng.uniform(0.25, 4.0)};
      std::vector<Complex> z;
      for (int j = 0; j < n; ++j) z.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1));
      HPoint dir(std::move(z), rng.uniform(-1, 1));
      HPoint zeta = dilate(1e3 / koranyi_norm(dir), dir);
      try {
        auto r = fixed_point_center(radius_map(ScalarField::fbeta(fp, n), fp.nu, 1.0), fp.beta,
                                    zeta, 0.1);
        worst_res = std::max(worst_res, r.residual);
        worst_norm = std::max(worst_norm, koranyi_norm(r.center));
        worst_it = std::max(worst_it, r.iterations);
        ++cases;
      } catch (const Error& e) {
        return {false, e.what()};
      }
    }
  }
  bool pass = worst_res <= 1e-8 && worst_norm <= 0.1 && worst_it < 10000;
  return {pass, std::to_string(cases) + " cases, max residual " + sci(worst_res) +
                    ", max |xi*| " + sci(worst_norm) + ", max iterations " +
                    std::to_string(worst_it)};
}

Outcome moving_spheres_criterion() {
  const FBetaParams fp{2.0, 1.0};
  const ScalarField f = ScalarField::fbeta(fp, 1);
  std::vector<HPoint> grid;
  const double ticks[] = {-1.0, -0.5, 0.0, 0.5, 1.0};
  for (double x : ticks) {
    for (double t : ticks) grid.push_back(HPoint({Complex(x, 0.0)}, t));
  }
  SphereConfig cfg;
  cfg.samples = 100000;
  cfg.bisection_steps = 30;
  cfg.curve_factors = {0.99, 2.0};
  cfg.curve_samples = 100000;
  cfg.equality_samples = 10000;
  cfg.seed = 42;

  auto t0 = std::chrono::steady_clock::now();
  auto reports = moving_spheres_demo(f, fp.beta, grid, cfg);
  double elapsed = seconds_since(t0);

  int ok = 0;
  double worst_rel = 0.0, worst_resid = 0.0;
  std::string first_failure;
  for (const auto& r : reports) {
    std::string why;
    if (r.error) {
      why = *r.error;
    } else {
      const double want = lambda_of_xi(fp, r.xi);
      const double rel = std::abs(r.lambda_underline - want) / want;
      worst_rel = std::max(worst_rel, rel);
      worst_resid = std::max(worst_resid, r.kelvin_residual);
      if (rel > 1e-2) why = "lambda off by " + sci(rel);
      else if (r.curve[0].measure != 0.0) why = "violations at 0.99 lambda";
      else if (!(r.curve[1].measure > 0.0)) why = "no violations at 2 lambda";
      else if (r.kelvin_residual > 1e-4) why = "Kelvin residual " + sci(r.kelvin_residual);
    }
    if (why.empty()) ++ok;
    else if (first_failure.empty()) first_failure = why;
  }
  bool pass = ok == static_cast<int>(reports.size()) && elapsed < 120.0;
  std::string detail = std::to_string(ok) + "/" + std::to_string(reports.size()) +
                       " centers ok, max lambda rel err " + sci(worst_rel) +
                       ", max Kelvin residual " + sci(worst_resid) + "; " + sci(elapsed) + " s";
  if (!first_failure.empty()) detail += "; first failure: " + first_failure;
  return {pass, detail};
}

Outcome determinism_criterion(const std::string& cli) {
  auto capture = [&](std::string& out) {
    std::string cmd = "\"" + cli + "\" verify --seed 42";
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return -1;
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, got);
    return pclose(p);
  };
  std::string a, b;
  int sa = capture(a), sb = capture(b);
  if (sa != 0 || sb != 0) {
    return {false, "verify exited with status " + std::to_string(sa) + "/" + std::to_string(sb)};
  }
  bool same = !a.empty() && a == b;
  return {same, std::to_string(a.size()) + " bytes, " + (same ? "identical" : "different")};
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli = HEISCR_CLI_PATH;
  std::set<int> expect_fail;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--cli" && i + 1 < argc) {
      cli = argv[++i];
    } else if (a == "--expect-fail" && i + 1 < argc) {
      expect_fail.insert(std::stoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--cli PATH] [--expect-fail N]...\n", argv[0]);
      return 2;
    }
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"algebra and metric identities",
       [] {
         return suite_criterion({"group_axioms", "norm_homogeneity", "cr_inversion_norm",
                                 "reflection_identity", "involution", "ball_swap"},
                                10.0);
       }},
      {"functional equation", [] { return suite_criterion({"functional_equation"}, 5.0); }},
      {"conformal identity", [] { return suite_criterion({"conformal_identity"}, 30.0); }},
      {"bubble PDE residual", [] { return suite_criterion({"bubble_pde_residual"}, 60.0); }},
      {"derivative identities",
       [] { return suite_criterion({"derivative_identities", "affine_profile"}, 60.0); }},
      {"radius identity and asymptotics",
       [] { return suite_criterion({"lambda_identity", "asymptotic_functionals"}, 60.0); }},
      {"fixed point", fixed_point_criterion},
      {"moving spheres on f_beta", moving_spheres_criterion},
      {"subcritical factor", [] { return suite_criterion({"subcritical_factor"}, 60.0); }},
      {"determinism", [&] { return determinism_criterion(cli); }},
  };

  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = seconds_since(t0);
    const bool known = expect_fail.count(id) > 0;
    std::string note;
    if (known && !o.pass) note = " (known failure)";
    if (known && o.pass) note = " (expected to fail; update the known-failure list)";
    if (o.pass == known) ++unexpected;
    std::printf("criterion %2d %s: %s [%.2f s] %s%s\n", id, o.pass ? "PASS" : "FAIL",
                criteria[i].first.c_str(), dt, o.detail.c_str(), note.c_str());
    std::fflush(stdout);
  }
  return unexpected == 0 ? 0 : 1;
}
