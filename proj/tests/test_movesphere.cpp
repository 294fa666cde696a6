#include <doctest.h>

#include <cmath>
#include <sstream>

#include "heiscr/error.hpp"
#include "heiscr/movesphere.hpp"
#include "test_support.hpp"

using namespace heiscr;

namespace {

SphereConfig quick_config() {
  SphereConfig c;
  c.samples = 20000;
  c.curve_samples = 5000;
  c.equality_samples = 2000;
  return c;
}

}  // namespace

TEST_SUITE("movesphere") {
  TEST_CASE("config validation") {
    SphereConfig c;
    CHECK_NOTHROW(c.validate());
    c.lambda_min = 2.0;
    c.lambda_max = 1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.samples = 10;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = {};
    c.curve_factors = {1.0, -1.0};
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }

  TEST_CASE("violation measure around the symmetric radius") {
    FBetaParams p{2.0, 4.0};
    auto f = ScalarField::fbeta(p, 1);
    HPoint zero = HPoint::identity(1);
    for (double lam : {0.1, 1.0, 1.9, 1.99}) {
      auto v = violation_measure(f, zero, lam, 4.0, 20000, 1);
      CHECK(v.violations == 0);
      CHECK(v.measure == 0.0);
      CHECK(v.std_error == 0.0);
    }
    auto at = violation_measure(f, zero, 2.0, 4.0, 20000, 1);
    CHECK(at.violations == 0);
    CHECK(kelvin_equality_residual(f, zero, 2.0, 4.0, 10000, 1) <= 1e-10);
    auto above = violation_measure(f, zero, 4.0, 4.0, 20000, 1);
    CHECK(above.violations > 0);
    CHECK(above.measure > 0.0);
    CHECK(above.measure <= ball_volume(1, 4.0));
    CHECK(above.std_error >= 0.0);
    CHECK_THROWS_AS(violation_measure(f, zero, 1.0, 4.0, 999, 1), ContractError);
    CHECK_THROWS_AS(violation_measure(f, zero, 0.0, 4.0, 1000, 1), ContractError);
  }

  TEST_CASE("below-critical emptiness for centers on the t-axis") {
    FBetaParams p{2.0, 1.0};
    auto f = ScalarField::fbeta(p, 1);
    for (double t : {-1.0, 0.0, 0.5}) {
      HPoint xi({Complex(0, 0)}, t);
      double lam = lambda_of_xi(p, xi);
      for (double s : {0.1, 0.5, 0.99}) {
        CHECK(violation_measure(f, xi, s * lam, 1.0, 100000, 2).violations == 0);
      }
      CHECK(violation_measure(f, xi, 2.0 * lam, 1.0, 10000, 2).violations > 0);
    }
  }

  TEST_CASE("at the origin the whole ball violates past the critical radius") {
    // With w = t + i|z|^2 and s = |w| < lambda^2, u <= u_K reduces to
    // (lambda^4 - s^2)(1 - beta^2 / lambda^4) <= 0: no violations for lambda <= sqrt(beta),
    // every point violates above it, so |A_lambda| does not shrink to 0 as lambda
    // decreases to the critical radius.
    auto f = ScalarField::fbeta({2.0, 1.0}, 1);
    for (double delta : {0.1, 0.03, 0.01}) {
      auto v = violation_measure(f, HPoint::identity(1), 1.0 + delta, 1.0, 20000, 3);
      CHECK(v.violations == v.samples);
      CHECK(v.measure == doctest::Approx(ball_volume(1, 1.0 + delta)));
    }
  }

  TEST_CASE("critical radius of f_beta at the origin") {
    auto f = ScalarField::fbeta({2.0, 4.0}, 1);
    auto est = estimate_lambda_underline(f, HPoint::identity(1), 4.0, quick_config());
    CHECK(std::abs(est.lambda - 2.0) <= 1e-2 * 2.0);
    CHECK(est.lower <= est.lambda);
    CHECK(est.lambda <= est.upper);
  }

  TEST_CASE("critical radius scales with the field") {
    // c f_beta has the same symmetric radius, alpha^{1/nu} f(xi)^{-1/nu}
    FBetaParams p{2.0, 1.0};
    auto f2 = ScalarField::blackbox([p](const HPoint& a) { return 2.0 * fbeta_eval(p, a); }, "2f", 1);
    HPoint xi({Complex(0, 0)}, -0.7);
    auto est = estimate_lambda_underline(f2, xi, 1.0, quick_config());
    double want = std::pow(2.0, 0.5) * std::pow(f2(xi), -0.5);
    CHECK(std::abs(est.lambda - want) <= 1e-2 * want);
    CHECK(std::abs(want - lambda_of_xi(p, xi)) <= 1e-12);
  }

  TEST_CASE("bracket errors") {
    auto f = ScalarField::fbeta({2.0, 4.0}, 1);
    SphereConfig c = quick_config();
    c.lambda_min = 0.1;
    c.lambda_max = 1.0;
    CHECK_THROWS_AS(estimate_lambda_underline(f, HPoint::identity(1), 4.0, c), BracketError);
    c.lambda_min = 3.0;
    c.lambda_max = 10.0;
    CHECK_THROWS_AS(estimate_lambda_underline(f, HPoint::identity(1), 4.0, c), BracketError);
  }

  TEST_CASE("off-axis centers of f_beta violate on arbitrarily small balls") {
    // The inversion rotation is fixed by the center, and off the t-axis the
    // Kelvin comparison fails near the center for every radius.
    auto f = ScalarField::fbeta({2.0, 1.0}, 1);
    HPoint xi({Complex(0.5, 0)}, 0.5);
    CHECK(violation_measure(f, xi, 1e-2, 1.0, 20000, 4).violations > 0);
    CHECK(violation_measure(f, xi, lambda_of_xi({2.0, 1.0}, xi), 1.0, 20000, 4).violations == 0);
    CHECK_THROWS_AS(estimate_lambda_underline(f, xi, 1.0, quick_config()), BracketError);
  }

  TEST_CASE("non-monotone indicator aborts") {
    // a constant-like core plus a bump on the unit shell: clean, then violated
    // near radius 1, clean again, violated past the core's symmetric radius
    FBetaParams core{2.0, 1e4};
    auto u = ScalarField::blackbox(
        [core](const HPoint& a) {
          double r = koranyi_norm(a);
          return 1e4 * fbeta_eval(core, a) + 5.0 * std::exp(-std::pow((r - 1.0) / 0.05, 2));
        },
        "shell", 1);
    SphereConfig c = quick_config();
    c.lambda_min = 0.1;
    c.lambda_max = 1e3;
    CHECK_THROWS_AS(estimate_lambda_underline(u, HPoint::identity(1), 1.0, c), DomainError);
  }

  TEST_CASE("terracini quantities") {
    FBetaParams p{2.0, 1.0};
    auto f = ScalarField::fbeta(p, 1);
    HPoint xi({Complex(0, 0)}, 0.3);
    double lam = lambda_of_xi(p, xi);
    SphereConfig c;
    auto below = terracini_quantities(f, xi, 0.5 * lam, 1.0, 3.0, 5000, 1, c);
    CHECK(below.lhs == 0.0);
    CHECK(below.rhs_factor == 0.0);
    auto at = terracini_quantities(f, xi, lam, 1.0, 3.0, 5000, 1, c);
    CHECK(at.lhs == 0.0);
    auto above = terracini_quantities(f, xi, 2.0 * lam, 1.0, 2.0, 5000, 1, c);
    CHECK(above.lhs > 0.0);
    CHECK(above.rhs_factor > 0.0);
    CHECK_THROWS_AS(terracini_quantities(f, xi, lam, 1.0, 4.0, 5000, 1, c), DomainError);
  }

  TEST_CASE("demo reports on the t-axis") {
    auto f = ScalarField::fbeta({2.0, 1.0}, 1);
    std::vector<HPoint> grid{HPoint({Complex(0, 0)}, -1.0), HPoint({Complex(0, 0)}, 1.0)};
    auto reps = moving_spheres_demo(f, 1.0, grid, quick_config());
    REQUIRE(reps.size() == 2);
    for (const auto& r : reps) {
      CHECK_FALSE(r.error.has_value());
      double want = lambda_of_xi({2.0, 1.0}, r.xi);
      CHECK(std::abs(r.lambda_underline - want) <= 1e-2 * want);
      CHECK(r.lambda_lower <= r.lambda_upper);
      // lambda^nu u(xi) = alpha = 1
      CHECK(std::abs(std::pow(r.lambda_underline, 2.0) * f(r.xi) - 1.0) <= 1e-2);
      CHECK(r.kelvin_residual <= 1e-4);
      REQUIRE(r.curve.size() == 4);
      CHECK(r.curve[0].measure == 0.0);
      CHECK(r.curve[1].measure == 0.0);
      CHECK(r.curve[3].measure > 0.0);
      for (const auto& pt : r.curve) {
        CHECK(pt.measure >= 0.0);
        CHECK(pt.measure <= ball_volume(1, pt.lambda));
      }
    }
    // independent per-center streams: same result when run alone
    auto solo = moving_spheres_demo(f, 1.0, {grid[0]}, quick_config());
    CHECK(solo[0].seed == reps[0].seed);
    CHECK(solo[0].lambda_underline == reps[0].lambda_underline);
  }

  TEST_CASE("demo on a bubble moved to the origin") {
    BubbleParams b{1.0, {Complex(0.4, -0.2)}, Complex(0.3, 1.0)};
    auto m = to_max_at_origin(b);
    auto reps = moving_spheres_demo(m.field, m.beta, {HPoint({Complex(0, 0)}, 0.4)}, quick_config());
    REQUIRE_FALSE(reps[0].error.has_value());
    CHECK(reps[0].kelvin_residual <= 1e-4);
  }

  TEST_CASE("degenerate window gives errors for every center") {
    auto f = ScalarField::fbeta({2.0, 1.0}, 1);
    SphereConfig c = quick_config();
    c.lambda_min = 1e-3;
    c.lambda_max = 1e-2;
    std::vector<HPoint> grid{HPoint({Complex(0, 0)}, 0.0), HPoint({Complex(0, 0)}, 1.0)};
    auto reps = moving_spheres_demo(f, 1.0, grid, c);
    for (const auto& r : reps) {
      REQUIRE(r.error.has_value());
      CHECK(r.error->find("xi[") != std::string::npos);
      CHECK(std::isnan(r.lambda_underline));
    }
    auto j = sphere_reports_to_json(reps);
    CHECK(j[0]["lambda_underline"].is_null());
    CHECK(j[0]["error"].is_string());
  }

  TEST_CASE("serialization") {
    auto f = ScalarField::fbeta({2.0, 1.0}, 1);
    auto reps = moving_spheres_demo(f, 1.0, {HPoint({Complex(0, 0)}, 0.0)}, quick_config());
    auto csv = sphere_reports_to_csv(reps);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "xi_index,lambda,violation_measure,stderr,lhs,rhs_factor");
    int rows = 0;
    while (std::getline(in, line)) {
      if (!line.empty()) ++rows;
    }
    CHECK(rows == 4);
    auto j = sphere_reports_to_json(reps);
    for (const char* key : {"xi", "beta", "lambda_underline", "lambda_lower", "lambda_upper",
                            "violation_curve", "terracini", "kelvin_residual", "samples", "seed"}) {
      CHECK(j[0].contains(key));
    }
    CHECK(j[0]["violation_curve"].size() == 4);
  }
}
