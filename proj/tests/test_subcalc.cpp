#include <doctest.h>

#include <cmath>

#include "heiscr/error.hpp"
#include "heiscr/subcalc.hpp"
#include "test_support.hpp"

using namespace heiscr;
using heiscr::testing::random_point;
using heiscr::testing::rel_err;

namespace {

// Closed-form sub-Laplacian of K S^{-n/2}, S = A^2 + B^2,
// A = t + Re(mu.z) + Re kappa, B = |z|^2 + Im(mu.z) + Im kappa.
double bubble_sublaplacian(const BubbleParams& p, const HPoint& a) {
  const int n = p.dim();
  double A = a.t() + p.kappa.real(), B = a.z_norm_sq() + p.kappa.imag();
  for (int j = 0; j < n; ++j) {
    Complex mz = p.mu[j] * a.z(j);
    A += mz.real();
    B += mz.imag();
  }
  const double S = A * A + B * B, e = -n / 2.0;
  double lap = 0.0;
  for (int j = 0; j < n; ++j) {
    const double m = p.mu[j].real(), nn = p.mu[j].imag();
    const double x = a.z(j).real(), y = a.z(j).imag();
    // (X A, X B) and (Y A, Y B); X^2 A = Y^2 A = 0, X^2 B = Y^2 B = 2
    const double derivs[2][2] = {{m + 2 * y, 2 * x + nn}, {-nn - 2 * x, 2 * y + m}};
    for (const auto& d : derivs) {
      const double dS = 2 * A * d[0] + 2 * B * d[1];
      const double d2S = 2 * d[0] * d[0] + 2 * d[1] * d[1] + 4 * B;
      lap += e * (e - 1) * std::pow(S, e - 2) * dS * dS + e * std::pow(S, e - 1) * d2S;
    }
  }
  return p.K * lap;
}

BubbleParams random_bubble(CounterRng& rng, int n) {
  BubbleParams p;
  p.K = rng.uniform(0.5, 3.0);
  double mu2 = 0.0;
  for (int j = 0; j < n; ++j) {
    p.mu.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1));
    mu2 += std::norm(p.mu.back());
  }
  p.kappa = Complex(rng.uniform(-1, 1), mu2 / 4 + rng.uniform(0.5, 2.0));
  return p;
}

ScalarField poly(std::function<double(const HPoint&)> f) { return ScalarField::blackbox(std::move(f)); }

}  // namespace

TEST_SUITE("subcalc") {
  TEST_CASE("FDConfig validation") {
    FDConfig c;
    CHECK_NOTHROW(c.validate());
    c.h = 0.0;
    CHECK_THROWS_AS(c.validate(), ContractError);
    c = {};
    c.richardson_levels = 5;
    CHECK_THROWS_AS(c.validate(), ContractError);
    c = {};
    c.length_scale = -1.0;
    CHECK_THROWS_AS(c.validate(), ContractError);
  }

  TEST_CASE("horizontal gradient examples") {
    auto t = poly([](const HPoint& a) { return a.t(); });
    auto g = horizontal_gradient(t, HPoint({Complex(1, 0)}, 0.0));
    CHECK(g[0] == doctest::Approx(0.0));
    CHECK(g[1] == doctest::Approx(-2.0));
    auto r2 = poly([](const HPoint& a) { return a.z_norm_sq(); });
    CounterRng rng(9, 1);
    for (int n = 1; n <= 3; ++n) {
      HPoint a = random_point(rng, n);
      auto gr = horizontal_gradient(r2, a);
      for (int j = 0; j < n; ++j) {
        CHECK(gr[j] == doctest::Approx(2 * a.z(j).real()).epsilon(1e-9));
        CHECK(gr[n + j] == doctest::Approx(2 * a.z(j).imag()).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("sub-Laplacian examples") {
    auto t = poly([](const HPoint& a) { return a.t(); });
    auto r2 = poly([](const HPoint& a) { return a.z_norm_sq(); });
    auto one = poly([](const HPoint&) { return 1.0; });
    CounterRng rng(9, 2);
    for (int n = 1; n <= 3; ++n) {
      HPoint a = random_point(rng, n);
      CHECK(std::abs(sub_laplacian(t, a)) < 1e-8);
      CHECK(sub_laplacian(r2, a) == doctest::Approx(4.0 * n).epsilon(1e-9));
      CHECK(sub_laplacian(one, a) == 0.0);
    }
  }

  TEST_CASE("bubble sub-Laplacian matches the closed form") {
    CounterRng rng(9, 3);
    double worst = 0.0;
    for (int n = 1; n <= 2; ++n) {
      for (int k = 0; k < 10; ++k) {
        auto p = random_bubble(rng, n);
        auto u = ScalarField::bubble(p);
        for (int i = 0; i < 20; ++i) {
          HPoint a = random_point(rng, n);
          worst = std::max(worst, rel_err(sub_laplacian(u, a), bubble_sublaplacian(p, a)));
        }
      }
    }
    CHECK(worst <= 1e-6);
  }

  TEST_CASE("Richardson levels raise the convergence order") {
    BubbleParams p{1.0, {Complex(0.3, 0.2)}, Complex(0.1, 1.0)};
    auto u = ScalarField::bubble(p);
    HPoint a({Complex(0.4, -0.3)}, 0.2);
    const double exact = bubble_sublaplacian(p, a);
    for (int levels = 1; levels <= 2; ++levels) {
      FDConfig c1{0.1, levels, 1.0}, c2{0.05, levels, 1.0};
      double e1 = std::abs(sub_laplacian(u, a, c1) - exact);
      double e2 = std::abs(sub_laplacian(u, a, c2) - exact);
      CAPTURE(levels);
      CHECK(e1 / e2 >= std::pow(2.0, 2 * levels - 0.5));
    }
  }

  TEST_CASE("sub-Laplacian is left-invariant and dilation-covariant") {
    BubbleParams p{1.0, {Complex(0.5, -0.5)}, Complex(0.3, 1.2)};
    auto u = ScalarField::bubble(p);
    CounterRng rng(9, 4);
    for (int k = 0; k < 20; ++k) {
      HPoint g = random_point(rng, 1, 0.5), a = random_point(rng, 1);
      auto ug = poly([&](const HPoint& x) { return u(group_mul(g, x)); });
      CHECK(rel_err(sub_laplacian(ug, a), sub_laplacian(u, group_mul(g, a))) <= 1e-6);
      double lam = rng.uniform(0.5, 2.0);
      auto ud = poly([&](const HPoint& x) { return u(dilate(lam, x)); });
      CHECK(rel_err(sub_laplacian(ud, a), lam * lam * sub_laplacian(u, dilate(lam, a))) <= 1e-6);
    }
  }

  TEST_CASE("pde_residual_ratio") {
    auto one = poly([](const HPoint&) { return 1.0; });
    std::vector<HPoint> pts{HPoint({Complex(0.1, 0)}, 0.2), HPoint({Complex(0.3, 0.5)}, -1.0)};
    auto r = pde_residual_ratio(one, 3.0, pts);
    CHECK(r.mean == 0.0);
    CHECK(r.relative_spread == 0.0);
    auto neg = poly([](const HPoint&) { return -1.0; });
    CHECK_THROWS_AS(pde_residual_ratio(neg, 3.0, pts), DomainError);

    // bubbles solve -Delta u = c u^p; rescaling by c^{1/(p-1)} normalizes c to 1
    CounterRng rng(9, 5);
    for (int n = 1; n <= 2; ++n) {
      auto p = random_bubble(rng, n);
      const double pc = (2.0 * n + 4) / (2.0 * n);
      std::vector<HPoint> sample;
      for (int i = 0; i < 30; ++i) sample.push_back(random_point(rng, n));
      auto rr = pde_residual_ratio(ScalarField::bubble(p), pc, sample);
      CHECK(rr.relative_spread <= 1e-5);
      CHECK(rr.mean > 0.0);
      BubbleParams q = p;
      q.K = p.K * std::pow(rr.mean, 1.0 / (pc - 1.0));
      auto r2 = pde_residual_ratio(ScalarField::bubble(q), pc, sample);
      CHECK(std::abs(r2.mean - 1.0) <= 1e-5);
    }
  }

  TEST_CASE("li_monticelli_check on CR maps") {
    BubbleParams p{1.0, {Complex(0.2, 0.1)}, Complex(0.0, 1.0)};
    auto u = ScalarField::bubble(p);
    CounterRng rng(9, 6);
    std::vector<HPoint> pts;
    for (int i = 0; i < 20; ++i) pts.push_back(random_point(rng, 1));
    CHECK(li_monticelli_check(u, CRMap(), pts) <= 1e-8);
    CHECK(li_monticelli_check(u, CRMap({Translate{HPoint({Complex(0.5, -0.3)}, 0.7)}}), pts) <= 1e-6);
    CHECK(li_monticelli_check(u, CRMap({Dilate{1.5}, Rotate{heiscr::testing::random_diagonal(rng, 1)}}),
                              pts) <= 1e-6);
  }

  TEST_CASE("subcritical Kelvin factor") {
    CounterRng rng(9, 7);
    auto f = ScalarField::fbeta({2.0, 1.0}, 1);
    std::vector<HPoint> pts;
    for (int i = 0; i < 20; ++i) pts.push_back(random_point(rng, 1, 1.5));
    HPoint xi({Complex(0.2, 0.1)}, -0.3);
    for (double p : {2.0, 3.0}) {
      CAPTURE(p);
      CHECK(subcritical_residual_check(f, p, xi, 0.8, 1.0, pts) <= 1e-5);
    }
    CHECK_THROWS_AS(subcritical_residual_check(f, 1.0, xi, 0.8, 1.0, pts), DomainError);
    CHECK_THROWS_AS(subcritical_residual_check(f, 3.5, xi, 0.8, 1.0, pts), DomainError);
  }

  TEST_CASE("derivative identities on f_beta and on bubbles with their maximum at the origin") {
    CounterRng rng(9, 8);
    for (int n = 1; n <= 2; ++n) {
      std::vector<HPoint> pts;
      for (int i = 0; i < 10; ++i) pts.push_back(random_point(rng, n));
      FBetaParams fp{2.0 * n, 1.5};
      auto rep = calc_lemma_derivative_checks(ScalarField::fbeta(fp, n), fp.nu, 1.0, pts);
      CHECK(rep.max_identity_error() <= 1e-6);
      CHECK(rep.origin_abs <= 1e-8);
      CHECK(rep.affine_residual <= 1e-8);

      auto m = to_max_at_origin(random_bubble(rng, n));
      auto rb = calc_lemma_derivative_checks(m.field, m.nu, m.alpha, pts);
      CHECK(rb.max_identity_error() <= 1e-6);
      CHECK(rb.affine_residual <= 1e-8);
    }
  }
}
