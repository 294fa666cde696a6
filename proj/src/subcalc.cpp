#include "heiscr/subcalc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "heiscr/error.hpp"

namespace heiscr {

namespace {

// Steps for one coordinate at point a: anisotropic, following the dilation weights.
double base_step(const HPoint& a, int coord, const FDConfig& cfg) {
  const double scale = cfg.length_scale > 0.0 ? cfg.length_scale : 1.0 + koranyi_norm(a);
  return coord == 2 * a.dim() ? cfg.h * scale * scale : cfg.h * scale;
}

HPoint shifted(const HPoint& a, int coord, double delta) {
  const int n = a.dim();
  std::vector<Complex> z(a.z().begin(), a.z().end());
  double t = a.t();
  if (coord < n) {
    z[static_cast<std::size_t>(coord)] += Complex{delta, 0.0};
  } else if (coord < 2 * n) {
    z[static_cast<std::size_t>(coord - n)] += Complex{0.0, delta};
  } else {
    t += delta;
  }
  return HPoint(std::move(z), t);
}

HPoint shifted2(const HPoint& a, int c1, double d1, int c2, double d2) {
  return shifted(shifted(a, c1, d1), c2, d2);
}

void check_coord(const HPoint& a, int c) {
  if (c < 0 || c > 2 * a.dim()) {
    throw ContractError("partial: coordinate index " + std::to_string(c) + " out of range");
  }
}

// Richardson table over steps h, h/2, ..., h/2^{levels-1} for an O(h^2)-even estimator.
template <class Estimate>
double richardson(const Estimate& estimate, double h, int levels) {
  std::vector<std::vector<double>> table(static_cast<std::size_t>(levels));
  double step = h;
  for (int k = 0; k < levels; ++k, step *= 0.5) {
    auto& row = table[static_cast<std::size_t>(k)];
    row.push_back(estimate(step));
    double factor = 4.0;
    for (int m = 1; m <= k; ++m, factor *= 4.0) {
      const double prev = table[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(m - 1)];
      row.push_back(row.back() + (row.back() - prev) / (factor - 1.0));
    }
  }
  return table.back().back();
}

double rel_err(double got, double want) {
  const double diff = std::abs(got - want);
  return want != 0.0 ? diff / std::abs(want) : diff;
}

}  // namespace

void FDConfig::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw ContractError("FDConfig: h must be positive");
  if (richardson_levels < 1 || richardson_levels > 4) {
    throw ContractError("FDConfig: richardson_levels must lie in [1, 4]");
  }
  if (!(length_scale >= 0.0) || !std::isfinite(length_scale)) {
    throw ContractError("FDConfig: length_scale must be finite and nonnegative");
  }
}

double partial(const ScalarField& u, const HPoint& a, int coord, const FDConfig& cfg) {
  cfg.validate();
  check_coord(a, coord);
  const double h = base_step(a, coord, cfg);
  return richardson(
      [&](double s) { return (u(shifted(a, coord, s)) - u(shifted(a, coord, -s))) / (2.0 * s); },
      h, cfg.richardson_levels);
}

double second_partial(const ScalarField& u, const HPoint& a, int c1, int c2,
                      const FDConfig& cfg) {
  cfg.validate();
  check_coord(a, c1);
  check_coord(a, c2);
  if (c1 == c2) {
    const double h = base_step(a, c1, cfg);
    const double center = u(a);
    return richardson(
        [&](double s) {
          return (u(shifted(a, c1, s)) - 2.0 * center + u(shifted(a, c1, -s))) / (s * s);
        },
        h, cfg.richardson_levels);
  }
  const double h1 = base_step(a, c1, cfg);
  const double h2 = base_step(a, c2, cfg);
  const double ratio = h2 / h1;
  return richardson(
      [&](double s1) {
        const double s2 = s1 * ratio;
        return (u(shifted2(a, c1, s1, c2, s2)) - u(shifted2(a, c1, s1, c2, -s2)) -
                u(shifted2(a, c1, -s1, c2, s2)) + u(shifted2(a, c1, -s1, c2, -s2))) /
               (4.0 * s1 * s2);
      },
      h1, cfg.richardson_levels);
}

std::vector<double> horizontal_gradient(const ScalarField& u, const HPoint& a,
                                        const FDConfig& cfg) {
  const int n = a.dim();
  const double ut = partial(u, a, 2 * n, cfg);
  std::vector<double> g(static_cast<std::size_t>(2 * n));
  for (int j = 0; j < n; ++j) {
    const double x = a.z(j).real();
    const double y = a.z(j).imag();
    g[static_cast<std::size_t>(j)] = partial(u, a, j, cfg) + 2.0 * y * ut;
    g[static_cast<std::size_t>(n + j)] = partial(u, a, n + j, cfg) - 2.0 * x * ut;
  }
  return g;
}

double sub_laplacian(const ScalarField& u, const HPoint& a, const FDConfig& cfg) {
  const int n = a.dim();
  const int tc = 2 * n;
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    const double x = a.z(j).real();
    const double y = a.z(j).imag();
    sum += second_partial(u, a, j, j, cfg) + second_partial(u, a, n + j, n + j, cfg) +
           4.0 * y * second_partial(u, a, j, tc, cfg) - 4.0 * x * second_partial(u, a, n + j, tc, cfg);
  }
  return sum + 4.0 * a.z_norm_sq() * second_partial(u, a, tc, tc, cfg);
}

ResidualRatio pde_residual_ratio(const ScalarField& u, double p, std::span<const HPoint> points,
                                 const FDConfig& cfg) {
  if (points.empty()) throw ContractError("pde_residual_ratio: no points");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  for (const HPoint& a : points) {
    const double value = u(a);
    if (!(value > 0.0)) throw DomainError("pde_residual_ratio: u is not positive at a sample point");
    const double r = -sub_laplacian(u, a, cfg) / std::pow(value, p);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    sum += r;
  }
  const double mean = sum / static_cast<double>(points.size());
  const double spread = mean != 0.0 ? (hi - lo) / std::abs(mean) : hi - lo;
  return {mean, spread, lo, hi};
}

double li_monticelli_check(const ScalarField& u, const CRMap& psi,
                           std::span<const HPoint> points, const FDConfig& cfg) {
  double worst = 0.0;
  for (const HPoint& a : points) {
    const int q = homogeneous_dimension(a.dim());
    const double crit = static_cast<double>(q + 2) / (q - 2);
    const double weight = static_cast<double>(q - 2) / (2.0 * q);
    const ScalarField transformed = ScalarField::blackbox(
        [&u, &psi, weight](const HPoint& b) {
          return std::pow(psi.jacobian_det_abs(b), weight) * u(psi.apply(b));
        },
        "u_psi", a.dim());
    HPoint image = HPoint::identity(a.dim());
    try {
      image = psi.apply(a);
    } catch (const SingularityError& e) {
      throw DomainError(std::string("li_monticelli_check: ") + e.what());
    }
    const double lhs = std::pow(transformed(a), -crit) * sub_laplacian(transformed, a, cfg);
    const double rhs = std::pow(u(image), -crit) * sub_laplacian(u, image, cfg);
    worst = std::max(worst, rel_err(lhs, rhs));
  }
  return worst;
}

double subcritical_residual_check(const ScalarField& u, double p, const HPoint& xi, double lambda,
                                  double beta, std::span<const HPoint> points,
                                  const FDConfig& cfg) {
  const int q = homogeneous_dimension(xi.dim());
  const double crit = static_cast<double>(q + 2) / (q - 2);
  if (!(p > 1.0) || !(p <= crit)) {
    throw DomainError("subcritical_residual_check: p must lie in (1, (Q+2)/(Q-2)]");
  }
  const GCRInversion phi(xi, lambda, beta);
  const ScalarField kelvin_u = kelvin_field(u, xi, lambda, beta);
  const double exponent = (q + 2) - (q - 2) * p;
  double worst = 0.0;
  for (const HPoint& zeta : points) {
    const double d = dist(xi, zeta);
    if (d == 0.0) throw DomainError("subcritical_residual_check: point coincides with the center");
    const HPoint image = phi.apply(zeta);
    const double ratio = -sub_laplacian(u, image, cfg) / std::pow(u(image), p);
    FDConfig local = cfg;
    if (local.length_scale == 0.0) local.length_scale = std::min(1.0 + koranyi_norm(zeta), d);
    const double lhs = -sub_laplacian(kelvin_u, zeta, local);
    const double rhs = std::pow(lambda / d, exponent) * ratio * std::pow(kelvin_u(zeta), p);
    worst = std::max(worst, rel_err(lhs, rhs));
  }
  return worst;
}

double DerivativeReport::max_identity_error() const {
  return std::max({t_ode, x_partial, y_partial, affine_slope_error, affine_intercept_error});
}

DerivativeReport calc_lemma_derivative_checks(const ScalarField& f, double nu, double alpha,
                                              std::span<const HPoint> points,
                                              const FDConfig& cfg) {
  if (points.empty()) throw ContractError("calc_lemma_derivative_checks: no points");
  if (!(nu > 0.0) || !(alpha > 0.0)) {
    throw DomainError("calc_lemma_derivative_checks: nu and alpha must be positive");
  }
  const int n = points.front().dim();
  const double a4 = std::pow(alpha, -4.0 / nu);
  const double a2 = std::pow(alpha, -2.0 / nu);
  DerivativeReport rep;

  std::vector<double> s;
  std::vector<double> y;
  for (const HPoint& a : points) {
    const double fa = f(a);
    const double want_t = -(nu / 2.0) * a4 * a.t() * std::pow(fa, 1.0 + 4.0 / nu);
    rep.t_ode = std::max(rep.t_ode, rel_err(partial(f, a, 2 * n, cfg), want_t));

    const HPoint slice(std::vector<Complex>(a.z().begin(), a.z().end()), 0.0);
    const double f0 = f(slice);
    const double common = -nu * a2 * std::pow(f0, 1.0 + 2.0 / nu);
    for (int k = 0; k < n; ++k) {
      rep.x_partial =
          std::max(rep.x_partial, rel_err(partial(f, slice, k, cfg), common * slice.z(k).real()));
      rep.y_partial = std::max(rep.y_partial,
                               rel_err(partial(f, slice, n + k, cfg), common * slice.z(k).imag()));
    }
    s.push_back(slice.z_norm_sq());
    y.push_back(std::pow(f0, -2.0 / nu));
  }

  // Least-squares line y = slope * s + intercept.
  const double m = static_cast<double>(s.size());
  double ms = 0.0, my = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    ms += s[i];
    my += y[i];
  }
  ms /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    sxx += (s[i] - ms) * (s[i] - ms);
    sxy += (s[i] - ms) * (y[i] - my);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  const double intercept = my - slope * ms;
  double max_y = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    rep.affine_residual = std::max(rep.affine_residual, std::abs(y[i] - (slope * s[i] + intercept)));
    max_y = std::max(max_y, std::abs(y[i]));
  }
  if (max_y > 0.0) rep.affine_residual /= max_y;
  const HPoint origin = HPoint::identity(n);
  rep.affine_slope_error = rel_err(slope, a2);
  rep.affine_intercept_error = rel_err(intercept, std::pow(f(origin), -2.0 / nu));

  for (int c = 0; c <= 2 * n; ++c) {
    rep.origin_abs = std::max(rep.origin_abs, std::abs(partial(f, origin, c, cfg)));
  }
  return rep;
}

}  // namespace heiscr
