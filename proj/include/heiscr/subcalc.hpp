#pragma once

#include <span>
#include <vector>

#include "heiscr/crmaps.hpp"
#include "heiscr/fields.hpp"
#include "heiscr/hgroup.hpp"

namespace heiscr {

/// Finite-difference settings. The step used at a point a is h L in the z
/// coordinates and h L^2 in t, with L = length_scale, or 1 + |a|_H when
/// length_scale is 0; `richardson_levels` step sizes h, h/2, ... are combined by
/// Richardson extrapolation (order 2 * levels).
struct FDConfig {
  double h = 2e-3;
  int richardson_levels = 3;
  double length_scale = 0.0;

  /// Throws ContractError unless h > 0 and levels is in [1, 4].
  void validate() const;
};

/// Real coordinate index: x_j = j, y_j = n + j, t = 2n.
double partial(const ScalarField& u, const HPoint& a, int coord, const FDConfig& cfg = {});
double second_partial(const ScalarField& u, const HPoint& a, int c1, int c2,
                      const FDConfig& cfg = {});

/// (X_1 u, ..., X_n u, Y_1 u, ..., Y_n u)(a) with X_j = d/dx_j + 2 y_j d/dt and
/// Y_j = d/dy_j - 2 x_j d/dt.
std::vector<double> horizontal_gradient(const ScalarField& u, const HPoint& a,
                                        const FDConfig& cfg = {});

/// sum_j (X_j^2 + Y_j^2) u (a), from the expanded form
/// sum_j [u_xjxj + u_yjyj + 4 y_j u_xjt - 4 x_j u_yjt] + 4 |z|^2 u_tt.
double sub_laplacian(const ScalarField& u, const HPoint& a, const FDConfig& cfg = {});

struct ResidualRatio {
  double mean;
  /// (max - min) / |mean|; (max - min) when the mean is exactly 0.
  double relative_spread;
  double min;
  double max;
};

/// r(a) = -Delta_H u(a) / u(a)^p over the points. Throws DomainError when u <= 0 at a point.
ResidualRatio pde_residual_ratio(const ScalarField& u, double p, std::span<const HPoint> points,
                                 const FDConfig& cfg = {});

/// Max relative discrepancy between u_psi^{-(Q+2)/(Q-2)} Delta_H u_psi and
/// (u^{-(Q+2)/(Q-2)} Delta_H u) o psi, where u_psi = |J_psi|^{(Q-2)/(2Q)} u o psi.
double li_monticelli_check(const ScalarField& u, const CRMap& psi,
                           std::span<const HPoint> points, const FDConfig& cfg = {});

/// Max relative discrepancy in
///   -Delta_H u_K(zeta) = (lambda / d_H(xi, zeta))^{(Q+2) - (Q-2)p} g(Phi(zeta)) u_K(zeta)^p,
/// u_K the Kelvin transform about (xi, lambda, beta) and g = -Delta_H u / u^p the
/// residual ratio of u (g = 1 when u solves -Delta_H u = u^p). Requires
/// 1 < p <= (Q+2)/(Q-2). Unless cfg fixes a length scale, derivatives of u_K at
/// zeta use min(1 + |zeta|_H, d_H(zeta, xi)), since u_K varies on that scale near xi.
double subcritical_residual_check(const ScalarField& u, double p, const HPoint& xi, double lambda,
                                  double beta, std::span<const HPoint> points,
                                  const FDConfig& cfg = {});

struct DerivativeReport {
  /// d f/dt (z,t) = -(nu/2) alpha^{-4/nu} t f^{1+4/nu}
  double t_ode = 0.0;
  /// d f/dx_k (z,0) = -nu alpha^{-2/nu} x_k f(z,0)^{1+2/nu}
  double x_partial = 0.0;
  /// d f/dy_k (z,0) = -nu alpha^{-2/nu} y_k f(z,0)^{1+2/nu}
  double y_partial = 0.0;
  /// Least-squares fit of f(z,0)^{-2/nu} against |z|^2: max residual / max value.
  double affine_residual = 0.0;
  /// Relative error of the fitted slope against alpha^{-2/nu}.
  double affine_slope_error = 0.0;
  /// Relative error of the fitted intercept against f(0)^{-2/nu}.
  double affine_intercept_error = 0.0;
  /// Largest |first partial| at the origin (all right-hand sides vanish there).
  double origin_abs = 0.0;

  double max_identity_error() const;
};

/// Compares finite-difference partials of a field with its maximum at the origin
/// against the closed-form right-hand sides built from alpha and nu. The t
/// identity uses each point as given; the x/y identities and the affine law use
/// its (z, 0) projection. Relative errors are taken where the right-hand side is
/// nonzero.
DerivativeReport calc_lemma_derivative_checks(const ScalarField& f, double nu, double alpha,
                                              std::span<const HPoint> points,
                                              const FDConfig& cfg = {});

}  // namespace heiscr
