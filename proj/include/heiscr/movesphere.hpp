#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "heiscr/fields.hpp"
#include "heiscr/hgroup.hpp"
#include "heiscr/subcalc.hpp"

namespace heiscr {

struct SphereConfig {
  /// Search window for the critical radius.
  double lambda_min = 1e-2;
  double lambda_max = 1e2;
  /// Monte-Carlo samples per violation test.
  std::size_t samples = 100000;
  int bisection_steps = 30;
  /// Geometric probes across the window checked before bisection; the
  /// zero-violation indicator has to be non-increasing over them.
  int monotonicity_probes = 12;
  /// Radii (as multiples of the estimated critical radius) recorded on the
  /// violation curve and the Terracini table.
  std::vector<double> curve_factors{0.5, 0.99, 1.1, 2.0};
  std::size_t curve_samples = 20000;
  /// Samples for the pointwise Kelvin-equality residual at the critical radius.
  std::size_t equality_samples = 10000;
  /// Exponent of -Delta_H u = u^p; 0 selects (Q+2)/(Q-2).
  double p = 0.0;
  /// A sample violates when u - u_K > violation_rel_tol * u.
  double violation_rel_tol = 1e-10;
  FDConfig fd{};
  std::uint64_t seed = 42;

  /// Throws ConfigError on an unusable configuration.
  void validate() const;
};

struct ViolationEstimate {
  /// vol(B_lambda(xi)) * violating fraction
  double measure = 0.0;
  /// Binomial standard error of the measure.
  double std_error = 0.0;
  std::size_t violations = 0;
  std::size_t samples = 0;
};

/// Monte-Carlo estimate of |{zeta in B_lambda(xi) : u(zeta) > u_{xi,lambda}^beta(zeta)}|.
/// Requires lambda > 0 and k >= 1000 (ContractError otherwise).
ViolationEstimate violation_measure(const ScalarField& u, const HPoint& xi, double lambda,
                                    double beta, std::size_t k, std::uint64_t seed,
                                    double violation_rel_tol = 1e-10);

struct LambdaEstimate {
  double lambda;  // midpoint of the final bracket
  double lower;
  double upper;
};

/// Bisection for the largest radius below which no sample of B_lambda(xi)
/// violates u <= u_K. The same unit-ball samples are pushed forward to every
/// radius. Throws BracketError when the window does not straddle the critical
/// radius and DomainError when the indicator is not monotone across the probes.
LambdaEstimate estimate_lambda_underline(const ScalarField& u, const HPoint& xi, double beta,
                                         const SphereConfig& cfg);

struct TerraciniQuantities {
  /// vol * mean |grad_H (u - u_K)^+|^2
  double lhs = 0.0;
  /// (vol * mean u^{(p-1)Q/2} 1_A)^{2/Q}
  double rhs_factor = 0.0;
};

TerraciniQuantities terracini_quantities(const ScalarField& u, const HPoint& xi, double lambda,
                                         double beta, double p, std::size_t k, std::uint64_t seed,
                                         const SphereConfig& cfg);

/// max |u - u_{xi,lambda}^beta| / max u over k uniform samples of B_lambda(xi).
double kelvin_equality_residual(const ScalarField& u, const HPoint& xi, double lambda,
                                double beta, std::size_t k, std::uint64_t seed);

struct CurvePoint {
  double lambda;
  double measure;
  double std_error;
  double lhs;
  double rhs_factor;
};

struct SphereReport {
  HPoint xi;
  double beta = 0.0;
  double lambda_underline = 0.0;
  double lambda_lower = 0.0;
  double lambda_upper = 0.0;
  std::vector<CurvePoint> curve;
  double kelvin_residual = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  /// Set when the estimate failed for this center; the numeric fields are then NaN.
  std::optional<std::string> error;
};

/// Runs the critical-radius estimate, the violation curve, the Terracini table and
/// the Kelvin-equality residual for each center. Each center draws from its own
/// stream derived from (cfg.seed, index). Failures are recorded per report.
std::vector<SphereReport> moving_spheres_demo(const ScalarField& u, double beta,
                                              const std::vector<HPoint>& grid,
                                              const SphereConfig& cfg);

nlohmann::json sphere_reports_to_json(const std::vector<SphereReport>& reports);
/// Header xi_index,lambda,violation_measure,stderr,lhs,rhs_factor; one row per curve radius.
std::string sphere_reports_to_csv(const std::vector<SphereReport>& reports);

}  // namespace heiscr
