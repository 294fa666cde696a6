#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "heiscr/crmaps.hpp"
#include "heiscr/fields.hpp"
#include "heiscr/hgroup.hpp"

namespace heiscr {

struct CheckSpec {
  std::string name;
  std::string paper_anchor;
  std::vector<int> dimensions;
  std::size_t samples = 1;
  std::uint64_t seed = 42;
  double tolerance = 1e-10;
};

struct CheckResult {
  std::string name;
  /// max_err <= tolerance (false when the check threw or produced NaN)
  bool pass = false;
  /// +inf when the check threw.
  double max_err = 0.0;
  /// Hex-float serialization of the worst input, or the exception text.
  std::string worst_input;
  double runtime_ms = 0.0;
};

struct CheckInfo {
  std::string name;
  /// Name of the identity the check exercises.
  std::string paper_anchor;
  std::string description;
};

/// Stable listing, in suite order.
std::vector<CheckInfo> registered_checks();

/// The registered defaults for one check. Throws ConfigError for an unknown name.
CheckSpec default_check(const std::string& name, std::uint64_t seed = 42);

/// Every registered check with its default dimensions, sample count and tolerance.
std::vector<CheckSpec> default_suite(std::uint64_t seed = 42);

/// Runs each check with its own seed, in order, collecting every result. Throws
/// ConfigError before running anything when a name is unknown, a name repeats,
/// samples is 0 or the tolerance is negative.
std::vector<CheckResult> run_suite(const std::vector<CheckSpec>& suite);

/// JSON array of {name, pass, max_err, worst_input, runtime_ms}. runtime_ms is
/// null unless include_timings is set, which keeps the report reproducible byte
/// for byte.
nlohmann::json results_to_json(const std::vector<CheckResult>& results, bool include_timings);

/// Full-precision hexadecimal float ("%a").
std::string hex_double(double v);
/// "(x_1,...,x_n,y_1,...,y_n,t)" in hex floats.
std::string hex_point(const HPoint& a);

struct FalsifierWitness {
  HPoint xi;
  double lambda;
  HPoint zeta;
  /// (lambda / d_H(xi, zeta))^nu f(Phi(zeta))
  double lhs;
  /// f(zeta)
  double rhs;
};

/// Searches random (xi, lambda, zeta) with zeta outside the closed ball
/// B_lambda(xi) for a violation of (lambda / d_H(xi, zeta))^nu f(Phi(zeta)) <= f(zeta).
/// A violation counts only when lhs > (1 + 1e-9) rhs, ten times the evaluation
/// tolerance, so returned witnesses are robust to rounding. With `radius_of` set,
/// lambda = radius_of(xi) instead of a random radius.
std::optional<FalsifierWitness> symmetry_falsifier(const ScalarField& f, double nu, double beta,
                                                    std::size_t trials, std::uint64_t seed,
                                                    int n = 1,
                                                    const RadiusMap& radius_of = nullptr);

}  // namespace heiscr
