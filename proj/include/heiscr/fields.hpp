#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "heiscr/crmaps.hpp"
#include "heiscr/hgroup.hpp"

namespace heiscr {

/// Parameters of K |t + i|z|^2 + mu.z + kappa|^{-(Q-2)/2}, mu.z = sum_j mu_j z_j.
/// Requires K > 0 and Im kappa > |mu|^2 / 4 (strict).
struct BubbleParams {
  double K = 1.0;
  std::vector<Complex> mu;
  Complex kappa{0.0, 1.0};

  int dim() const { return static_cast<int>(mu.size()); }
  /// Throws DomainError on invalid parameters.
  void validate() const;
};

/// f_beta(z, t) = |t + i|z|^2 + i beta|^{-nu/2}
struct FBetaParams {
  double nu = 2.0;
  double beta = 1.0;
};

struct Blackbox {
  std::string label;
};

/// A real-valued function on H^n: a closed-form family member or a caller-supplied callable.
class ScalarField {
 public:
  using Eval = std::function<double(const HPoint&)>;
  using Kind = std::variant<BubbleParams, FBetaParams, Blackbox>;

  static ScalarField bubble(BubbleParams p);
  /// `n` only records the dimension the field is meant for (0 = any).
  static ScalarField fbeta(FBetaParams p, int n = 0);
  static ScalarField blackbox(Eval eval, std::string label = "blackbox", int n = 0);

  double operator()(const HPoint& a) const { return eval_(a); }
  const Kind& kind() const { return kind_; }
  /// Dimension the field is defined on, or 0 when it accepts any n.
  int dim() const { return n_; }
  std::string describe() const;

 private:
  ScalarField(Eval eval, Kind kind, int n) : eval_(std::move(eval)), kind_(std::move(kind)), n_(n) {}

  Eval eval_;
  Kind kind_;
  int n_ = 0;
};

double bubble_eval(const BubbleParams& p, const HPoint& a);
/// Throws SingularityError when t + i|z|^2 + i beta = 0.
double fbeta_eval(const FBetaParams& p, const HPoint& a);
/// |conj(w') - i beta|^{1/2}, w' = t' + i|z'|^2. Throws DomainError when it vanishes.
double lambda_of_xi(const FBetaParams& p, const HPoint& xi);

/// (lambda / d_H(eta, xi))^{Q-2} u(Phi_{xi,lambda}^beta(eta)). Throws SingularityError at eta = xi.
double kelvin(const ScalarField& u, const HPoint& xi, double lambda, double beta, const HPoint& eta);
/// The Kelvin transform as a field (composed on every evaluation, nothing cached).
ScalarField kelvin_field(const ScalarField& u, const HPoint& xi, double lambda, double beta);

struct AsymptoticFunctionals {
  double alpha;
  double beta;
  /// Extrapolated limit along each probe ray (t-axis both signs, then x_j, y_j rays).
  std::vector<double> ray_limits;
};

/// Estimates alpha_f = lim |zeta|_H^nu f(zeta) by extrapolating |zeta|_H^nu f along
/// rays sampled at radii 1e2, 1e3, 1e4 (polynomial extrapolation in |zeta|_H^{-2}),
/// and beta_f = alpha_f^{2/nu} f(0)^{-2/nu}. Throws DomainError when the rays do not
/// settle or disagree by more than 1e-3 relative.
AsymptoticFunctionals alpha_beta_of(const ScalarField& f, double nu, int n);

/// xi -> alpha^{1/nu} f(xi)^{-1/nu}
RadiusMap radius_map(ScalarField f, double nu, double alpha);

/// A bubble moved so that its maximum sits at the origin. For the family this is
/// alpha |t + i|z|^2 + i beta|^{-nu/2} with alpha = K, nu = Q - 2.
struct MaxAtOrigin {
  ScalarField field;  // u o tau_{max_point}
  HPoint max_point;
  double alpha;
  double beta;
  double nu;
};
MaxAtOrigin to_max_at_origin(const BubbleParams& p);

/// Parses {"kind":"bubble","n":..,"K":..,"mu":[[re,im],..],"kappa":[re,im]} or
/// {"kind":"fbeta","n":..,"nu":..,"beta":..}. Throws ParseError naming the offending field.
ScalarField field_from_json(const nlohmann::json& j);
ScalarField parse_field_spec(std::string_view text);
/// Inverse of field_from_json for library fields; blackbox fields are rejected.
nlohmann::json field_to_json(const ScalarField& f);

}  // namespace heiscr
