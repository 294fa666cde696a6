#pragma once

#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "heiscr/hgroup.hpp"
#include "heiscr/kernels.hpp"

namespace heiscr {

/// Left translation tau_by(p) = by * p.
struct Translate {
  HPoint by;
};
/// delta_factor(z, t) = (factor z, factor^2 t)
struct Dilate {
  double factor;
};
/// rho_m(z, t) = (m z, t)
struct Rotate {
  Unitary m;
};
/// (z, t) -> (conj z, -t)
struct Iota {};
/// (z, t) -> (z / w, -t / |w|^2), w = t + i|z|^2
struct CRInv {};

using CRPrimitive = std::variant<Translate, Dilate, Rotate, Iota, CRInv>;

std::string primitive_name(const CRPrimitive& p);

/// A finite composition of primitive CR maps. The chain is kept in written
/// order, chain[0] o chain[1] o ... o chain[k-1], and evaluated right to left.
/// The empty chain is the identity.
class CRMap {
 public:
  CRMap() = default;
  explicit CRMap(std::vector<CRPrimitive> chain);

  std::span<const CRPrimitive> chain() const { return chain_; }

  /// this o inner
  CRMap compose(const CRMap& inner) const;

  /// Throws SingularityError naming the primitive whose CR inversion met the identity.
  HPoint apply(const HPoint& a) const;

  /// |det J_psi(a)|, the product of primitive determinants along the orbit of a:
  /// translations, rotations and iota contribute 1, Dilate(l) contributes l^Q and
  /// a CR inversion at p contributes |p|_H^{-2Q}.
  double jacobian_det_abs(const HPoint& a) const;

 private:
  std::vector<CRPrimitive> chain_;
};

HPoint iota(const HPoint& a);
/// Throws SingularityError when |w|^2 underflows (a at, or numerically at, the identity).
HPoint cr_inversion(const HPoint& a);
HPoint apply_primitive(const CRPrimitive& p, const HPoint& a);

/// theta_k = 2 arg z'_k + arg(t' + i|z'|^2 + i beta) for z'_k != 0, else 0, with
/// principal-branch arguments. Throws DomainError if the second argument is
/// needed and t' + i|z'|^2 + i beta = 0.
std::vector<double> rotation_phases(const HPoint& center, double beta);
/// diag(e^{i theta_k})
Unitary build_m(const HPoint& center, double beta);

/// The generalized CR inversion in the Koranyi sphere of radius `radius` about
/// `center`: tau_c o rho_M o delta_{radius^2} o J o iota o tau_c^{-1}.
class GCRInversion {
 public:
  GCRInversion(HPoint center, double radius, double beta);

  const HPoint& center() const { return center_; }
  double radius() const { return radius_; }
  double beta() const { return beta_; }
  std::span<const double> phases() const { return phases_; }
  const Unitary& rotation() const { return rotation_; }

  /// Throws SingularityError when zeta == center.
  HPoint apply(const HPoint& zeta) const;
  HPoint operator()(const HPoint& zeta) const { return apply(zeta); }

  CRMap as_map() const;
  kernels::GcrParams kernel_params() const;

 private:
  HPoint center_;
  double radius_;
  double beta_;
  std::vector<double> phases_;
  Unitary rotation_;
};

inline HPoint gcr_apply(const GCRInversion& phi, const HPoint& zeta) { return phi.apply(zeta); }
double jacobian_det_abs(const CRMap& psi, const HPoint& a);

/// xi -> lambda(xi), the radius for which the inversion about xi is a symmetry.
using RadiusMap = std::function<double(const HPoint&)>;

enum class FixedPointMethod {
  /// Damped Newton on Phi_{xi, lambda(xi)}(zeta) = 0, started from T(identity).
  newton,
  /// Plain damped iteration of T. It does not contract in the phases of z, so off
  /// the t-axis it converges only for special phase alignments.
  t_iteration,
};

struct FixedPointOptions {
  int max_iterations = 10000;
  double tolerance = 1e-8;
  /// Step reduction factor of the line search.
  double damping = 0.5;
  FixedPointMethod method = FixedPointMethod::newton;
};

struct FixedPointResult {
  HPoint center;
  double residual;
  int iterations;
};

/// Finds xi* with Phi_{xi*, lambda(xi*)}^beta(zeta) = 0, the fixed point of
/// T(xi) = (Phi_{xi, lambda(xi)}^beta(zeta))^{-1} * xi. The first step is T applied
/// to the identity; then `opts.method` refines it until |Phi(zeta)|_H <= tolerance.
/// A step that does not reduce the residual is shrunk by `damping`. Throws
/// ConvergenceError (with the last residual) on non-convergence, or when the
/// converged center lies outside the closed eps-ball.
FixedPointResult fixed_point_center(const RadiusMap& radius_of, double beta, const HPoint& zeta,
                                    double eps, const FixedPointOptions& opts = {});

}  // namespace heiscr
