#include "heiscr/crmaps.hpp"

#include <cfloat>
#include <cmath>
#include <string>

#include "heiscr/error.hpp"

namespace heiscr {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

HPoint lerp(const HPoint& a, const HPoint& b, double s) {
  std::vector<Complex> z(static_cast<std::size_t>(a.dim()));
  for (int j = 0; j < a.dim(); ++j) z[static_cast<std::size_t>(j)] = a.z(j) + s * (b.z(j) - a.z(j));
  return HPoint(std::move(z), a.t() + s * (b.t() - a.t()));
}

}  // namespace

std::string primitive_name(const CRPrimitive& p) {
  return std::visit(overloaded{[](const Translate&) { return std::string("Translate"); },
                               [](const Dilate&) { return std::string("Dilate"); },
                               [](const Rotate&) { return std::string("Rotate"); },
                               [](const Iota&) { return std::string("Iota"); },
                               [](const CRInv&) { return std::string("CRInv"); }},
                    p);
}

HPoint iota(const HPoint& a) {
  std::vector<Complex> z(a.z().begin(), a.z().end());
  for (Complex& c : z) c = std::conj(c);
  return HPoint(std::move(z), -a.t());
}

HPoint cr_inversion(const HPoint& a) {
  const Complex w{a.t(), a.z_norm_sq()};
  const double w2 = std::norm(w);
  if (!(w2 >= DBL_MIN)) {
    throw SingularityError("cr_inversion: argument is the group identity");
  }
  std::vector<Complex> z(a.z().begin(), a.z().end());
  for (Complex& c : z) c /= w;
  return HPoint(std::move(z), -a.t() / w2);
}

HPoint apply_primitive(const CRPrimitive& p, const HPoint& a) {
  return std::visit(overloaded{[&](const Translate& tr) { return group_mul(tr.by, a); },
                               [&](const Dilate& d) { return dilate(d.factor, a); },
                               [&](const Rotate& r) { return rotate(r.m, a); },
                               [&](const Iota&) { return iota(a); },
                               [&](const CRInv&) { return cr_inversion(a); }},
                    p);
}

CRMap::CRMap(std::vector<CRPrimitive> chain) : chain_(std::move(chain)) {
  for (const CRPrimitive& p : chain_) {
    if (const auto* d = std::get_if<Dilate>(&p); d && !(d->factor > 0.0)) {
      throw DomainError("CRMap: dilation factor must be positive");
    }
  }
}

CRMap CRMap::compose(const CRMap& inner) const {
  std::vector<CRPrimitive> chain(chain_);
  chain.insert(chain.end(), inner.chain_.begin(), inner.chain_.end());
  return CRMap(std::move(chain));
}

HPoint CRMap::apply(const HPoint& a) const {
  HPoint p = a;
  for (std::size_t k = chain_.size(); k-- > 0;) {
    try {
      p = apply_primitive(chain_[k], p);
    } catch (const SingularityError&) {
      throw SingularityError("CRMap: primitive " + std::to_string(k) + " (" +
                             primitive_name(chain_[k]) + ") evaluated at its singular point");
    }
  }
  return p;
}

double CRMap::jacobian_det_abs(const HPoint& a) const {
  const int q = homogeneous_dimension(a.dim());
  double det = 1.0;
  HPoint p = a;
  for (std::size_t k = chain_.size(); k-- > 0;) {
    const CRPrimitive& prim = chain_[k];
    if (const auto* d = std::get_if<Dilate>(&prim)) {
      det *= std::pow(d->factor, q);
    } else if (std::holds_alternative<CRInv>(prim)) {
      if (p.is_identity()) {
        throw SingularityError("CRMap: primitive " + std::to_string(k) +
                               " (CRInv) evaluated at its singular point");
      }
      det *= std::pow(koranyi_norm(p), -2 * q);
    }
    try {
      p = apply_primitive(prim, p);
    } catch (const SingularityError&) {
      throw SingularityError("CRMap: primitive " + std::to_string(k) + " (" +
                             primitive_name(prim) + ") evaluated at its singular point");
    }
  }
  return det;
}

double jacobian_det_abs(const CRMap& psi, const HPoint& a) { return psi.jacobian_det_abs(a); }

std::vector<double> rotation_phases(const HPoint& center, double beta) {
  const Complex shifted{center.t(), center.z_norm_sq() + beta};
  std::vector<double> theta(static_cast<std::size_t>(center.dim()), 0.0);
  for (int k = 0; k < center.dim(); ++k) {
    const Complex zk = center.z(k);
    if (zk == Complex{}) continue;
    if (shifted == Complex{}) {
      throw DomainError("build_m: arg(t' + i|z'|^2 + i beta) is undefined (the value is 0)");
    }
    theta[static_cast<std::size_t>(k)] = 2.0 * std::arg(zk) + std::arg(shifted);
  }
  return theta;
}

Unitary build_m(const HPoint& center, double beta) {
  return Unitary::diagonal(rotation_phases(center, beta));
}

GCRInversion::GCRInversion(HPoint center, double radius, double beta)
    : center_(std::move(center)),
      radius_(radius),
      beta_(beta),
      phases_(rotation_phases(center_, beta)),
      rotation_(Unitary::diagonal(phases_)) {
  if (!(radius_ > 0.0) || !std::isfinite(radius_)) {
    throw DomainError("GCRInversion: radius must be positive and finite");
  }
}

HPoint GCRInversion::apply(const HPoint& zeta) const {
  if (zeta.dim() != center_.dim()) throw ContractError("gcr_apply: dimension mismatch");
  if (zeta == center_) throw SingularityError("gcr_apply: zeta coincides with the center");
  HPoint p = group_mul(group_inv(center_), zeta);
  p = iota(p);
  try {
    p = cr_inversion(p);
  } catch (const SingularityError&) {
    throw SingularityError("gcr_apply: zeta coincides (numerically) with the center");
  }
  p = dilate(radius_ * radius_, p);
  p = rotate(rotation_, p);
  return group_mul(center_, p);
}

CRMap GCRInversion::as_map() const {
  return CRMap({Translate{center_}, Rotate{rotation_}, Dilate{radius_ * radius_}, CRInv{}, Iota{},
                Translate{group_inv(center_)}});
}

kernels::GcrParams GCRInversion::kernel_params() const {
  kernels::GcrParams g;
  g.n = center_.dim();
  for (int j = 0; j < g.n; ++j) {
    g.center_re.push_back(center_.z(j).real());
    g.center_im.push_back(center_.z(j).imag());
    const Complex e = rotation_(j, j);
    g.phase_cos.push_back(e.real());
    g.phase_sin.push_back(e.imag());
  }
  g.center_t = center_.t();
  g.radius = radius_;
  return g;
}

namespace {

// Solves a (2n+1)x(2n+1) system in place by Gaussian elimination with partial
// pivoting. Returns false when the matrix is numerically singular.
bool solve_dense(std::vector<double>& a, std::vector<double>& b, std::size_t m) {
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r) {
      if (std::abs(a[r * m + col]) > std::abs(a[piv * m + col])) piv = r;
    }
    if (!(std::abs(a[piv * m + col]) > 0.0)) return false;
    if (piv != col) {
      for (std::size_t c = 0; c < m; ++c) std::swap(a[piv * m + c], a[col * m + c]);
      std::swap(b[piv], b[col]);
    }
    for (std::size_t r = col + 1; r < m; ++r) {
      const double f = a[r * m + col] / a[col * m + col];
      for (std::size_t c = col; c < m; ++c) a[r * m + c] -= f * a[col * m + c];
      b[r] -= f * b[col];
    }
  }
  for (std::size_t i = m; i-- > 0;) {
    double acc = b[i];
    for (std::size_t c = i + 1; c < m; ++c) acc -= a[i * m + c] * b[c];
    b[i] = acc / a[i * m + i];
  }
  return true;
}

double sum_sq(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

}  // namespace

FixedPointResult fixed_point_center(const RadiusMap& radius_of, double beta, const HPoint& zeta,
                                    double eps, const FixedPointOptions& opts) {
  if (!(eps > 0.0)) throw DomainError("fixed_point_center: eps must be positive");
  if (opts.max_iterations < 1 || !(opts.damping > 0.0 && opts.damping < 1.0)) {
    throw ContractError("fixed_point_center: need max_iterations >= 1 and damping in (0, 1)");
  }
  const int n = zeta.dim();
  auto image = [&](const HPoint& xi) {
    return GCRInversion(xi, radius_of(xi), beta).apply(zeta);
  };
  auto converged = [&](HPoint xi, double residual, int it) -> FixedPointResult {
    if (koranyi_norm(xi) > eps) {
      throw ConvergenceError("fixed_point_center: converged center has norm " +
                             std::to_string(koranyi_norm(xi)) + " > eps = " + std::to_string(eps) +
                             "; |zeta|_H is below the contraction threshold");
    }
    return {std::move(xi), residual, it};
  };
  auto fail = [&](int it, double residual, const char* why) {
    return ConvergenceError("fixed_point_center: " + std::string(why) + " after " +
                            std::to_string(it) + " iterations (residual " +
                            std::to_string(residual) + ")");
  };

  // One step of T from the identity.
  HPoint xi = HPoint::identity(n);
  HPoint phi = image(xi);
  double residual = koranyi_norm(phi);
  int it = 0;
  if (residual <= opts.tolerance) return converged(xi, residual, it);
  xi = group_mul(group_inv(phi), xi);
  phi = image(xi);
  residual = koranyi_norm(phi);
  ++it;

  if (opts.method == FixedPointMethod::t_iteration) {
    while (residual > opts.tolerance) {
      if (it >= opts.max_iterations) throw fail(it, residual, "no convergence");
      ++it;
      HPoint next = group_mul(group_inv(phi), xi);
      HPoint next_phi = image(next);
      double next_res = koranyi_norm(next_phi);
      for (int halvings = 0; next_res > residual && halvings < 60; ++halvings) {
        next = lerp(xi, next, opts.damping);
        next_phi = image(next);
        next_res = koranyi_norm(next_phi);
      }
      xi = std::move(next);
      phi = std::move(next_phi);
      residual = next_res;
    }
    return converged(xi, residual, it);
  }

  // Damped Newton on F(xi) = Phi_{xi, lambda(xi)}(zeta) in real coordinates, with
  // central-difference Jacobians. Steps are scaled to |xi|_H (z) and |xi|_H^2 (t).
  const std::size_t m = static_cast<std::size_t>(2 * n + 1);
  std::vector<double> x = xi.real_coords();
  std::vector<double> fx = phi.real_coords();
  while (residual > opts.tolerance) {
    if (it >= opts.max_iterations) throw fail(it, residual, "no convergence");
    ++it;
    const double scale = std::max(koranyi_norm(HPoint::from_real(x)), 1e-12);
    std::vector<double> jac(m * m);
    for (std::size_t c = 0; c < m; ++c) {
      const double h = 1e-6 * (c + 1 == m ? scale * scale : scale);
      std::vector<double> xp = x, xm = x;
      xp[c] += h;
      xm[c] -= h;
      const auto fp = image(HPoint::from_real(xp)).real_coords();
      const auto fm = image(HPoint::from_real(xm)).real_coords();
      for (std::size_t r = 0; r < m; ++r) jac[r * m + c] = (fp[r] - fm[r]) / (2.0 * h);
    }
    std::vector<double> dx(m);
    for (std::size_t r = 0; r < m; ++r) dx[r] = -fx[r];
    if (!solve_dense(jac, dx, m)) throw fail(it, residual, "singular Jacobian");
    const double merit = sum_sq(fx);
    double step = 1.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 60; ++halvings, step *= opts.damping) {
      std::vector<double> trial(m);
      for (std::size_t r = 0; r < m; ++r) trial[r] = x[r] + step * dx[r];
      const HPoint tp = image(HPoint::from_real(trial));
      auto ft = tp.real_coords();
      if (sum_sq(ft) < merit) {
        x = std::move(trial);
        fx = std::move(ft);
        residual = koranyi_norm(tp);
        accepted = true;
        break;
      }
    }
    if (!accepted) throw fail(it, residual, "line search stalled");
  }
  return converged(HPoint::from_real(x), residual, it);
}

}  // namespace heiscr
