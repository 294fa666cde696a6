#include "heiscr/movesphere.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "heiscr/crmaps.hpp"
#include "heiscr/error.hpp"
#include "heiscr/kernels.hpp"
#include "heiscr/rng.hpp"

namespace heiscr {

namespace {

constexpr std::size_t kChunk = 4096;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double critical_exponent(int n) {
  const int q = homogeneous_dimension(n);
  return static_cast<double>(q + 2) / (q - 2);
}

// Field values over a batch. The closed-form families are evaluated straight
// from the SoA rows; anything else goes through HPoint.
void eval_batch(const ScalarField& u, const kernels::PointBatch& pts, std::span<double> out) {
  const std::size_t m = pts.count;
  if (const auto* fb = std::get_if<FBetaParams>(&u.kind())) {
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      for (int j = 0; j < pts.n; ++j) {
        const double x = pts.re_row(j)[i];
        const double y = pts.im_row(j)[i];
        s += x * x + y * y;
      }
      const double re = pts.t[i];
      const double im = s + fb->beta;
      const double m2 = re * re + im * im;
      if (m2 == 0.0) throw SingularityError("f_beta: t + i|z|^2 + i beta vanishes");
      out[i] = std::pow(m2, -fb->nu / 4.0);
    }
    return;
  }
  if (const auto* bp = std::get_if<BubbleParams>(&u.kind())) {
    if (bp->dim() != pts.n) throw ContractError("bubble: dimension mismatch");
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      Complex q{0.0, 0.0};
      for (int j = 0; j < pts.n; ++j) {
        const Complex z{pts.re_row(j)[i], pts.im_row(j)[i]};
        s += std::norm(z);
        q += bp->mu[static_cast<std::size_t>(j)] * z;
      }
      q += Complex{pts.t[i], s} + bp->kappa;
      out[i] = bp->K * std::pow(std::norm(q), -0.5 * pts.n);
    }
    return;
  }
  for (std::size_t i = 0; i < m; ++i) out[i] = u(pts.point(i));
}

// dst <- xi * delta_lambda(unit[first, first + m))
void push_forward(const kernels::PointBatch& unit, std::size_t first, std::size_t m,
                  double lambda, const HPoint& xi, kernels::PointBatch& dst) {
  const double l2 = lambda * lambda;
  for (int j = 0; j < unit.n; ++j) {
    const double* sr = unit.re_row(j) + first;
    const double* si = unit.im_row(j) + first;
    double* dr = dst.re_row(j);
    double* di = dst.im_row(j);
    for (std::size_t i = 0; i < m; ++i) {
      dr[i] = lambda * sr[i];
      di[i] = lambda * si[i];
    }
  }
  for (std::size_t i = 0; i < m; ++i) dst.t[i] = l2 * unit.t[first + i];
  kernels::left_translate(xi, dst);
}

// Evaluates u and its Kelvin transform on a batch of points of B_lambda(xi).
class KelvinPair {
 public:
  KelvinPair(const ScalarField& u, const HPoint& xi, double lambda, double beta)
      : u_(u), lambda_(lambda), power_(homogeneous_dimension(xi.dim()) - 2) {
    params_ = GCRInversion(xi, lambda, beta).kernel_params();
  }

  void operator()(const kernels::PointBatch& pts, std::vector<double>& u_val,
                  std::vector<double>& uk_val) {
    const std::size_t m = pts.count;
    if (image_.n != pts.n || image_.count != m) image_ = kernels::PointBatch(pts.n, m);
    dist_.resize(m);
    u_val.resize(m);
    uk_val.resize(m);
    kernels::gcr_apply(params_, pts, image_, dist_);
    eval_batch(u_, pts, u_val);
    eval_batch(u_, image_, uk_val);
    for (std::size_t i = 0; i < m; ++i) uk_val[i] *= std::pow(lambda_ / dist_[i], power_);
  }

 private:
  const ScalarField& u_;
  double lambda_;
  int power_;
  kernels::GcrParams params_;
  kernels::PointBatch image_;
  std::vector<double> dist_;
};

// Counts samples of the pushed-forward unit ball that violate u <= u_K; stops
// after `stop_after` violations (0 = never).
std::size_t count_violations(const ScalarField& u, const HPoint& xi, double lambda, double beta,
                             const kernels::PointBatch& unit, double rel_tol,
                             std::size_t stop_after) {
  KelvinPair pair(u, xi, lambda, beta);
  kernels::PointBatch chunk;
  std::vector<double> uv, ukv;
  std::size_t violations = 0;
  for (std::size_t first = 0; first < unit.count; first += kChunk) {
    const std::size_t m = std::min(kChunk, unit.count - first);
    if (chunk.count != m) chunk = kernels::PointBatch(unit.n, m);
    push_forward(unit, first, m, lambda, xi, chunk);
    pair(chunk, uv, ukv);
    for (std::size_t i = 0; i < m; ++i) {
      if (uv[i] - ukv[i] > rel_tol * uv[i]) ++violations;
    }
    if (stop_after != 0 && violations >= stop_after) break;
  }
  return violations;
}

std::string fmt_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt_point(const HPoint& a) {
  std::string s = "(";
  const auto c = a.real_coords();
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) s += ",";
    s += fmt_double(c[i]);
  }
  return s + ")";
}

}  // namespace

void SphereConfig::validate() const {
  if (!(lambda_min > 0.0) || !(lambda_max > lambda_min) || !std::isfinite(lambda_max)) {
    throw ConfigError("SphereConfig: need 0 < lambda_min < lambda_max");
  }
  if (samples < 1000 || curve_samples < 1000) {
    throw ConfigError("SphereConfig: sample counts must be at least 1000");
  }
  if (equality_samples < 1) throw ConfigError("SphereConfig: equality_samples must be positive");
  if (bisection_steps < 1) throw ConfigError("SphereConfig: bisection_steps must be positive");
  if (monotonicity_probes < 2) throw ConfigError("SphereConfig: need at least 2 probes");
  if (!(violation_rel_tol >= 0.0)) throw ConfigError("SphereConfig: violation_rel_tol < 0");
  for (double f : curve_factors) {
    if (!(f > 0.0)) throw ConfigError("SphereConfig: curve factors must be positive");
  }
  fd.validate();
}

ViolationEstimate violation_measure(const ScalarField& u, const HPoint& xi, double lambda,
                                    double beta, std::size_t k, std::uint64_t seed,
                                    double violation_rel_tol) {
  if (!(lambda > 0.0)) throw ContractError("violation_measure: lambda must be positive");
  if (k < 1000) throw ContractError("violation_measure: need at least 1000 samples");
  const auto unit = kernels::sample_ball_batch(HPoint::identity(xi.dim()), 1.0, k, seed);
  const std::size_t v = count_violations(u, xi, lambda, beta, unit, violation_rel_tol, 0);
  const double vol = ball_volume(xi.dim(), lambda);
  const double f = static_cast<double>(v) / static_cast<double>(k);
  ViolationEstimate est;
  est.measure = vol * f;
  est.std_error = vol * std::sqrt(f * (1.0 - f) / static_cast<double>(k));
  est.violations = v;
  est.samples = k;
  return est;
}

LambdaEstimate estimate_lambda_underline(const ScalarField& u, const HPoint& xi, double beta,
                                         const SphereConfig& cfg) {
  cfg.validate();
  const auto unit =
      kernels::sample_ball_batch(HPoint::identity(xi.dim()), 1.0, cfg.samples, cfg.seed);
  auto clean = [&](double lambda) {
    return count_violations(u, xi, lambda, beta, unit, cfg.violation_rel_tol, 1) == 0;
  };

  const int probes = cfg.monotonicity_probes;
  const double ratio = cfg.lambda_max / cfg.lambda_min;
  std::vector<double> radii(static_cast<std::size_t>(probes));
  std::vector<bool> ok(static_cast<std::size_t>(probes));
  for (int k = 0; k < probes; ++k) {
    radii[static_cast<std::size_t>(k)] =
        k == probes - 1 ? cfg.lambda_max
                        : cfg.lambda_min * std::pow(ratio, static_cast<double>(k) / (probes - 1));
    ok[static_cast<std::size_t>(k)] = clean(radii[static_cast<std::size_t>(k)]);
  }
  if (!ok.front()) {
    throw BracketError("estimate_lambda_underline: violations already at lambda_min = " +
                       fmt_double(cfg.lambda_min));
  }
  if (ok.back()) {
    throw BracketError("estimate_lambda_underline: no violations up to lambda_max = " +
                       fmt_double(cfg.lambda_max));
  }
  std::size_t first_bad = 0;
  while (ok[first_bad]) ++first_bad;
  for (std::size_t k = first_bad; k < ok.size(); ++k) {
    if (ok[k]) {
      throw DomainError("estimate_lambda_underline: zero-violation indicator is not monotone (clean at " +
                        fmt_double(radii[k]) + " after a violation at " +
                        fmt_double(radii[first_bad]) + ")");
    }
  }
  double lo = radii[first_bad - 1];
  double hi = radii[first_bad];
  for (int step = 0; step < cfg.bisection_steps; ++step) {
    const double mid = 0.5 * (lo + hi);
    (clean(mid) ? lo : hi) = mid;
  }
  return {0.5 * (lo + hi), lo, hi};
}

TerraciniQuantities terracini_quantities(const ScalarField& u, const HPoint& xi, double lambda,
                                         double beta, double p, std::size_t k, std::uint64_t seed,
                                         const SphereConfig& cfg) {
  const int n = xi.dim();
  const int q = homogeneous_dimension(n);
  if (!(p > 1.0) || !(p <= critical_exponent(n))) {
    throw DomainError("terracini_quantities: p must lie in (1, (Q+2)/(Q-2)]");
  }
  if (!(lambda > 0.0)) throw ContractError("terracini_quantities: lambda must be positive");
  if (k < 1) throw ContractError("terracini_quantities: need samples");
  const auto pts = kernels::sample_ball_batch(xi, lambda, k, seed);
  KelvinPair pair(u, xi, lambda, beta);
  std::vector<double> uv, ukv;
  pair(pts, uv, ukv);

  const GCRInversion phi(xi, lambda, beta);
  const ScalarField diff = ScalarField::blackbox(
      [&u, &phi, &xi, lambda, q](const HPoint& a) {
        return u(a) - std::pow(lambda / dist(a, xi), q - 2) * u(phi.apply(a));
      },
      "u - u_K", n);

  double grad_sum = 0.0;
  double mass_sum = 0.0;
  const double power = (p - 1.0) * q / 2.0;
  for (std::size_t i = 0; i < pts.count; ++i) {
    if (!(uv[i] - ukv[i] > cfg.violation_rel_tol * uv[i])) continue;
    const auto g = horizontal_gradient(diff, pts.point(i), cfg.fd);
    for (double c : g) grad_sum += c * c;
    mass_sum += std::pow(uv[i], power);
  }
  const double vol = ball_volume(n, lambda);
  const double kk = static_cast<double>(k);
  return {vol * grad_sum / kk, std::pow(vol * mass_sum / kk, 2.0 / q)};
}

double kelvin_equality_residual(const ScalarField& u, const HPoint& xi, double lambda,
                                double beta, std::size_t k, std::uint64_t seed) {
  const auto pts = kernels::sample_ball_batch(xi, lambda, k, seed);
  KelvinPair pair(u, xi, lambda, beta);
  std::vector<double> uv, ukv;
  pair(pts, uv, ukv);
  double worst = 0.0;
  double top = 0.0;
  for (std::size_t i = 0; i < pts.count; ++i) {
    worst = std::max(worst, std::abs(uv[i] - ukv[i]));
    top = std::max(top, std::abs(uv[i]));
  }
  return top > 0.0 ? worst / top : worst;
}

std::vector<SphereReport> moving_spheres_demo(const ScalarField& u, double beta,
                                              const std::vector<HPoint>& grid,
                                              const SphereConfig& cfg) {
  cfg.validate();
  std::vector<SphereReport> reports;
  reports.reserve(grid.size());
  const CounterRng root(cfg.seed);
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const HPoint& xi = grid[idx];
    SphereReport rep{xi, beta, 0.0, 0.0, 0.0, {}, 0.0, cfg.samples, 0, std::nullopt};
    CounterRng stream = root.derive(idx);
    rep.seed = stream.next_u64();
    try {
      SphereConfig local = cfg;
      local.seed = rep.seed;
      const LambdaEstimate est = estimate_lambda_underline(u, xi, beta, local);
      rep.lambda_underline = est.lambda;
      rep.lambda_lower = est.lower;
      rep.lambda_upper = est.upper;
      const double p = cfg.p == 0.0 ? critical_exponent(xi.dim()) : cfg.p;
      const std::uint64_t curve_seed = stream.next_u64();
      for (double factor : cfg.curve_factors) {
        const double lambda = factor * est.lambda;
        const auto v = violation_measure(u, xi, lambda, beta, cfg.curve_samples, curve_seed,
                                         cfg.violation_rel_tol);
        const auto tq =
            terracini_quantities(u, xi, lambda, beta, p, cfg.curve_samples, curve_seed, cfg);
        rep.curve.push_back({lambda, v.measure, v.std_error, tq.lhs, tq.rhs_factor});
      }
      rep.kelvin_residual =
          kelvin_equality_residual(u, xi, est.lambda, beta, cfg.equality_samples, stream.next_u64());
    } catch (const Error& e) {
      rep.lambda_underline = rep.lambda_lower = rep.lambda_upper = kNaN;
      rep.kelvin_residual = kNaN;
      rep.curve.clear();
      rep.error = "xi[" + std::to_string(idx) + "] = " + fmt_point(xi) + ": " + e.what();
    }
    reports.push_back(std::move(rep));
  }
  return reports;
}

nlohmann::json sphere_reports_to_json(const std::vector<SphereReport>& reports) {
  // NaN (failed estimate) becomes null rather than a non-JSON number.
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : reports) {
    nlohmann::json curve = nlohmann::json::array();
    nlohmann::json terr = nlohmann::json::array();
    for (const auto& c : r.curve) {
      curve.push_back({{"lambda", num(c.lambda)}, {"measure", num(c.measure)}, {"stderr", num(c.std_error)}});
      terr.push_back({{"lambda", num(c.lambda)}, {"lhs", num(c.lhs)}, {"rhs_factor", num(c.rhs_factor)}});
    }
    nlohmann::json j;
    j["xi"] = r.xi.real_coords();
    j["beta"] = r.beta;
    j["lambda_underline"] = num(r.lambda_underline);
    j["lambda_lower"] = num(r.lambda_lower);
    j["lambda_upper"] = num(r.lambda_upper);
    j["violation_curve"] = std::move(curve);
    j["terracini"] = std::move(terr);
    j["kelvin_residual"] = num(r.kelvin_residual);
    j["samples"] = r.samples;
    j["seed"] = r.seed;
    j["error"] = r.error ? nlohmann::json(*r.error) : nlohmann::json(nullptr);
    arr.push_back(std::move(j));
  }
  return arr;
}

std::string sphere_reports_to_csv(const std::vector<SphereReport>& reports) {
  std::ostringstream os;
  os << "xi_index,lambda,violation_measure,stderr,lhs,rhs_factor\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    for (const auto& c : reports[i].curve) {
      os << i << ',' << fmt_double(c.lambda) << ',' << fmt_double(c.measure) << ','
         << fmt_double(c.std_error) << ',' << fmt_double(c.lhs) << ',' << fmt_double(c.rhs_factor)
         << '\n';
    }
  }
  return os.str();
}

}  // namespace heiscr
