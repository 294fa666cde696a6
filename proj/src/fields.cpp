#include "heiscr/fields.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "heiscr/error.hpp"

namespace heiscr {

namespace {

// Neville extrapolation to s = 0 of the polynomial through (s_i, g_i).
double extrapolate_to_zero(std::array<double, 3> s, std::array<double, 3> g) {
  for (std::size_t level = 1; level < 3; ++level) {
    for (std::size_t i = 2; i >= level; --i) {
      g[i] = (s[i - level] * g[i] - s[i] * g[i - 1]) / (s[i - level] - s[i]);
      if (i == level) break;
    }
  }
  return g[2];
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void BubbleParams::validate() const {
  if (mu.empty()) throw DomainError("BubbleParams: mu must have length n >= 1");
  if (!(K > 0.0) || !std::isfinite(K)) throw DomainError("BubbleParams: K must be positive");
  double mu2 = 0.0;
  for (const Complex& m : mu) mu2 += std::norm(m);
  if (!(kappa.imag() > mu2 / 4.0)) {
    throw DomainError("BubbleParams: Im kappa = " + fmt(kappa.imag()) +
                      " must exceed |mu|^2/4 = " + fmt(mu2 / 4.0));
  }
}

double bubble_eval(const BubbleParams& p, const HPoint& a) {
  if (a.dim() != p.dim()) throw ContractError("bubble_eval: dimension mismatch");
  Complex q{a.t(), a.z_norm_sq()};
  for (int j = 0; j < a.dim(); ++j) q += p.mu[static_cast<std::size_t>(j)] * a.z(j);
  q += p.kappa;
  const int n = a.dim();
  // (Q - 2) / 2 = n
  return p.K * std::pow(std::norm(q), -0.5 * n);
}

double fbeta_eval(const FBetaParams& p, const HPoint& a) {
  const double re = a.t();
  const double im = a.z_norm_sq() + p.beta;
  const double m2 = re * re + im * im;
  if (m2 == 0.0) throw SingularityError("fbeta_eval: t + i|z|^2 + i beta vanishes");
  return std::pow(m2, -p.nu / 4.0);
}

double lambda_of_xi(const FBetaParams& p, const HPoint& xi) {
  // |conj(w') - i beta| = |t' - i(|z'|^2 + beta)|
  const double m = std::hypot(xi.t(), xi.z_norm_sq() + p.beta);
  if (m == 0.0) throw DomainError("lambda_of_xi: conj(w') - i beta vanishes (degenerate radius)");
  return std::sqrt(m);
}

ScalarField ScalarField::bubble(BubbleParams p) {
  p.validate();
  const int n = p.dim();
  auto shared = std::make_shared<const BubbleParams>(p);
  return ScalarField([shared](const HPoint& a) { return bubble_eval(*shared, a); }, std::move(p), n);
}

ScalarField ScalarField::fbeta(FBetaParams p, int n) {
  if (!std::isfinite(p.nu) || !std::isfinite(p.beta)) {
    throw DomainError("FBetaParams: nu and beta must be finite");
  }
  return ScalarField([p](const HPoint& a) { return fbeta_eval(p, a); }, p, n);
}

ScalarField ScalarField::blackbox(Eval eval, std::string label, int n) {
  if (!eval) throw ContractError("ScalarField::blackbox: empty callable");
  return ScalarField(std::move(eval), Blackbox{std::move(label)}, n);
}

std::string ScalarField::describe() const {
  if (const auto* b = std::get_if<BubbleParams>(&kind_)) {
    return "bubble(n=" + std::to_string(b->dim()) + ", K=" + fmt(b->K) + ")";
  }
  if (const auto* f = std::get_if<FBetaParams>(&kind_)) {
    return "fbeta(nu=" + fmt(f->nu) + ", beta=" + fmt(f->beta) + ")";
  }
  return std::get<Blackbox>(kind_).label;
}

double kelvin(const ScalarField& u, const HPoint& xi, double lambda, double beta,
              const HPoint& eta) {
  const GCRInversion phi(xi, lambda, beta);
  const int q = homogeneous_dimension(eta.dim());
  const double d = dist(eta, xi);
  if (d == 0.0) throw SingularityError("kelvin: eta coincides with the center");
  return std::pow(lambda / d, q - 2) * u(phi.apply(eta));
}

ScalarField kelvin_field(const ScalarField& u, const HPoint& xi, double lambda, double beta) {
  // Validates the inversion parameters eagerly.
  GCRInversion probe(xi, lambda, beta);
  (void)probe;
  return ScalarField::blackbox(
      [u, xi, lambda, beta](const HPoint& eta) { return kelvin(u, xi, lambda, beta, eta); },
      "kelvin[" + u.describe() + "]", xi.dim());
}

AsymptoticFunctionals alpha_beta_of(const ScalarField& f, double nu, int n) {
  if (!(nu > 0.0)) throw DomainError("alpha_beta_of: nu must be positive");
  if (n < 1) throw ContractError("alpha_beta_of: n must be at least 1");
  constexpr std::array<double, 3> radii{1e2, 1e3, 1e4};

  // Ray k maps radius r to a point of Koranyi norm r.
  const int rays = 2 + 2 * n;
  auto ray_point = [n](int k, double r) {
    std::vector<Complex> z(static_cast<std::size_t>(n));
    double t = 0.0;
    if (k == 0) {
      t = r * r;
    } else if (k == 1) {
      t = -r * r;
    } else if (k - 2 < n) {
      z[static_cast<std::size_t>(k - 2)] = {r, 0.0};
    } else {
      z[static_cast<std::size_t>(k - 2 - n)] = {0.0, r};
    }
    return HPoint(std::move(z), t);
  };

  AsymptoticFunctionals out{0.0, 0.0, {}};
  for (int k = 0; k < rays; ++k) {
    std::array<double, 3> s{};
    std::array<double, 3> g{};
    for (std::size_t i = 0; i < radii.size(); ++i) {
      s[i] = 1.0 / (radii[i] * radii[i]);
      g[i] = std::pow(radii[i], nu) * f(ray_point(k, radii[i]));
      if (!std::isfinite(g[i])) {
        throw DomainError("alpha_beta_of: |zeta|^nu f(zeta) is not finite along ray " +
                          std::to_string(k));
      }
    }
    if (!(std::abs(g[2] - g[1]) <= 1e-3 * std::abs(g[2]))) {
      throw DomainError("alpha_beta_of: |zeta|^nu f(zeta) has no limit along ray " +
                        std::to_string(k) + " (values " + fmt(g[1]) + ", " + fmt(g[2]) + ")");
    }
    out.ray_limits.push_back(extrapolate_to_zero(s, g));
  }
  const auto [lo, hi] = std::minmax_element(out.ray_limits.begin(), out.ray_limits.end());
  double mean = 0.0;
  for (double v : out.ray_limits) mean += v;
  mean /= static_cast<double>(out.ray_limits.size());
  if (!(mean > 0.0) || !(*hi - *lo <= 1e-3 * std::abs(mean))) {
    throw DomainError("alpha_beta_of: ray limits disagree (" + fmt(*lo) + " .. " + fmt(*hi) +
                      "); the field has no common decay limit");
  }
  out.alpha = mean;
  const double f0 = f(HPoint::identity(n));
  if (!(f0 > 0.0)) throw DomainError("alpha_beta_of: f(0) must be positive");
  out.beta = std::pow(out.alpha, 2.0 / nu) * std::pow(f0, -2.0 / nu);
  return out;
}

RadiusMap radius_map(ScalarField f, double nu, double alpha) {
  return [f = std::move(f), nu, alpha](const HPoint& xi) {
    return std::pow(alpha, 1.0 / nu) * std::pow(f(xi), -1.0 / nu);
  };
}

MaxAtOrigin to_max_at_origin(const BubbleParams& p) {
  p.validate();
  const int n = p.dim();
  std::vector<Complex> zc(static_cast<std::size_t>(n));
  double mu2 = 0.0;
  for (int j = 0; j < n; ++j) {
    const Complex m = p.mu[static_cast<std::size_t>(j)];
    zc[static_cast<std::size_t>(j)] = Complex{0.0, -0.5} * std::conj(m);
    mu2 += std::norm(m);
  }
  HPoint center(std::move(zc), -p.kappa.real());
  const ScalarField u = ScalarField::bubble(p);
  ScalarField moved = ScalarField::blackbox(
      [u, center](const HPoint& a) { return u(group_mul(center, a)); }, "bubble o tau", n);
  return {std::move(moved), std::move(center), p.K, p.kappa.imag() - mu2 / 4.0,
          static_cast<double>(homogeneous_dimension(n) - 2)};
}

namespace {

double require_number(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw ParseError(std::string("field spec: missing field \"") + key + "\"");
  const auto& v = j.at(key);
  if (!v.is_number()) throw ParseError(std::string("field spec: \"") + key + "\" must be a number");
  return v.get<double>();
}

Complex parse_complex(const nlohmann::json& v, const std::string& where) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw ParseError("field spec: " + where + " must be a [re, im] pair of numbers");
  }
  return {v[0].get<double>(), v[1].get<double>()};
}

int require_dim(const nlohmann::json& j) {
  if (!j.contains("n")) throw ParseError("field spec: missing field \"n\"");
  const auto& v = j.at("n");
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw ParseError("field spec: \"n\" must be an integer >= 1");
  }
  return static_cast<int>(v.get<long long>());
}

}  // namespace

ScalarField field_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("field spec: expected a JSON object");
  if (!j.contains("kind") || !j.at("kind").is_string()) {
    throw ParseError("field spec: missing string field \"kind\" (\"bubble\" or \"fbeta\")");
  }
  const std::string kind = j.at("kind").get<std::string>();
  auto reject_unknown = [&](std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : j.items()) {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
        throw ParseError("field spec: unknown field \"" + key + "\" for kind \"" + kind + "\"");
      }
    }
  };
  const int n = require_dim(j);
  if (kind == "bubble") {
    reject_unknown({"kind", "n", "K", "mu", "kappa"});
    BubbleParams p;
    p.K = require_number(j, "K");
    if (!j.contains("mu") || !j.at("mu").is_array()) {
      throw ParseError("field spec: \"mu\" must be an array of [re, im] pairs");
    }
    const auto& mu = j.at("mu");
    if (static_cast<int>(mu.size()) != n) {
      throw ParseError("field spec: \"mu\" has " + std::to_string(mu.size()) +
                       " entries but n = " + std::to_string(n));
    }
    for (std::size_t k = 0; k < mu.size(); ++k) {
      p.mu.push_back(parse_complex(mu[k], "\"mu\"[" + std::to_string(k) + "]"));
    }
    if (!j.contains("kappa")) throw ParseError("field spec: missing field \"kappa\"");
    p.kappa = parse_complex(j.at("kappa"), "\"kappa\"");
    try {
      return ScalarField::bubble(std::move(p));
    } catch (const DomainError& e) {
      throw ParseError(std::string("field spec: ") + e.what());
    }
  }
  if (kind == "fbeta") {
    reject_unknown({"kind", "n", "nu", "beta"});
    FBetaParams p{require_number(j, "nu"), require_number(j, "beta")};
    return ScalarField::fbeta(p, n);
  }
  throw ParseError("field spec: unknown kind \"" + kind + "\" (expected \"bubble\" or \"fbeta\")");
}

ScalarField parse_field_spec(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("field spec: malformed JSON at byte ") + std::to_string(e.byte) +
                     ": " + e.what());
  }
  return field_from_json(j);
}

nlohmann::json field_to_json(const ScalarField& f) {
  if (const auto* b = std::get_if<BubbleParams>(&f.kind())) {
    nlohmann::json mu = nlohmann::json::array();
    for (const Complex& m : b->mu) mu.push_back({m.real(), m.imag()});
    return {{"kind", "bubble"},
            {"n", b->dim()},
            {"K", b->K},
            {"mu", mu},
            {"kappa", {b->kappa.real(), b->kappa.imag()}}};
  }
  if (const auto* p = std::get_if<FBetaParams>(&f.kind())) {
    return {{"kind", "fbeta"}, {"n", f.dim()}, {"nu", p->nu}, {"beta", p->beta}};
  }
  throw ContractError("field_to_json: blackbox fields have no JSON form");
}

}  // namespace heiscr
