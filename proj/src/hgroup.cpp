#include "heiscr/hgroup.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "heiscr/error.hpp"
#include "heiscr/kernels.hpp"

namespace heiscr {

namespace {

void require_same_dim(const HPoint& a, const HPoint& b, const char* op) {
  if (a.dim() != b.dim()) {
    throw ContractError(std::string(op) + ": dimension mismatch (" + std::to_string(a.dim()) +
                        " vs " + std::to_string(b.dim()) + ")");
  }
}

// Im(a * conj(b))
inline double im_cross(Complex a, Complex b) { return a.imag() * b.real() - a.real() * b.imag(); }

}  // namespace

HPoint::HPoint(std::vector<Complex> z, double t) : z_(std::move(z)), t_(t) {
  if (z_.empty()) throw ContractError("HPoint: dimension n must be at least 1");
  if (!std::isfinite(t_)) throw ContractError("HPoint: t is not finite");
  for (const Complex& c : z_) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      throw ContractError("HPoint: z component is not finite");
    }
  }
}

HPoint HPoint::identity(int n) {
  if (n < 1) throw ContractError("HPoint: dimension n must be at least 1");
  return HPoint(std::vector<Complex>(static_cast<std::size_t>(n)), 0.0);
}

HPoint HPoint::from_real(std::span<const double> coords) {
  if (coords.size() < 3 || coords.size() % 2 == 0) {
    throw ContractError("HPoint::from_real: expected 2n+1 coordinates, got " +
                        std::to_string(coords.size()));
  }
  const std::size_t n = (coords.size() - 1) / 2;
  std::vector<Complex> z(n);
  for (std::size_t j = 0; j < n; ++j) z[j] = {coords[j], coords[n + j]};
  return HPoint(std::move(z), coords[2 * n]);
}

double HPoint::z_norm_sq() const {
  double s = 0.0;
  for (const Complex& c : z_) s += c.real() * c.real() + c.imag() * c.imag();
  return s;
}

std::vector<double> HPoint::real_coords() const {
  const std::size_t n = z_.size();
  std::vector<double> out(2 * n + 1);
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = z_[j].real();
    out[n + j] = z_[j].imag();
  }
  out[2 * n] = t_;
  return out;
}

bool HPoint::is_identity() const {
  if (t_ != 0.0) return false;
  for (const Complex& c : z_) {
    if (c != Complex{}) return false;
  }
  return true;
}

Unitary::Unitary(int n, std::vector<Complex> entries) : n_(n), m_(std::move(entries)) {
  if (n < 1 || m_.size() != static_cast<std::size_t>(n * n)) {
    throw ContractError("Unitary: expected n*n entries");
  }
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      Complex s{};
      for (int k = 0; k < n; ++k) s += (*this)(r, k) * std::conj((*this)(c, k));
      const Complex expected = (r == c) ? Complex{1.0, 0.0} : Complex{};
      if (!(std::abs(s - expected) <= kTolerance)) {
        throw ContractError("Unitary: matrix is not unitary (entry " + std::to_string(r) + "," +
                            std::to_string(c) + " of m m* off by " +
                            std::to_string(std::abs(s - expected)) + ")");
      }
    }
  }
}

Unitary Unitary::identity(int n) {
  std::vector<Complex> m(static_cast<std::size_t>(n * n));
  for (int k = 0; k < n; ++k) m[static_cast<std::size_t>(k * n + k)] = 1.0;
  return Unitary(n, std::move(m));
}

Unitary Unitary::diagonal(std::span<const double> phases) {
  const int n = static_cast<int>(phases.size());
  std::vector<Complex> m(static_cast<std::size_t>(n * n));
  for (int k = 0; k < n; ++k) {
    m[static_cast<std::size_t>(k * n + k)] = std::polar(1.0, phases[static_cast<std::size_t>(k)]);
  }
  return Unitary(n, std::move(m));
}

std::vector<Complex> Unitary::apply(std::span<const Complex> z) const {
  if (static_cast<int>(z.size()) != n_) throw ContractError("Unitary::apply: dimension mismatch");
  std::vector<Complex> out(z.size());
  for (int r = 0; r < n_; ++r) {
    Complex s{};
    for (int c = 0; c < n_; ++c) s += (*this)(r, c) * z[static_cast<std::size_t>(c)];
    out[static_cast<std::size_t>(r)] = s;
  }
  return out;
}

Unitary Unitary::adjoint() const {
  std::vector<Complex> m(m_.size());
  for (int r = 0; r < n_; ++r) {
    for (int c = 0; c < n_; ++c) m[static_cast<std::size_t>(c * n_ + r)] = std::conj((*this)(r, c));
  }
  return Unitary(n_, std::move(m));
}

HPoint group_mul(const HPoint& a, const HPoint& b) {
  require_same_dim(a, b, "group_mul");
  std::vector<Complex> z(static_cast<std::size_t>(a.dim()));
  double cross = 0.0;
  for (int j = 0; j < a.dim(); ++j) {
    z[static_cast<std::size_t>(j)] = a.z(j) + b.z(j);
    cross += im_cross(a.z(j), b.z(j));
  }
  return HPoint(std::move(z), a.t() + b.t() + 2.0 * cross);
}

HPoint group_inv(const HPoint& a) {
  std::vector<Complex> z(a.z().begin(), a.z().end());
  for (Complex& c : z) c = -c;
  return HPoint(std::move(z), -a.t());
}

double koranyi_norm(const HPoint& a) {
  const double s = a.z_norm_sq();
  return std::sqrt(std::sqrt(s * s + a.t() * a.t()));
}

double dist(const HPoint& a, const HPoint& b) {
  require_same_dim(a, b, "dist");
  return koranyi_norm(group_mul(group_inv(b), a));
}

HPoint dilate(double lambda, const HPoint& a) {
  if (!(lambda > 0.0)) throw DomainError("dilate: lambda must be positive");
  std::vector<Complex> z(a.z().begin(), a.z().end());
  for (Complex& c : z) c *= lambda;
  return HPoint(std::move(z), lambda * lambda * a.t());
}

HPoint rotate(const Unitary& m, const HPoint& a) {
  if (m.dim() != a.dim()) throw ContractError("rotate: dimension mismatch");
  return HPoint(m.apply(a.z()), a.t());
}

double ball_volume(int n, double lambda) {
  // vol(B_1) = vol(unit ball of R^{2n}) * int_{-1}^{1} (1 - t^2)^{n/2} dt
  const double nd = n;
  const double ball2n = std::pow(std::numbers::pi, nd) / std::tgamma(nd + 1.0);
  const double tint =
      std::sqrt(std::numbers::pi) * std::tgamma(nd / 2.0 + 1.0) / std::tgamma(nd / 2.0 + 1.5);
  return ball2n * tint * std::pow(lambda, homogeneous_dimension(n));
}

std::vector<HPoint> sample_ball(const HPoint& center, double lambda, std::size_t k,
                                std::uint64_t seed) {
  return kernels::sample_ball_batch(center, lambda, k, seed).to_points();
}

}  // namespace heiscr
