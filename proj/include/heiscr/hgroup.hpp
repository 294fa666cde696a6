#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace heiscr {

using Complex = std::complex<double>;

/// A point (z, t) of the Heisenberg group H^n, z in C^n, t real.
///
/// The complex coordinates are stored contiguously as (re, im) pairs. Points are
/// immutable once built; every component is checked to be finite.
class HPoint {
 public:
  /// The group identity of H^n.
  static HPoint identity(int n);

  HPoint(std::vector<Complex> z, double t);

  /// Builds a point from real coordinates x_1..x_n, y_1..y_n, t.
  static HPoint from_real(std::span<const double> coords);

  int dim() const { return static_cast<int>(z_.size()); }
  std::span<const Complex> z() const { return z_; }
  Complex z(int j) const { return z_[static_cast<std::size_t>(j)]; }
  double t() const { return t_; }

  /// |z|^2
  double z_norm_sq() const;

  /// Real coordinates x_1..x_n, y_1..y_n, t (length 2n+1).
  std::vector<double> real_coords() const;

  bool is_identity() const;

  friend bool operator==(const HPoint&, const HPoint&) = default;

 private:
  std::vector<Complex> z_;
  double t_ = 0.0;
};

/// Homogeneous dimension Q = 2n + 2.
inline int homogeneous_dimension(int n) { return 2 * n + 2; }

/// Complex n x n unitary matrix (row-major). Rejected on construction when
/// m m* differs from the identity by more than 1e-12 in any entry.
class Unitary {
 public:
  static constexpr double kTolerance = 1e-12;

  Unitary(int n, std::vector<Complex> entries);

  static Unitary identity(int n);
  /// diag(e^{i phase_k})
  static Unitary diagonal(std::span<const double> phases);

  int dim() const { return n_; }
  Complex operator()(int row, int col) const {
    return m_[static_cast<std::size_t>(row * n_ + col)];
  }
  std::span<const Complex> entries() const { return m_; }

  std::vector<Complex> apply(std::span<const Complex> z) const;
  Unitary adjoint() const;

 private:
  int n_;
  std::vector<Complex> m_;
};

HPoint group_mul(const HPoint& a, const HPoint& b);
HPoint group_inv(const HPoint& a);
double koranyi_norm(const HPoint& a);
/// d_H(a, b) = |b^{-1} a|_H
double dist(const HPoint& a, const HPoint& b);
/// delta_lambda(z, t) = (lambda z, lambda^2 t)
HPoint dilate(double lambda, const HPoint& a);
/// rho_M(z, t) = (M z, t)
HPoint rotate(const Unitary& m, const HPoint& a);

/// Lebesgue (= Haar) volume of the Koranyi ball of radius lambda in H^n.
double ball_volume(int n, double lambda);

/// k points uniformly distributed in B_lambda(center). Rejection sampling from the
/// box [-lambda, lambda]^{2n} x [-lambda^2, lambda^2] around the identity followed by
/// left translation; deterministic for a given seed.
std::vector<HPoint> sample_ball(const HPoint& center, double lambda, std::size_t k,
                                std::uint64_t seed);

}  // namespace heiscr
