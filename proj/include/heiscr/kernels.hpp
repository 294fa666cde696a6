#pragma once

// Batched group geometry over structure-of-arrays point sets.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant selected at runtime. Both variants perform the same IEEE operations in
// the same order (no FMA), so their outputs agree bit for bit.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "heiscr/hgroup.hpp"

namespace heiscr::kernels {

/// SoA storage for `count` points of H^n. Coordinate j of point i lives at
/// re[j * count + i] / im[j * count + i].
struct PointBatch {
  int n = 0;
  std::size_t count = 0;
  std::vector<double> re;
  std::vector<double> im;
  std::vector<double> t;

  PointBatch() = default;
  PointBatch(int n, std::size_t count);

  double* re_row(int j) { return re.data() + static_cast<std::size_t>(j) * count; }
  double* im_row(int j) { return im.data() + static_cast<std::size_t>(j) * count; }
  const double* re_row(int j) const { return re.data() + static_cast<std::size_t>(j) * count; }
  const double* im_row(int j) const { return im.data() + static_cast<std::size_t>(j) * count; }

  HPoint point(std::size_t i) const;
  void set_point(std::size_t i, const HPoint& p);
  static PointBatch from_points(std::span<const HPoint> pts);
  std::vector<HPoint> to_points() const;
};

/// Precomputed parameters of a generalized CR inversion for the batch kernel.
struct GcrParams {
  int n = 0;
  std::vector<double> center_re, center_im;
  double center_t = 0.0;
  double radius = 1.0;
  std::vector<double> phase_cos, phase_sin;
};

/// Uniform samples of B_lambda(center) by rejection from the box
/// [-lambda, lambda]^{2n} x [-lambda^2, lambda^2] followed by left translation.
PointBatch sample_ball_batch(const HPoint& center, double lambda, std::size_t k,
                             std::uint64_t seed);

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);
bool isa_available(Isa isa);
/// Best available ISA unless overridden by set_isa() or HEISCR_KERNEL=scalar|avx2.
Isa active_isa();
/// Throws ContractError when the ISA is not available on this machine/build.
void set_isa(Isa isa);

// Dispatching entry points.
void koranyi_norm(const PointBatch& pts, std::span<double> out);
/// pts <- center * pts
void left_translate(const HPoint& center, PointBatch& pts);
/// out <- Phi(pts); dist_out[i] = d_H(pts_i, center). Throws SingularityError
/// when a point coincides with the center.
void gcr_apply(const GcrParams& params, const PointBatch& pts, PointBatch& out,
               std::span<double> dist_out);

// Scalar reference kernels, always built. Equivalence tests compare the
// dispatching entry points under set_isa() against these.
namespace scalar {
void koranyi_norm(const PointBatch& pts, std::span<double> out);
void left_translate(const HPoint& center, PointBatch& pts);
/// Returns the index of the first singular point, or count when none.
std::size_t gcr_apply(const GcrParams& params, const PointBatch& pts, PointBatch& out,
                      std::span<double> dist_out);
}  // namespace scalar

}  // namespace heiscr::kernels
