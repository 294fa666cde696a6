#pragma once

// Range-based bodies shared between the scalar kernels and the scalar tails of
// the SIMD kernels. Internal to the library.

#include <cstddef>

#include "heiscr/kernels.hpp"

namespace heiscr::kernels::detail {

void koranyi_norm_range(const PointBatch& pts, double* out, std::size_t begin, std::size_t end);
void left_translate_range(const HPoint& center, PointBatch& pts, std::size_t begin,
                          std::size_t end);
std::size_t gcr_apply_range(const GcrParams& params, const PointBatch& pts, PointBatch& out,
                            double* dist_out, std::size_t begin, std::size_t end);

}  // namespace heiscr::kernels::detail

namespace heiscr::kernels::avx2 {

void koranyi_norm(const PointBatch& pts, std::span<double> out);
void left_translate(const HPoint& center, PointBatch& pts);
std::size_t gcr_apply(const GcrParams& params, const PointBatch& pts, PointBatch& out,
                      std::span<double> dist_out);

}  // namespace heiscr::kernels::avx2
