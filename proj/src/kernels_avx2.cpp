#include <immintrin.h>

#include <cfloat>

#include "heiscr/kernels.hpp"
#include "kernels_impl.hpp"

namespace heiscr::kernels::avx2 {

namespace {

constexpr std::size_t kLanes = 4;

inline __m256d sq_sum(__m256d a, __m256d b) {
  return _mm256_add_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
}

}  // namespace

void koranyi_norm(const PointBatch& pts, std::span<double> out) {
  const std::size_t body = pts.count - pts.count % kLanes;
  for (std::size_t i = 0; i < body; i += kLanes) {
    __m256d s = _mm256_setzero_pd();
    for (int j = 0; j < pts.n; ++j) {
      const __m256d a = _mm256_loadu_pd(pts.re_row(j) + i);
      const __m256d b = _mm256_loadu_pd(pts.im_row(j) + i);
      s = _mm256_add_pd(s, sq_sum(a, b));
    }
    const __m256d t = _mm256_loadu_pd(pts.t.data() + i);
    const __m256d q = sq_sum(s, t);
    _mm256_storeu_pd(out.data() + i, _mm256_sqrt_pd(_mm256_sqrt_pd(q)));
  }
  detail::koranyi_norm_range(pts, out.data(), body, pts.count);
}

void left_translate(const HPoint& center, PointBatch& pts) {
  const std::size_t body = pts.count - pts.count % kLanes;
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d ct = _mm256_set1_pd(center.t());
  for (std::size_t i = 0; i < body; i += kLanes) {
    __m256d cross = _mm256_setzero_pd();
    for (int j = 0; j < pts.n; ++j) {
      const __m256d cr = _mm256_set1_pd(center.z(j).real());
      const __m256d ci = _mm256_set1_pd(center.z(j).imag());
      const __m256d pr = _mm256_loadu_pd(pts.re_row(j) + i);
      const __m256d pi = _mm256_loadu_pd(pts.im_row(j) + i);
      cross = _mm256_add_pd(cross, _mm256_sub_pd(_mm256_mul_pd(ci, pr), _mm256_mul_pd(cr, pi)));
      _mm256_storeu_pd(pts.re_row(j) + i, _mm256_add_pd(cr, pr));
      _mm256_storeu_pd(pts.im_row(j) + i, _mm256_add_pd(ci, pi));
    }
    const __m256d t = _mm256_loadu_pd(pts.t.data() + i);
    _mm256_storeu_pd(pts.t.data() + i,
                     _mm256_add_pd(_mm256_add_pd(ct, t), _mm256_mul_pd(two, cross)));
  }
  detail::left_translate_range(center, pts, body, pts.count);
}

std::size_t gcr_apply(const GcrParams& g, const PointBatch& pts, PointBatch& out,
                      std::span<double> dist_out) {
  const int n = pts.n;
  const std::size_t body = pts.count - pts.count % kLanes;
  const double l2s = g.radius * g.radius;
  const __m256d l2 = _mm256_set1_pd(l2s);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d ct = _mm256_set1_pd(g.center_t);
  const __m256d dbl_min = _mm256_set1_pd(DBL_MIN);
  const __m256d neg_zero = _mm256_set1_pd(-0.0);

  for (std::size_t i = 0; i < body; i += kLanes) {
    __m256d cross = _mm256_setzero_pd();
    __m256d s = _mm256_setzero_pd();
    for (int j = 0; j < n; ++j) {
      const __m256d zr = _mm256_loadu_pd(pts.re_row(j) + i);
      const __m256d zi = _mm256_loadu_pd(pts.im_row(j) + i);
      const __m256d cr = _mm256_set1_pd(g.center_re[static_cast<std::size_t>(j)]);
      const __m256d ci = _mm256_set1_pd(g.center_im[static_cast<std::size_t>(j)]);
      cross = _mm256_add_pd(cross, _mm256_sub_pd(_mm256_mul_pd(cr, zi), _mm256_mul_pd(ci, zr)));
      s = _mm256_add_pd(s, sq_sum(_mm256_sub_pd(zr, cr), _mm256_sub_pd(zi, ci)));
    }
    const __m256d t = _mm256_loadu_pd(pts.t.data() + i);
    const __m256d pt = _mm256_add_pd(_mm256_sub_pd(t, ct), _mm256_mul_pd(two, cross));
    _mm256_storeu_pd(dist_out.data() + i, _mm256_sqrt_pd(_mm256_sqrt_pd(sq_sum(s, pt))));

    const __m256d wr = _mm256_xor_pd(pt, neg_zero);
    const __m256d wi = s;
    const __m256d w2 = sq_sum(wr, wi);
    const int ok = _mm256_movemask_pd(_mm256_cmp_pd(w2, dbl_min, _CMP_GE_OQ));
    if (ok != 0xF) {
      // Let the scalar path locate the singular lane and fill the lanes before it.
      return detail::gcr_apply_range(g, pts, out, dist_out.data(), i, pts.count);
    }
    const __m256d scale = _mm256_div_pd(l2, w2);
    const __m256d qt = _mm256_mul_pd(_mm256_mul_pd(pt, scale), l2);

    __m256d cross2 = _mm256_setzero_pd();
    for (int j = 0; j < n; ++j) {
      const __m256d cr = _mm256_set1_pd(g.center_re[static_cast<std::size_t>(j)]);
      const __m256d ci = _mm256_set1_pd(g.center_im[static_cast<std::size_t>(j)]);
      const __m256d a = _mm256_sub_pd(_mm256_loadu_pd(pts.re_row(j) + i), cr);
      const __m256d b = _mm256_sub_pd(ci, _mm256_loadu_pd(pts.im_row(j) + i));
      const __m256d qr =
          _mm256_mul_pd(_mm256_add_pd(_mm256_mul_pd(a, wr), _mm256_mul_pd(b, wi)), scale);
      const __m256d qi =
          _mm256_mul_pd(_mm256_sub_pd(_mm256_mul_pd(b, wr), _mm256_mul_pd(a, wi)), scale);
      const __m256d c = _mm256_set1_pd(g.phase_cos[static_cast<std::size_t>(j)]);
      const __m256d sn = _mm256_set1_pd(g.phase_sin[static_cast<std::size_t>(j)]);
      const __m256d rr = _mm256_sub_pd(_mm256_mul_pd(qr, c), _mm256_mul_pd(qi, sn));
      const __m256d ri = _mm256_add_pd(_mm256_mul_pd(qr, sn), _mm256_mul_pd(qi, c));
      cross2 = _mm256_add_pd(cross2, _mm256_sub_pd(_mm256_mul_pd(ci, rr), _mm256_mul_pd(cr, ri)));
      _mm256_storeu_pd(out.re_row(j) + i, _mm256_add_pd(cr, rr));
      _mm256_storeu_pd(out.im_row(j) + i, _mm256_add_pd(ci, ri));
    }
    _mm256_storeu_pd(out.t.data() + i,
                     _mm256_add_pd(_mm256_add_pd(ct, qt), _mm256_mul_pd(two, cross2)));
  }
  return detail::gcr_apply_range(g, pts, out, dist_out.data(), body, pts.count);
}

}  // namespace heiscr::kernels::avx2
