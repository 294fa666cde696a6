#include <cfloat>
#include <cmath>

#include "heiscr/kernels.hpp"
#include "kernels_impl.hpp"

namespace heiscr::kernels {

namespace detail {

void koranyi_norm_range(const PointBatch& pts, double* out, std::size_t begin, std::size_t end) {
  for (std::size_t i = begin; i < end; ++i) {
    double s = 0.0;
    for (int j = 0; j < pts.n; ++j) {
      const double a = pts.re_row(j)[i];
      const double b = pts.im_row(j)[i];
      s += a * a + b * b;
    }
    const double t = pts.t[i];
    out[i] = std::sqrt(std::sqrt(s * s + t * t));
  }
}

void left_translate_range(const HPoint& center, PointBatch& pts, std::size_t begin,
                          std::size_t end) {
  for (std::size_t i = begin; i < end; ++i) {
    double cross = 0.0;
    for (int j = 0; j < pts.n; ++j) {
      const Complex c = center.z(j);
      double& pr = pts.re_row(j)[i];
      double& pi = pts.im_row(j)[i];
      cross += c.imag() * pr - c.real() * pi;
      pr = c.real() + pr;
      pi = c.imag() + pi;
    }
    pts.t[i] = center.t() + pts.t[i] + 2.0 * cross;
  }
}

std::size_t gcr_apply_range(const GcrParams& g, const PointBatch& pts, PointBatch& out,
                            double* dist_out, std::size_t begin, std::size_t end) {
  const int n = pts.n;
  const double l2 = g.radius * g.radius;
  for (std::size_t i = begin; i < end; ++i) {
    // p = center^{-1} * zeta
    double cross = 0.0;
    double s = 0.0;
    for (int j = 0; j < n; ++j) {
      const double zr = pts.re_row(j)[i];
      const double zi = pts.im_row(j)[i];
      const double cr = g.center_re[static_cast<std::size_t>(j)];
      const double ci = g.center_im[static_cast<std::size_t>(j)];
      cross += cr * zi - ci * zr;
      const double pr = zr - cr;
      const double pi = zi - ci;
      s += pr * pr + pi * pi;
    }
    const double pt = pts.t[i] - g.center_t + 2.0 * cross;
    dist_out[i] = std::sqrt(std::sqrt(s * s + pt * pt));

    // iota then CR inversion: w = -pt + i|p_z|^2
    const double wr = -pt;
    const double wi = s;
    const double w2 = wr * wr + wi * wi;
    if (!(w2 >= DBL_MIN)) return i;
    const double scale = l2 / w2;
    const double qt = (pt * scale) * l2;

    double cross2 = 0.0;
    for (int j = 0; j < n; ++j) {
      const double a = pts.re_row(j)[i] - g.center_re[static_cast<std::size_t>(j)];
      const double b = g.center_im[static_cast<std::size_t>(j)] - pts.im_row(j)[i];
      const double qr = (a * wr + b * wi) * scale;
      const double qi = (b * wr - a * wi) * scale;
      const double c = g.phase_cos[static_cast<std::size_t>(j)];
      const double sn = g.phase_sin[static_cast<std::size_t>(j)];
      const double rr = qr * c - qi * sn;
      const double ri = qr * sn + qi * c;
      const double cr = g.center_re[static_cast<std::size_t>(j)];
      const double ci = g.center_im[static_cast<std::size_t>(j)];
      cross2 += ci * rr - cr * ri;
      out.re_row(j)[i] = cr + rr;
      out.im_row(j)[i] = ci + ri;
    }
    out.t[i] = g.center_t + qt + 2.0 * cross2;
  }
  return end;
}

}  // namespace detail

namespace scalar {

void koranyi_norm(const PointBatch& pts, std::span<double> out) {
  detail::koranyi_norm_range(pts, out.data(), 0, pts.count);
}

void left_translate(const HPoint& center, PointBatch& pts) {
  detail::left_translate_range(center, pts, 0, pts.count);
}

std::size_t gcr_apply(const GcrParams& params, const PointBatch& pts, PointBatch& out,
                      std::span<double> dist_out) {
  return detail::gcr_apply_range(params, pts, out, dist_out.data(), 0, pts.count);
}

}  // namespace scalar

}  // namespace heiscr::kernels
