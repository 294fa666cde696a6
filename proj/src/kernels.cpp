#include "heiscr/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "heiscr/error.hpp"
#include "heiscr/rng.hpp"
#include "kernels_impl.hpp"

namespace heiscr::kernels {

PointBatch::PointBatch(int n_, std::size_t count_)
    : n(n_),
      count(count_),
      re(static_cast<std::size_t>(n_) * count_),
      im(static_cast<std::size_t>(n_) * count_),
      t(count_) {}

HPoint PointBatch::point(std::size_t i) const {
  std::vector<Complex> z(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) z[static_cast<std::size_t>(j)] = {re_row(j)[i], im_row(j)[i]};
  return HPoint(std::move(z), t[i]);
}

void PointBatch::set_point(std::size_t i, const HPoint& p) {
  if (p.dim() != n) throw ContractError("PointBatch::set_point: dimension mismatch");
  for (int j = 0; j < n; ++j) {
    re_row(j)[i] = p.z(j).real();
    im_row(j)[i] = p.z(j).imag();
  }
  t[i] = p.t();
}

PointBatch PointBatch::from_points(std::span<const HPoint> pts) {
  if (pts.empty()) return {};
  PointBatch b(pts.front().dim(), pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) b.set_point(i, pts[i]);
  return b;
}

std::vector<HPoint> PointBatch::to_points() const {
  std::vector<HPoint> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(point(i));
  return out;
}

namespace {

bool cpu_has_avx2() {
#if defined(HEISCR_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa initial_isa() {
  if (const char* env = std::getenv("HEISCR_KERNEL")) {
    const std::string v(env);
    if (v == "scalar") return Isa::scalar;
    if (v == "avx2" && cpu_has_avx2()) return Isa::avx2;
  }
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& isa_slot() {
  static std::atomic<Isa> slot{initial_isa()};
  return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) { return isa == Isa::scalar || cpu_has_avx2(); }

Isa active_isa() { return isa_slot().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw ContractError("kernels: ISA " + std::string(isa_name(isa)) + " is not available");
  }
  isa_slot().store(isa, std::memory_order_relaxed);
}

void koranyi_norm(const PointBatch& pts, std::span<double> out) {
  if (out.size() < pts.count) throw ContractError("koranyi_norm: output span too short");
#if defined(HEISCR_BUILD_AVX2)
  if (active_isa() == Isa::avx2) return avx2::koranyi_norm(pts, out);
#endif
  scalar::koranyi_norm(pts, out);
}

void left_translate(const HPoint& center, PointBatch& pts) {
  if (center.dim() != pts.n) throw ContractError("left_translate: dimension mismatch");
#if defined(HEISCR_BUILD_AVX2)
  if (active_isa() == Isa::avx2) return avx2::left_translate(center, pts);
#endif
  scalar::left_translate(center, pts);
}

void gcr_apply(const GcrParams& params, const PointBatch& pts, PointBatch& out,
               std::span<double> dist_out) {
  if (params.n != pts.n || out.n != pts.n || out.count != pts.count) {
    throw ContractError("gcr_apply: batch shape mismatch");
  }
  if (dist_out.size() < pts.count) throw ContractError("gcr_apply: distance span too short");
  std::size_t bad = pts.count;
#if defined(HEISCR_BUILD_AVX2)
  if (active_isa() == Isa::avx2) {
    bad = avx2::gcr_apply(params, pts, out, dist_out);
  } else {
    bad = scalar::gcr_apply(params, pts, out, dist_out);
  }
#else
  bad = scalar::gcr_apply(params, pts, out, dist_out);
#endif
  if (bad != pts.count) {
    throw SingularityError("gcr_apply: point " + std::to_string(bad) +
                           " coincides with the inversion center");
  }
}

PointBatch sample_ball_batch(const HPoint& center, double lambda, std::size_t k,
                             std::uint64_t seed) {
  if (!(lambda > 0.0)) throw DomainError("sample_ball: lambda must be positive");
  if (k == 0) throw ContractError("sample_ball: k must be at least 1");
  const int n = center.dim();
  CounterRng rng(seed);
  constexpr std::size_t kChunk = 256;
  PointBatch candidates(n, kChunk);
  std::vector<double> norms(kChunk);
  PointBatch accepted(n, k);
  std::size_t filled = 0;
  const double l2 = lambda * lambda;
  while (filled < k) {
    for (std::size_t i = 0; i < kChunk; ++i) {
      for (int j = 0; j < n; ++j) candidates.re_row(j)[i] = rng.uniform(-lambda, lambda);
      for (int j = 0; j < n; ++j) candidates.im_row(j)[i] = rng.uniform(-lambda, lambda);
      candidates.t[i] = rng.uniform(-l2, l2);
    }
    koranyi_norm(candidates, norms);
    for (std::size_t i = 0; i < kChunk && filled < k; ++i) {
      if (norms[i] < lambda) {
        for (int j = 0; j < n; ++j) {
          accepted.re_row(j)[filled] = candidates.re_row(j)[i];
          accepted.im_row(j)[filled] = candidates.im_row(j)[i];
        }
        accepted.t[filled] = candidates.t[i];
        ++filled;
      }
    }
  }
  left_translate(center, accepted);
  return accepted;
}

}  // namespace heiscr::kernels
