#include <atomic>
#include <cstdlib>
#include <string>

#include "tsd/simd/kernels.hpp"

namespace tsd::simd {

#ifndef TSD_HAVE_AVX2
// Stubs so the fixed-variant entry points link on targets without AVX2;
// isa_available(Isa::Avx2) is false there and dispatch never reaches them.
namespace avx2 {
void iou_matrix(std::span<const BBox> rows, const BoxColumns& cols, std::span<double> out) {
  scalar::iou_matrix(rows, cols, out);
}
void ratio_scale(double numerator, std::span<const double> real_heights,
                 std::span<const double> pixel_heights, std::span<double> out) {
  scalar::ratio_scale(numerator, real_heights, pixel_heights, out);
}
double sum_squared_diff(std::span<const double> a, std::span<const double> b) {
  return scalar::sum_squared_diff(a, b);
}
}  // namespace avx2
#endif

std::string_view to_string(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(TSD_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa detect_isa() { return isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar; }

namespace {

Isa initial_isa() {
  if (const char* env = std::getenv("TSD_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Isa::Scalar;
    if (v == "avx2" && isa_available(Isa::Avx2)) return Isa::Avx2;
  }
  return detect_isa();
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_available(isa))
    throw ConfigError("SIMD variant '" + std::string(to_string(isa)) + "' is not available");
  active().store(isa, std::memory_order_relaxed);
}

BoxColumns::BoxColumns(std::span<const BBox> boxes) {
  left.reserve(boxes.size());
  top.reserve(boxes.size());
  right.reserve(boxes.size());
  bottom.reserve(boxes.size());
  for (const BBox& b : boxes) {
    left.push_back(b.left);
    top.push_back(b.top);
    right.push_back(b.right);
    bottom.push_back(b.bottom);
  }
}

void iou_matrix(std::span<const BBox> rows, const BoxColumns& cols, std::span<double> out) {
  if (active_isa() == Isa::Avx2) return avx2::iou_matrix(rows, cols, out);
  scalar::iou_matrix(rows, cols, out);
}

void ratio_scale(double numerator, std::span<const double> real_heights,
                 std::span<const double> pixel_heights, std::span<double> out) {
  if (active_isa() == Isa::Avx2) return avx2::ratio_scale(numerator, real_heights, pixel_heights, out);
  scalar::ratio_scale(numerator, real_heights, pixel_heights, out);
}

double sum_squared_diff(std::span<const double> a, std::span<const double> b) {
  if (active_isa() == Isa::Avx2) return avx2::sum_squared_diff(a, b);
  return scalar::sum_squared_diff(a, b);
}

}  // namespace tsd::simd
