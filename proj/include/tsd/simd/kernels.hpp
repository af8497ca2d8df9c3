#pragma once

// Data-parallel inner loops shared by association, evaluation and range
// estimation. Each kernel has a scalar reference implementation and, where
// the target supports it, an AVX2 variant; the variant is picked once at
// startup from CPUID and can be pinned with TSD_SIMD=scalar|avx2.
//
// Elementwise kernels are bit-identical across variants. Reductions
// (sum_squared_diff) reassociate the sum and agree to rounding only.

#include <cstddef>
#include <span>
#include <string_view>

#include "tsd/common.hpp"

namespace tsd::simd {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

/// Best ISA this CPU and build support.
Isa detect_isa();
/// ISA used by the dispatching entry points below.
Isa active_isa();
/// Pins the dispatch target. Throws ConfigError when `isa` is unavailable.
void set_active_isa(Isa isa);
bool isa_available(Isa isa);

/// Boxes in structure-of-arrays layout, the form the vector kernels consume.
struct BoxColumns {
  std::vector<double> left, top, right, bottom;

  BoxColumns() = default;
  explicit BoxColumns(std::span<const BBox> boxes);
  std::size_t size() const noexcept { return left.size(); }
};

/// out[i * cols.size() + j] = IoU(rows[i], cols[j]). Zero-area boxes give 0.
void iou_matrix(std::span<const BBox> rows, const BoxColumns& cols, std::span<double> out);

/// out[i] = numerator * real_heights[i] / pixel_heights[i].
void ratio_scale(double numerator, std::span<const double> real_heights,
                 std::span<const double> pixel_heights, std::span<double> out);

/// Sum over i of (a[i] - b[i])^2.
double sum_squared_diff(std::span<const double> a, std::span<const double> b);

// Fixed-variant entry points, used by the equivalence tests.
namespace scalar {
void iou_matrix(std::span<const BBox> rows, const BoxColumns& cols, std::span<double> out);
void ratio_scale(double numerator, std::span<const double> real_heights,
                 std::span<const double> pixel_heights, std::span<double> out);
double sum_squared_diff(std::span<const double> a, std::span<const double> b);
}  // namespace scalar

namespace avx2 {
void iou_matrix(std::span<const BBox> rows, const BoxColumns& cols, std::span<double> out);
void ratio_scale(double numerator, std::span<const double> real_heights,
                 std::span<const double> pixel_heights, std::span<double> out);
double sum_squared_diff(std::span<const double> a, std::span<const double> b);
}  // namespace avx2

}  // namespace tsd::simd
