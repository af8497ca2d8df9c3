#include <cassert>

#include "tsd/simd/kernels.hpp"

namespace tsd::simd::scalar {

#include "iou_scalar.inl"

void iou_matrix(std::span<const BBox> rows, const BoxColumns& cols, std::span<double> out) {
  const std::size_t m = cols.size();
  assert(out.size() >= rows.size() * m);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const BBox& a = rows[i];
    double* dst = out.data() + i * m;
    for (std::size_t j = 0; j < m; ++j) {
      dst[j] = iou_reference(a.left, a.top, a.right, a.bottom, cols.left[j], cols.top[j],
                             cols.right[j], cols.bottom[j]);
    }
  }
}

void ratio_scale(double numerator, std::span<const double> real_heights,
                 std::span<const double> pixel_heights, std::span<double> out) {
  assert(real_heights.size() == pixel_heights.size() && out.size() >= pixel_heights.size());
  for (std::size_t i = 0; i < pixel_heights.size(); ++i)
    out[i] = (numerator * real_heights[i]) / pixel_heights[i];
}

double sum_squared_diff(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace tsd::simd::scalar
