#include <immintrin.h>

#include <cassert>

#include "tsd/simd/kernels.hpp"

namespace tsd::simd::avx2 {

namespace {
#include "iou_scalar.inl"
}  // namespace

// Lane-wise transcription of iou_reference. _mm256_min_pd/_mm256_max_pd
// return the second operand on ties, matching the ternaries above.
void iou_matrix(std::span<const BBox> rows, const BoxColumns& cols, std::span<double> out) {
  const std::size_t m = cols.size();
  assert(out.size() >= rows.size() * m);
  const __m256d zero = _mm256_setzero_pd();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const BBox& a = rows[i];
    const __m256d l1 = _mm256_set1_pd(a.left);
    const __m256d t1 = _mm256_set1_pd(a.top);
    const __m256d r1 = _mm256_set1_pd(a.right);
    const __m256d b1 = _mm256_set1_pd(a.bottom);
    const __m256d a1 = _mm256_mul_pd(_mm256_sub_pd(r1, l1), _mm256_sub_pd(b1, t1));
    double* dst = out.data() + i * m;
    std::size_t j = 0;
    for (; j + 4 <= m; j += 4) {
      const __m256d l2 = _mm256_loadu_pd(cols.left.data() + j);
      const __m256d t2 = _mm256_loadu_pd(cols.top.data() + j);
      const __m256d r2 = _mm256_loadu_pd(cols.right.data() + j);
      const __m256d b2 = _mm256_loadu_pd(cols.bottom.data() + j);
      const __m256d a2 = _mm256_mul_pd(_mm256_sub_pd(r2, l2), _mm256_sub_pd(b2, t2));
      __m256d iw = _mm256_sub_pd(_mm256_min_pd(r1, r2), _mm256_max_pd(l1, l2));
      iw = _mm256_max_pd(iw, zero);
      __m256d ih = _mm256_sub_pd(_mm256_min_pd(b1, b2), _mm256_max_pd(t1, t2));
      ih = _mm256_max_pd(ih, zero);
      const __m256d inter = _mm256_mul_pd(iw, ih);
      const __m256d uni = _mm256_sub_pd(_mm256_add_pd(a1, a2), inter);
      const __m256d ok = _mm256_and_pd(
          _mm256_and_pd(_mm256_cmp_pd(a1, zero, _CMP_GT_OQ), _mm256_cmp_pd(a2, zero, _CMP_GT_OQ)),
          _mm256_cmp_pd(uni, zero, _CMP_GT_OQ));
      const __m256d iou = _mm256_div_pd(inter, uni);
      _mm256_storeu_pd(dst + j, _mm256_and_pd(iou, ok));
    }
    for (; j < m; ++j) {
      dst[j] = iou_reference(a.left, a.top, a.right, a.bottom, cols.left[j], cols.top[j],
                             cols.right[j], cols.bottom[j]);
    }
  }
}

void ratio_scale(double numerator, std::span<const double> real_heights,
                 std::span<const double> pixel_heights, std::span<double> out) {
  assert(real_heights.size() == pixel_heights.size() && out.size() >= pixel_heights.size());
  const std::size_t n = pixel_heights.size();
  const __m256d num = _mm256_set1_pd(numerator);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d h = _mm256_loadu_pd(real_heights.data() + i);
    const __m256d px = _mm256_loadu_pd(pixel_heights.data() + i);
    _mm256_storeu_pd(out.data() + i, _mm256_div_pd(_mm256_mul_pd(num, h), px));
  }
  for (; i < n; ++i) out[i] = (numerator * real_heights[i]) / pixel_heights[i];
}

double sum_squared_diff(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  const std::size_t n = a.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double total = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    total += d * d;
  }
  return total;
}

}  // namespace tsd::simd::avx2
