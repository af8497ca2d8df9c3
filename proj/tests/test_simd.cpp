#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "oracles.hpp"
#include "tsd/simd/kernels.hpp"

using namespace tsd;

namespace {

std::vector<BBox> random_boxes(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> pos(0.0, 200.0), size(0.0, 80.0);
  std::vector<BBox> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double l = pos(rng), t = pos(rng);
    // Some zero-width / zero-height boxes and exact duplicates on purpose.
    const double w = i % 11 == 3 ? 0.0 : size(rng), h = i % 13 == 5 ? 0.0 : size(rng);
    out.push_back({l, t, l + w, t + h});
    if (i % 9 == 0 && !out.empty()) out.back() = out.front();
  }
  return out;
}

bool bits_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

class KernelEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!simd::isa_available(simd::Isa::Avx2)) GTEST_SKIP() << "AVX2 not available on this host";
  }
};

TEST_F(KernelEquivalence, IouMatrixBitIdentical) {
  std::mt19937_64 rng(1);
  for (std::size_t rows : {0u, 1u, 3u, 7u}) {
    for (std::size_t cols : {0u, 1u, 2u, 3u, 4u, 5u, 8u, 13u, 64u}) {
      const auto r = random_boxes(rng, rows), c = random_boxes(rng, cols);
      const simd::BoxColumns cc(c);
      std::vector<double> a(rows * cols, -1), b(rows * cols, -2);
      simd::scalar::iou_matrix(r, cc, a);
      simd::avx2::iou_matrix(r, cc, b);
      for (std::size_t k = 0; k < a.size(); ++k) EXPECT_TRUE(bits_equal(a[k], b[k])) << k;
    }
  }
}

TEST_F(KernelEquivalence, RatioScaleBitIdentical) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.5, 500.0);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 1000u}) {
    std::vector<double> real(n), px(n), a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) real[i] = u(rng), px[i] = u(rng);
    simd::scalar::ratio_scale(748.9, real, px, a);
    simd::avx2::ratio_scale(748.9, real, px, b);
    for (std::size_t i = 0; i < n; ++i) EXPECT_TRUE(bits_equal(a[i], b[i]));
  }
}

TEST_F(KernelEquivalence, SumSquaredDiffAgreesToRounding) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 10.0);
  for (std::size_t n : {0u, 1u, 2u, 5u, 31u, 4096u}) {
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = g(rng), y[i] = g(rng);
    const double a = simd::scalar::sum_squared_diff(x, y), b = simd::avx2::sum_squared_diff(x, y);
    EXPECT_NEAR(a, b, 1e-13 * std::max(1.0, a));
  }
}

TEST(Kernels, IouMatchesDefinition) {
  std::mt19937_64 rng(4);
  const auto r = random_boxes(rng, 9), c = random_boxes(rng, 11);
  std::vector<double> out(r.size() * c.size());
  simd::iou_matrix(r, simd::BoxColumns(c), out);
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = 0; j < c.size(); ++j)
      EXPECT_NEAR(out[i * c.size() + j], oracle::iou(r[i], c[j]), 1e-15);
}

TEST(Kernels, IouWorkedValues) {
  const std::vector<BBox> a{{0, 0, 2, 2}};
  const std::vector<BBox> b{{0, 0, 2, 2}, {5, 5, 6, 6}, {1, 0, 3, 2}};
  std::vector<double> out(3);
  simd::iou_matrix(a, simd::BoxColumns(b), out);
  EXPECT_EQ(out[0], 1.0);
  EXPECT_EQ(out[1], 0.0);
  EXPECT_NEAR(out[2], 2.0 / 6.0, 1e-15);
}

TEST(Kernels, DispatchCanBePinned) {
  const simd::Isa before = simd::active_isa();
  simd::set_active_isa(simd::Isa::Scalar);
  EXPECT_EQ(simd::active_isa(), simd::Isa::Scalar);
  if (!simd::isa_available(simd::Isa::Avx2)) {
    EXPECT_THROW(simd::set_active_isa(simd::Isa::Avx2), ConfigError);
  }
  simd::set_active_isa(before);
}
