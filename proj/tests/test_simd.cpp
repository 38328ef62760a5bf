// SPDX-License-Identifier: Apache-2.0
// Every compiled-in SIMD variant against the scalar reference kernels.
#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "polarbench/error.hpp"
#include "polarbench/simd/kernels.hpp"

using namespace polarbench::simd;

namespace {

struct Buffers {
  explicit Buffers(std::size_t n, std::uint64_t seed) : a(n), b(n), c(n), d(n), e(n), mask(n) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
      c[i] = u(rng);
      d[i] = u(rng);
      e[i] = u(rng);
      mask[i] = rng() & 1;
    }
    // Edge values: zero radiance, tiny radiance, exact unpolarized.
    if (n > 3) {
      a[0] = 0.0;
      a[1] = 1e-9;
      b[2] = c[2] = 0.5 * a[2];
    }
  }
  std::vector<double> a, b, c, d, e;
  std::vector<std::uint8_t> mask;
};

class SimdEquivalence : public ::testing::TestWithParam<Isa> {};

const std::size_t kSizes[] = {0, 1, 3, 4, 5, 7, 8, 17, 64, 1001};

}  // namespace

TEST(SimdDispatch, ScalarAlwaysSupported) {
  const auto isas = supported_isas();
  ASSERT_FALSE(isas.empty());
  EXPECT_EQ(isas.front(), Isa::scalar);
  EXPECT_EQ(kernels_for(Isa::scalar).isa, Isa::scalar);
  EXPECT_TRUE(isa_supported(active().isa));
}

TEST(SimdDispatch, UnsupportedVariantThrows) {
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (!isa_supported(isa)) {
      EXPECT_THROW(kernels_for(isa), polarbench::ConfigError);
    }
  }
}

TEST_P(SimdEquivalence, ElementwiseKernelsBitIdentical) {
  const Kernels& ref = kernels_for(Isa::scalar);
  const Kernels& k = kernels_for(GetParam());
  for (std::size_t n : kSizes) {
    Buffers in(n, 100 + n);
    std::vector<double> r0(n), r1(n), r2(n), t0(n), t1(n), t2(n);

    ref.stokes_triple(in.a.data(), in.b.data(), in.c.data(), r0.data(), r1.data(), r2.data(), n);
    k.stokes_triple(in.a.data(), in.b.data(), in.c.data(), t0.data(), t1.data(), t2.data(), n);
    EXPECT_EQ(r0, t0);
    EXPECT_EQ(r1, t1);
    EXPECT_EQ(r2, t2);

    ref.stokes_four(in.a.data(), in.b.data(), in.c.data(), in.d.data(), r0.data(), r1.data(), r2.data(), n);
    k.stokes_four(in.a.data(), in.b.data(), in.c.data(), in.d.data(), t0.data(), t1.data(), t2.data(), n);
    EXPECT_EQ(r0, t0);
    EXPECT_EQ(r1, t1);
    EXPECT_EQ(r2, t2);

    for (auto [cc, ss] : {std::pair{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.5, -0.8660254037844386}}) {
      ref.synthesize(in.a.data(), in.b.data(), in.c.data(), cc, ss, r0.data(), n);
      k.synthesize(in.a.data(), in.b.data(), in.c.data(), cc, ss, t0.data(), n);
      EXPECT_EQ(r0, t0);
    }

    std::vector<std::uint8_t> rv(n), tv(n);
    ref.dop_ratio(in.a.data(), in.b.data(), in.c.data(), 1e-6, r0.data(), rv.data(), n);
    k.dop_ratio(in.a.data(), in.b.data(), in.c.data(), 1e-6, t0.data(), tv.data(), n);
    EXPECT_EQ(r0, t0);
    EXPECT_EQ(rv, tv);

    ref.identity_residual(in.a.data(), in.b.data(), in.c.data(), in.d.data(), in.e.data(), r0.data(), n);
    k.identity_residual(in.a.data(), in.b.data(), in.c.data(), in.d.data(), in.e.data(), t0.data(), n);
    EXPECT_EQ(r0, t0);
  }
}

TEST_P(SimdEquivalence, ReductionsAgreeToRounding) {
  const Kernels& ref = kernels_for(Isa::scalar);
  const Kernels& k = kernels_for(GetParam());
  for (std::size_t n : kSizes) {
    Buffers in(n, 7 + n);
    const double tol = 1e-13 * (1.0 + static_cast<double>(n));
    EXPECT_NEAR(ref.sum_sq_diff(in.a.data(), in.b.data(), nullptr, n), k.sum_sq_diff(in.a.data(), in.b.data(), nullptr, n), tol);
    EXPECT_NEAR(ref.sum_sq_diff(in.a.data(), in.b.data(), in.mask.data(), n),
                k.sum_sq_diff(in.a.data(), in.b.data(), in.mask.data(), n), tol);
    EXPECT_NEAR(ref.sum_abs_diff(in.a.data(), in.b.data(), n), k.sum_abs_diff(in.a.data(), in.b.data(), n), tol);
    EXPECT_NEAR(ref.sum_weighted_abs_diff(in.a.data(), in.b.data(), in.c.data(), n),
                k.sum_weighted_abs_diff(in.a.data(), in.b.data(), in.c.data(), n), tol);
  }
}

TEST(SimdScalar, ReferenceSemantics) {
  const Kernels& k = kernels_for(Isa::scalar);
  const double s0[] = {0.0, 1.0, 2.0}, s1[] = {0.0, 0.6, -2.0}, s2[] = {0.0, 0.8, 0.0};
  double ratio[3];
  std::uint8_t valid[3];
  k.dop_ratio(s0, s1, s2, 1e-6, ratio, valid, 3);
  EXPECT_EQ(valid[0], 0);
  EXPECT_EQ(ratio[0], 0.0);
  EXPECT_EQ(valid[1], 1);
  EXPECT_DOUBLE_EQ(ratio[1], 1.0);
  EXPECT_DOUBLE_EQ(ratio[2], 1.0);
  const double p1[] = {1.0, 1.0, 0.0};
  const double p2[] = {0.0, 0.0, 0.0};
  double out[3];
  k.synthesize(s0, p1, p2, -1.0, 0.0, out, 3);  // crossed polarizer
  EXPECT_EQ(out[1], 0.0);
}

INSTANTIATE_TEST_SUITE_P(AllVariants, SimdEquivalence, ::testing::ValuesIn(supported_isas()),
                         [](const auto& info) { return std::string(isa_name(info.param)); });
