#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "semm/bloch.hpp"
#include "semm/error.hpp"
#include "semm/simd/kernels.hpp"

using namespace semm;

namespace {

struct Batch {
  std::vector<double> u, v, w, det, stark, weight;
};

// Odd size exercises the scalar tail of the vector kernels.
Batch random_batch(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Batch b;
  for (std::size_t i = 0; i < n; ++i) {
    double x = normal(rng), y = normal(rng), z = normal(rng);
    const double r = std::sqrt(x * x + y * y + z * z);
    b.u.push_back(x / r);
    b.v.push_back(y / r);
    b.w.push_back(z / r);
    b.det.push_back(5e4 * normal(rng));
    b.stark.push_back(0.43 + 0.05 * normal(rng));
    b.weight.push_back(unit(rng) / static_cast<double>(n));
  }
  return b;
}

std::vector<SimdLevel> vector_levels() {
  std::vector<SimdLevel> out;
  if (simd_available(SimdLevel::Avx2)) out.push_back(SimdLevel::Avx2);
  return out;
}

}  // namespace

TEST(kernels, scalar_always_available) {
  EXPECT_TRUE(simd_available(SimdLevel::Scalar));
  EXPECT_EQ(kernel_table(SimdLevel::Scalar).name, "scalar");
  EXPECT_EQ(to_string(SimdLevel::Avx2), "avx2");
  if (!simd_available(SimdLevel::Avx2)) EXPECT_THROW(kernel_table(SimdLevel::Avx2), UnsupportedOperation);
}

TEST(kernels, set_active_level) {
  const SimdLevel before = active_simd_level();
  set_active_simd_level(SimdLevel::Scalar);
  EXPECT_EQ(active_kernels().name, "scalar");
  set_active_simd_level(before);
  EXPECT_EQ(active_simd_level(), before);
}

TEST(kernels, scalar_precess_matches_complex_exponential) {
  const Batch b = random_batch(101, 1);
  Batch s = b;
  const double dt = 3.7e-4;
  const double ft = 0.91;
  kernel_table(SimdLevel::Scalar)
      .precess(s.u.data(), s.v.data(), b.det.data(), b.stark.data(), b.u.size(), dt, ft, 0.8);
  for (std::size_t i = 0; i < b.u.size(); ++i) {
    const double phase = 2.0 * std::numbers::pi * (b.det[i] * dt + b.stark[i] * ft);
    const std::complex<double> z = std::complex<double>(b.u[i], b.v[i]) * std::polar(0.8, phase);
    EXPECT_NEAR(s.u[i], z.real(), 1e-9);
    EXPECT_NEAR(s.v[i], z.imag(), 1e-9);
  }
}

TEST(kernels, vector_levels_match_scalar) {
  const auto& ref = kernel_table(SimdLevel::Scalar);
  for (SimdLevel level : vector_levels()) {
    const auto& k = kernel_table(level);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 63u, 1001u}) {
      const Batch b = random_batch(n, 42 + n);
      Batch x = b;
      Batch y = b;
      const double dt = 1.234e-3;
      const double ft = -2.75;
      ref.precess(x.u.data(), x.v.data(), b.det.data(), b.stark.data(), n, dt, ft, 0.97);
      k.precess(y.u.data(), y.v.data(), b.det.data(), b.stark.data(), n, dt, ft, 0.97);
      for (std::size_t i = 0; i < n; ++i) {
        EXPECT_NEAR(x.u[i], y.u[i], 1e-12);
        EXPECT_NEAR(x.v[i], y.v[i], 1e-12);
      }
      const auto sa = ref.sample(b.u.data(), b.v.data(), b.weight.data(), b.det.data(), b.stark.data(), n, dt, ft);
      const auto sb = k.sample(b.u.data(), b.v.data(), b.weight.data(), b.det.data(), b.stark.data(), n, dt, ft);
      EXPECT_NEAR(std::abs(sa - sb), 0.0, 1e-12);

      const double m[9] = {0.1, -0.7, 0.3, 0.5, 0.2, -0.9, 0.4, 0.6, 0.8};
      ref.rotate_fixed(x.u.data(), x.v.data(), x.w.data(), n, m);
      k.rotate_fixed(y.u.data(), y.v.data(), y.w.data(), n, m);
      ref.rotate_detuned(x.u.data(), x.v.data(), x.w.data(), b.det.data(), n, 2.1e4, 0.3, 2.4e-5);
      k.rotate_detuned(y.u.data(), y.v.data(), y.w.data(), b.det.data(), n, 2.1e4, 0.3, 2.4e-5);
      ref.relax_population(x.w.data(), n, 0.6);
      k.relax_population(y.w.data(), n, 0.6);
      for (std::size_t i = 0; i < n; ++i) {
        EXPECT_NEAR(x.u[i], y.u[i], 1e-12);
        EXPECT_NEAR(x.v[i], y.v[i], 1e-12);
        EXPECT_NEAR(x.w[i], y.w[i], 1e-12);
      }
      EXPECT_NEAR(std::abs(ref.coherence_sum(x.u.data(), x.v.data(), b.weight.data(), n) -
                           k.coherence_sum(x.u.data(), x.v.data(), b.weight.data(), n)),
                  0.0, 1e-14);
      EXPECT_NEAR(ref.population_sum(x.w.data(), b.weight.data(), n),
                  k.population_sum(x.w.data(), b.weight.data(), n), 1e-14);
    }
  }
}

TEST(kernels, vector_sincos_over_wide_range) {
  // Phase accuracy across many turns: detuning 1 Hz, dt = turns.
  for (SimdLevel level : vector_levels()) {
    const auto& k = kernel_table(level);
    const std::size_t n = 4096;
    std::vector<double> u(n, 1.0), v(n, 0.0), det(n, 1.0), stark(n, 0.0);
    for (double turns : {0.0, 0.125, 0.25, 0.3, 0.5, 0.75, 0.999999, 17.3, -123.456, 1e6 + 0.2}) {
      std::fill(u.begin(), u.end(), 1.0);
      std::fill(v.begin(), v.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) det[i] = 1.0 + static_cast<double>(i) * 1e-7;
      k.precess(u.data(), v.data(), det.data(), stark.data(), n, turns, 0.0, 1.0);
      for (std::size_t i = 0; i < n; i += 97) {
        double s;
        double c;
        bloch::sincos_turns(det[i] * turns, s, c);
        EXPECT_NEAR(u[i], c, 2e-15 + 1e-15 * std::abs(turns)) << turns;
        EXPECT_NEAR(v[i], s, 2e-15 + 1e-15 * std::abs(turns)) << turns;
      }
    }
  }
}

TEST(kernels, reductions_are_deterministic) {
  const Batch b = random_batch(12345, 3);
  for (SimdLevel level : {SimdLevel::Scalar, SimdLevel::Avx2}) {
    if (!simd_available(level)) continue;
    const auto& k = kernel_table(level);
    const auto a = k.coherence_sum(b.u.data(), b.v.data(), b.weight.data(), b.u.size());
    const auto c = k.coherence_sum(b.u.data(), b.v.data(), b.weight.data(), b.u.size());
    EXPECT_EQ(a, c);
  }
}
