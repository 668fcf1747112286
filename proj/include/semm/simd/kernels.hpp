#pragma once

// Batched kernels over the structure-of-arrays ensemble. Every level must
// agree with the scalar reference to rounding; see tests/test_kernels.cpp.
//
// Phases are passed in turns: center i advances by
//   detuning[i] * dt + stark[i] * field_time
// turns, where field_time is the signed integral of the applied field.

#include <complex>
#include <cstddef>
#include <string_view>

namespace semm {

enum class SimdLevel { Scalar, Avx2 };

struct KernelTable {
  std::string_view name;

  void (*precess)(double* u, double* v, const double* detuning, const double* stark, std::size_t n, double dt,
                  double field_time, double decay);

  /// Sum of weight * (u + i v) * exp(2 pi i phase) without touching the state.
  std::complex<double> (*sample)(const double* u, const double* v, const double* weight, const double* detuning,
                                 const double* stark, std::size_t n, double dt, double field_time);

  /// Same 3x3 row-major rotation for every center.
  void (*rotate_fixed)(double* u, double* v, double* w, std::size_t n, const double* matrix);

  void (*rotate_detuned)(double* u, double* v, double* w, const double* detuning, std::size_t n, double rabi,
                         double phase, double duration);

  std::complex<double> (*coherence_sum)(const double* u, const double* v, const double* weight, std::size_t n);
  double (*population_sum)(const double* w, const double* weight, std::size_t n);

  /// w <- -1 + (w + 1) * keep
  void (*relax_population)(double* w, std::size_t n, double keep);
};

bool simd_available(SimdLevel level);
const KernelTable& kernel_table(SimdLevel level);

/// Level used by the simulator. Defaults to the best available one; the
/// SEMM_SIMD environment variable ("scalar" or "avx2") overrides it.
SimdLevel active_simd_level();
void set_active_simd_level(SimdLevel level);
const KernelTable& active_kernels();

std::string_view to_string(SimdLevel level);

namespace detail {
const KernelTable& scalar_kernels();
#if defined(SEMM_HAVE_AVX2)
const KernelTable& avx2_kernels();
#endif
}  // namespace detail

}  // namespace semm
