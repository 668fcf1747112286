#include <atomic>
#include <cstdlib>
#include <string>

#include "semm/error.hpp"
#include "semm/simd/kernels.hpp"

namespace semm {

namespace {

bool cpu_has_avx2() {
#if defined(SEMM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

SimdLevel initial_level() {
  if (const char* env = std::getenv("SEMM_SIMD")) {
    const std::string value(env);
    if (value == "scalar") return SimdLevel::Scalar;
    if (value == "avx2" && cpu_has_avx2()) return SimdLevel::Avx2;
  }
  return cpu_has_avx2() ? SimdLevel::Avx2 : SimdLevel::Scalar;
}

std::atomic<SimdLevel>& level_slot() {
  static std::atomic<SimdLevel> level{initial_level()};
  return level;
}

}  // namespace

bool simd_available(SimdLevel level) {
  switch (level) {
    case SimdLevel::Scalar:
      return true;
    case SimdLevel::Avx2:
      return cpu_has_avx2();
  }
  return false;
}

const KernelTable& kernel_table(SimdLevel level) {
  if (!simd_available(level)) throw UnsupportedOperation("SIMD level not available: " + std::string(to_string(level)));
#if defined(SEMM_HAVE_AVX2)
  if (level == SimdLevel::Avx2) return detail::avx2_kernels();
#endif
  return detail::scalar_kernels();
}

SimdLevel active_simd_level() { return level_slot().load(); }

void set_active_simd_level(SimdLevel level) {
  if (!simd_available(level)) throw UnsupportedOperation("SIMD level not available: " + std::string(to_string(level)));
  level_slot().store(level);
}

const KernelTable& active_kernels() { return kernel_table(active_simd_level()); }

std::string_view to_string(SimdLevel level) {
  switch (level) {
    case SimdLevel::Scalar:
      return "scalar";
    case SimdLevel::Avx2:
      return "avx2";
  }
  return "unknown";
}

}  // namespace semm
