#include <cmath>

#include "semm/bloch.hpp"
#include "semm/simd/kernels.hpp"

namespace semm::detail {

namespace {

void precess(double* u, double* v, const double* detuning, const double* stark, std::size_t n, double dt,
             double field_time, double decay) {
  for (std::size_t i = 0; i < n; ++i) bloch::precess(u[i], v[i], detuning[i] * dt + stark[i] * field_time, decay);
}

std::complex<double> sample(const double* u, const double* v, const double* weight, const double* detuning,
                            const double* stark, std::size_t n, double dt, double field_time) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s;
    double c;
    bloch::sincos_turns(detuning[i] * dt + stark[i] * field_time, s, c);
    re += weight[i] * (u[i] * c - v[i] * s);
    im += weight[i] * (u[i] * s + v[i] * c);
  }
  return {re, im};
}

void rotate_fixed(double* u, double* v, double* w, std::size_t n, const double* m) {
  for (std::size_t i = 0; i < n; ++i) {
    const double x = u[i];
    const double y = v[i];
    const double z = w[i];
    u[i] = m[0] * x + m[1] * y + m[2] * z;
    v[i] = m[3] * x + m[4] * y + m[5] * z;
    w[i] = m[6] * x + m[7] * y + m[8] * z;
  }
}

void rotate_detuned(double* u, double* v, double* w, const double* detuning, std::size_t n, double rabi,
                    double phase, double duration) {
  const double cp = std::cos(phase);
  const double sp = std::sin(phase);
  for (std::size_t i = 0; i < n; ++i) bloch::rotate_detuned(u[i], v[i], w[i], detuning[i], rabi, cp, sp, duration);
}

std::complex<double> coherence_sum(const double* u, const double* v, const double* weight, std::size_t n) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += weight[i] * u[i];
    im += weight[i] * v[i];
  }
  return {re, im};
}

double population_sum(const double* w, const double* weight, std::size_t n) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += weight[i] * w[i];
  return total;
}

void relax_population(double* w, std::size_t n, double keep) {
  for (std::size_t i = 0; i < n; ++i) w[i] = -1.0 + (w[i] + 1.0) * keep;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar",      precess,        sample,          rotate_fixed,
                                 rotate_detuned, coherence_sum, population_sum, relax_population};
  return table;
}

}  // namespace semm::detail
