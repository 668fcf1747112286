#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "semm/ensemble.hpp"
#include "semm/sequence.hpp"
#include "semm/simd/kernels.hpp"

namespace semm {

/// P(t) = sum of weight * (u + i v) on the acquisition grid, with the
/// parity +1 and -1 partial sums.
struct SignalTrace {
  std::string label;
  std::vector<double> times;
  std::vector<std::complex<double>> values;
  std::vector<std::complex<double>> values_plus;
  std::vector<std::complex<double>> values_minus;
};

/// Free precession for dt seconds with an extra frequency shift (Hz) whose
/// sign follows the center's parity, followed by T1/T2 relaxation.
Center free_evolve(const Center& c, double dt, double extra_shift, const RelaxationSpec& relaxation = {});

/// Rotation by `area` about (cos phase, sin phase, 0). With a Rabi frequency
/// and `detuning_aware`, the axis is tilted by the center's detuning and the
/// angle becomes 2 pi sqrt(rabi^2 + detuning^2) * duration.
Center rotate(const Center& c, double area, double phase, std::optional<double> rabi = std::nullopt,
              bool detuning_aware = true);

/// Row-major 3x3 matrix of the ideal rotation.
std::array<double, 9> rotation_matrix(double area, double phase);

struct RunOptions {
  /// Finite pulses use the detuned axis. Otherwise they act as ideal
  /// rotations at their center time.
  bool detuning_aware = true;
  /// Multiplies the field of the i-th Stark event; empty means all 1.
  std::vector<double> stark_scale;
  /// Standard deviation of additive complex Gaussian noise on each sample.
  double noise_sigma = 0.0;
  std::uint64_t noise_seed = 0;
  /// Kernel set; defaults to the active one.
  std::optional<SimdLevel> simd;
};

struct RunResult {
  std::map<std::string, SignalTrace> traces;
  /// State after the last event.
  Ensemble ensemble;
};

RunResult run_sequence(Ensemble ensemble, const Sequence& seq, const RunOptions& options = {});

}  // namespace semm
