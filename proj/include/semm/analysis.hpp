#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "semm/distributions.hpp"
#include "semm/dynamics.hpp"
#include "semm/sequence.hpp"

namespace semm {

struct EchoRecord {
  std::string label;
  double peak_time = 0.0;
  std::size_t peak_index = 0;
  std::complex<double> amplitude;
  double intensity = 0.0;
  /// Trapezoid integral of |P|^2 over the window.
  double integrated_intensity = 0.0;
};

/// Peak of |P| within expected_time +- window/2. Throws RangeError when no
/// sample falls in the window.
EchoRecord detect_echo(const SignalTrace& trace, double expected_time, double window);

struct SuppressionResult {
  double mu = 0.0;
  EchoRecord echo_on;
  EchoRecord echo_off;
  /// Field-on peak intensity of every shot (one entry without jitter).
  std::vector<double> shot_intensities;
};

/// Where to look for an echo in a sequence's traces.
struct EchoProbe {
  std::string label = "echo1";
  double expected_time = 0.0;
  double window = 100e-6;
};

SuppressionResult suppression(const Ensemble& ensemble, const Sequence& seq_on, const Sequence& seq_off,
                              const EchoProbe& probe, const RunOptions& options = {});

/// Each shot scales every Stark pulse of seq_on by an independent factor
/// 1 + relative_sigma * N(0, 1); mu is the shot-averaged intensity over the
/// field-off intensity.
SuppressionResult suppression_jittered(const Ensemble& ensemble, const Sequence& seq_on, const Sequence& seq_off,
                                       const EchoProbe& probe, double relative_sigma, std::size_t shots,
                                       std::uint64_t seed, const RunOptions& options = {});

struct SweepPoint {
  double ts = 0.0;
  double normalized_intensity = 0.0;
  /// P_on / P_off at the sample where the reference echo peaks.
  std::complex<double> amplitude_ratio;
  /// ft_real(stark_shape, E * Ts)^2.
  double oracle = 0.0;
};

/// Echo-1 intensity against Stark pulse length, normalized by the E = 0 run.
std::vector<SweepPoint> sweep_modulation(const Ensemble& ensemble, const SemmParams& base, double stark_amplitude,
                                         const std::vector<double>& ts_values, const DistributionSpec& stark_shape,
                                         const RunOptions& options = {});

/// Smallest x in (0, x_max] with ft_real(d, x) = 0: sign-change scan on 2048
/// log-spaced points, then bisection to 1e-12 relative. Throws NoRootFound.
double solve_cancellation(const DistributionSpec& d, double x_max);

}  // namespace semm
