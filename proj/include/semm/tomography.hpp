#pragma once

#include <array>
#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include "semm/dynamics.hpp"
#include "semm/sequence.hpp"

namespace semm {

enum class InputState { PlusX, MinusX, PlusY, MinusY, PlusZ };

inline constexpr std::array<InputState, 5> kTomographyStates = {InputState::PlusX, InputState::MinusX,
                                                                InputState::PlusY, InputState::MinusY,
                                                                InputState::PlusZ};

std::string_view to_string(InputState s);
InputState parse_input_state(std::string_view text);

/// Input pulse for a tomography state: pi/2 pulses whose phase puts the
/// ground state on +-x or +-y, and no pulse (zero area) for +Z.
RfSpec prepare_input(InputState s, std::optional<double> rabi = std::nullopt);

/// 2x2 density matrix, row-major, basis (|0>, |1>) with sigma_z = diag(1, -1).
struct DensityMatrix2 {
  std::array<std::complex<double>, 4> m{};

  static DensityMatrix2 from_bloch(double sx, double sy, double sz);
  std::complex<double> operator()(int r, int c) const { return m[static_cast<std::size_t>(2 * r + c)]; }
  std::array<double, 3> bloch() const;
  std::complex<double> trace() const { return m[0] + m[3]; }
  std::complex<double> det() const { return m[0] * m[3] - m[1] * m[2]; }
  /// Ascending.
  std::array<double, 2> eigenvalues() const;
};

/// rho = (I + sx X + sy Y + sz Z) / 2 with (sx, sy) = (Re, Im) of the
/// calibrated output amplitude and sz = z_readout. Bloch vectors longer than
/// one are scaled back onto the sphere.
DensityMatrix2 reconstruct(std::complex<double> output_amplitude, double z_readout);

/// Tr(rho sigma) + 2 sqrt(det rho det sigma), clamped to [0, 1].
double fidelity(const DensityMatrix2& rho, const DensityMatrix2& sigma);

enum class ZReadout {
  /// Weighted mean of w read from the simulator.
  Direct,
  /// pi/2 + pi echo after the output, calibrated on a ground-state ensemble.
  Sequence,
};

struct TomographyOptions {
  bool with_stark = true;
  ZReadout z_mode = ZReadout::Direct;
  /// Rabi frequency of the input pulse; empty means ideal.
  std::optional<double> input_rabi;
  RunOptions run;
};

struct TomographyEntry {
  InputState state = InputState::PlusX;
  std::complex<double> amplitude_reference;
  std::complex<double> amplitude_stark;
  double sz_reference = 0.0;
  double sz_stark = 0.0;
  DensityMatrix2 reference;
  DensityMatrix2 stark;
  double fidelity = 0.0;
};

struct TomographyResult {
  std::vector<TomographyEntry> entries;
  double average_fidelity = 0.0;
};

/// Runs the five inputs through `base` with and without Stark pulses. The
/// output amplitude is read at the echo-2 peak of the +X reference run and
/// divided by that reference amplitude.
TomographyResult run_tomography(const Ensemble& ensemble, const SemmParams& base,
                                const TomographyOptions& options = {});

/// pi/2 and pi readout pulses placed after every rephasing point of the
/// memory sequence, plus a "zread" window on the readout echo.
struct ZReadoutPlan {
  std::vector<PulseEvent> events;
  double echo_time = 0.0;
};

ZReadoutPlan plan_z_readout(const Sequence& seq, const SemmTimes& times, const RfSpec& pi_pulse,
                            double half_window);

}  // namespace semm
