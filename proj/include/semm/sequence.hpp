#pragma once

// Pulse sequences: rf pulses, square Stark pulses, waits and acquisition
// windows on an absolute time axis (seconds, input pulse at t = 0).
//
// Text form, one event per line or separated by ';', '#' starts a comment:
//
//   rf area=pi/2 phase=0 at=0
//   rf area=pi at=8e-3 rabi=20833          # finite pulse, duration derived
//   stark E=165 Ts=3.52e-3 at=4.5e-3 sign=-1
//   acquire echo1 from=15.95e-3 to=16.05e-3 rate=1e6
//   wait at=20e-3 duration=1e-3
//
// Numbers are arithmetic expressions over decimal literals and `pi`.

#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace semm {

/// `rabi` empty means an ideal (instantaneous) rotation.
struct RfPulse {
  double area = 0.0;
  double phase = 0.0;
  std::optional<double> rabi;
  bool operator==(const RfPulse&) const = default;
};

/// Applied field is sign * amplitude (V/cm).
struct StarkPulse {
  double amplitude = 0.0;
  int sign = 1;
  double field() const { return sign * amplitude; }
  bool operator==(const StarkPulse&) const = default;
};

struct Acquire {
  std::string label;
  bool operator==(const Acquire&) const = default;
};

struct Wait {
  bool operator==(const Wait&) const = default;
};

struct PulseEvent {
  double start = 0.0;
  double duration = 0.0;
  std::variant<RfPulse, StarkPulse, Acquire, Wait> kind;

  double end() const { return start + duration; }
  bool operator==(const PulseEvent&) const = default;
};

std::string describe(const PulseEvent& e);

struct Sequence {
  std::vector<PulseEvent> events;
  double sample_rate = 1e6;

  bool operator==(const Sequence&) const = default;
};

/// Builds a finite or ideal rf event. With `rabi`, the duration follows from
/// the area; with `duration`, the Rabi frequency does. If both are given they
/// must agree to 1e-3 relative. The stored Rabi frequency is always
/// |area| / (2 pi duration).
PulseEvent make_rf(double start, double area, double phase, std::optional<double> rabi = std::nullopt,
                   std::optional<double> duration = std::nullopt);
PulseEvent make_stark(double start, double ts, double amplitude, int sign = 1);
PulseEvent make_acquire(std::string label, double from, double to);
PulseEvent make_wait(double start, double duration);

/// Sorts events by start time and checks every invariant; throws
/// ValidationError, OverlapError or ConstraintError.
Sequence validated(Sequence seq);
void validate(const Sequence& seq);

Sequence parse_sequence(std::string_view text);
std::string render(const Sequence& seq);

/// Evaluates a numeric expression such as "3*pi/4" or "-2.5e-3".
double parse_number(std::string_view text);

/// Integral of the applied field from t = 0 to t, in (V/cm)*s.
double field_time(const Sequence& seq, double t);

/// Sample instants of an acquisition event at the sequence rate.
std::vector<double> sample_times(const PulseEvent& acquire, double sample_rate);

// Canonical SEMM timeline.

struct RfSpec {
  double area = 0.0;
  double phase = 0.0;
  std::optional<double> rabi;
};

struct StarkSpec {
  double amplitude = 0.0;
  double ts = 0.0;
  int sign = 1;
};

struct SemmOptions {
  /// Apply the second Stark pulse with the opposite field sign.
  bool flip_second_stark = false;
  /// Half width of each acquisition window around its nominal echo time.
  double half_window = 50e-6;
  double sample_rate = 1e6;
  bool acquire_echo1 = true;
  bool acquire_stimulated = true;
  bool acquire_echo2 = true;
  /// Continuous window from the end of the second pi pulse to t7 + half_window.
  bool acquire_output = false;
};

struct SemmTimes {
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  double t4 = 0.0;
  double t5 = 0.0;
  double t6 = 0.0;
  double t7 = 0.0;
  /// Stimulated echo from the grating written at t1 and t3, read at t6.
  double stimulated = 0.0;
};

struct SemmSequence {
  Sequence sequence;
  SemmTimes times;
};

/// Input at t1, Stark pulses starting at t2 and t5 = t4 + t5_offset, pi pulses
/// centered at t3 and t6 = t5 + (t3 - t2). Echoes: t4 = 2 t3 - t1 and
/// t7 = 2 t6 - t4. Requires t1 < t2 < t3 and t2 - t1 < (t4 - t2) / 2.
SemmSequence make_semm(double t1, double t2, double t3, double t5_offset, const StarkSpec& stark,
                       const RfSpec& pi_pulse, const RfSpec& input, const SemmOptions& options = {});

/// All make_semm arguments in one value.
struct SemmParams {
  double t1 = 0.0;
  double t2 = 4.5e-3;
  double t3 = 8e-3;
  double t5_offset = 11.5e-3;
  StarkSpec stark;
  RfSpec pi_pulse{std::numbers::pi, 0.0, std::nullopt};
  RfSpec input{0.5 * std::numbers::pi, 0.0, std::nullopt};
  SemmOptions options;
};

SemmSequence make_semm(const SemmParams& p);

}  // namespace semm
