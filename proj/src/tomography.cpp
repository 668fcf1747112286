#include "semm/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "semm/analysis.hpp"
#include "semm/error.hpp"

namespace semm {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

std::string_view to_string(InputState s) {
  switch (s) {
    case InputState::PlusX:
      return "+X";
    case InputState::MinusX:
      return "-X";
    case InputState::PlusY:
      return "+Y";
    case InputState::MinusY:
      return "-Y";
    case InputState::PlusZ:
      return "+Z";
  }
  return "?";
}

InputState parse_input_state(std::string_view text) {
  for (InputState s : kTomographyStates)
    if (to_string(s) == text) return s;
  throw ValidationError("state", "unknown input state '" + std::string(text) + "'");
}

RfSpec prepare_input(InputState s, std::optional<double> rabi) {
  // A pi/2 rotation about (cos p, sin p, 0) takes (0, 0, -1) to (-sin p, cos p, 0).
  switch (s) {
    case InputState::PlusX:
      return {0.5 * kPi, 1.5 * kPi, rabi};
    case InputState::MinusX:
      return {0.5 * kPi, 0.5 * kPi, rabi};
    case InputState::PlusY:
      return {0.5 * kPi, 0.0, rabi};
    case InputState::MinusY:
      return {0.5 * kPi, kPi, rabi};
    case InputState::PlusZ:
      return {0.0, 0.0, std::nullopt};
  }
  return {};
}

DensityMatrix2 DensityMatrix2::from_bloch(double sx, double sy, double sz) {
  DensityMatrix2 d;
  d.m[0] = 0.5 * (1.0 + sz);
  d.m[1] = std::complex<double>(0.5 * sx, -0.5 * sy);
  d.m[2] = std::complex<double>(0.5 * sx, 0.5 * sy);
  d.m[3] = 0.5 * (1.0 - sz);
  return d;
}

std::array<double, 3> DensityMatrix2::bloch() const {
  return {2.0 * m[2].real(), 2.0 * m[2].imag(), (m[0] - m[3]).real()};
}

std::array<double, 2> DensityMatrix2::eigenvalues() const {
  const double tr = trace().real();
  const double d = det().real();
  const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - d));
  return {0.5 * tr - disc, 0.5 * tr + disc};
}

DensityMatrix2 reconstruct(std::complex<double> output_amplitude, double z_readout) {
  double sx = output_amplitude.real();
  double sy = output_amplitude.imag();
  double sz = z_readout;
  const double norm = std::sqrt(sx * sx + sy * sy + sz * sz);
  if (norm > 1.0) {
    sx /= norm;
    sy /= norm;
    sz /= norm;
  }
  return DensityMatrix2::from_bloch(sx, sy, sz);
}

double fidelity(const DensityMatrix2& rho, const DensityMatrix2& sigma) {
  std::complex<double> overlap = 0.0;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) overlap += rho(r, c) * sigma(c, r);
  const double dets = rho.det().real() * sigma.det().real();
  const double f = overlap.real() + 2.0 * std::sqrt(std::max(0.0, dets));
  return std::clamp(f, 0.0, 1.0);
}

ZReadoutPlan plan_z_readout(const Sequence& seq, const SemmTimes& times, const RfSpec& pi_pulse,
                            double half_window) {
  double last = 0.0;
  for (const PulseEvent& e : seq.events) last = std::max(last, e.end());
  // Older coherences refocus 2 t_pi - T for each earlier rephasing time T,
  // which differs from the readout echo by t_half - T.
  const double gap = std::max(8.0 * half_window, 200e-6);
  const double t_half = std::max({last, times.t7, times.stimulated, 2.0 * times.t6 - times.t1}) + gap;
  const double t_pi = t_half + gap;
  ZReadoutPlan plan;
  plan.echo_time = 2.0 * t_pi - t_half;
  auto centered = [](double center, double area, const RfSpec& spec) {
    PulseEvent e = make_rf(center, area, spec.phase, spec.rabi);
    e.start = center - 0.5 * e.duration;
    return e;
  };
  plan.events.push_back(centered(t_half, 0.5 * kPi, pi_pulse));
  plan.events.push_back(centered(t_pi, pi_pulse.area, pi_pulse));
  plan.events.push_back(make_acquire("zread", plan.echo_time - half_window, plan.echo_time + half_window));
  return plan;
}

TomographyResult run_tomography(const Ensemble& ensemble, const SemmParams& base, const TomographyOptions& options) {
  SemmParams ref_params = base;
  ref_params.stark.amplitude = 0.0;
  SemmParams stark_params = base;
  if (!options.with_stark) stark_params.stark.amplitude = 0.0;
  for (SemmParams* p : {&ref_params, &stark_params}) {
    p->options.acquire_echo2 = true;
    p->options.acquire_echo1 = false;
    p->options.acquire_stimulated = false;
    p->options.acquire_output = false;
  }
  const double h = base.options.half_window;
  const double window = 2.0 * h;

  struct Raw {
    SignalTrace echo;
    double sz = 0.0;
  };
  std::complex<double> z_cal = 0.0;
  auto run_one = [&](const SemmParams& params, InputState state) {
    SemmParams p = params;
    p.input = prepare_input(state, options.input_rabi);
    const SemmSequence s = make_semm(p);
    Sequence seq = s.sequence;
    ZReadoutPlan plan;
    if (options.z_mode == ZReadout::Sequence) {
      plan = plan_z_readout(s.sequence, s.times, base.pi_pulse, h);
      seq.events.insert(seq.events.end(), plan.events.begin(), plan.events.end());
      seq = validated(std::move(seq));
    }
    Ensemble fresh = ensemble;
    fresh.reset_states();
    const RunResult r = run_sequence(std::move(fresh), seq, options.run);
    Raw raw;
    raw.echo = r.traces.at("echo2");
    if (options.z_mode == ZReadout::Sequence) {
      const EchoRecord z = detect_echo(r.traces.at("zread"), plan.echo_time, window);
      raw.sz = (-z.amplitude / z_cal).real();
    } else {
      raw.sz = r.ensemble.population();
    }
    return std::make_pair(raw, s.times);
  };

  if (options.z_mode == ZReadout::Sequence) {
    // Same readout on an untouched ground-state ensemble defines sz = -1.
    SemmParams p = ref_params;
    p.input = prepare_input(InputState::PlusZ);
    const SemmSequence s = make_semm(p);
    const ZReadoutPlan plan = plan_z_readout(s.sequence, s.times, base.pi_pulse, h);
    Sequence readout;
    readout.sample_rate = s.sequence.sample_rate;
    readout.events = plan.events;
    Ensemble fresh = ensemble;
    fresh.reset_states();
    const RunResult r = run_sequence(std::move(fresh), validated(std::move(readout)), options.run);
    z_cal = detect_echo(r.traces.at("zread"), plan.echo_time, window).amplitude;
    if (z_cal == 0.0) throw RangeError("z readout calibration echo is zero");
  }

  const auto [plus_x_ref, times] = run_one(ref_params, InputState::PlusX);
  const EchoRecord peak = detect_echo(plus_x_ref.echo, times.t7, window);
  if (peak.amplitude == 0.0) throw RangeError("+X reference output is zero");

  TomographyResult result;
  for (InputState state : kTomographyStates) {
    const Raw ref = state == InputState::PlusX ? plus_x_ref : run_one(ref_params, state).first;
    const Raw on = run_one(stark_params, state).first;
    TomographyEntry entry;
    entry.state = state;
    entry.amplitude_reference = ref.echo.values[peak.peak_index] / peak.amplitude;
    entry.amplitude_stark = on.echo.values[peak.peak_index] / peak.amplitude;
    entry.sz_reference = ref.sz;
    entry.sz_stark = on.sz;
    entry.reference = reconstruct(entry.amplitude_reference, entry.sz_reference);
    entry.stark = reconstruct(entry.amplitude_stark, entry.sz_stark);
    entry.fidelity = fidelity(entry.stark, entry.reference);
    result.average_fidelity += entry.fidelity;
    result.entries.push_back(entry);
  }
  result.average_fidelity /= static_cast<double>(result.entries.size());
  return result;
}

}  // namespace semm
