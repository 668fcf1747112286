#include "semm/analysis.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "semm/error.hpp"

namespace semm {

namespace {

const SignalTrace& find_trace(const RunResult& run, const std::string& label) {
  const auto it = run.traces.find(label);
  if (it == run.traces.end()) throw ValidationError("label", "no acquisition window named '" + label + "'");
  return it->second;
}

}  // namespace

EchoRecord detect_echo(const SignalTrace& trace, double expected_time, double window) {
  const double lo = expected_time - 0.5 * window;
  const double hi = expected_time + 0.5 * window;
  EchoRecord rec;
  rec.label = trace.label;
  bool found = false;
  double best = -1.0;
  double prev_t = 0.0;
  double prev_i = 0.0;
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    const double t = trace.times[i];
    if (t < lo || t > hi) continue;
    const double mag = std::abs(trace.values[i]);
    const double inten = std::norm(trace.values[i]);
    if (found) rec.integrated_intensity += 0.5 * (inten + prev_i) * (t - prev_t);
    prev_t = t;
    prev_i = inten;
    if (mag > best) {
      best = mag;
      rec.peak_index = i;
      rec.peak_time = t;
      rec.amplitude = trace.values[i];
    }
    found = true;
  }
  if (!found) throw RangeError("no samples of '" + trace.label + "' within the echo window");
  rec.intensity = std::norm(rec.amplitude);
  return rec;
}

SuppressionResult suppression(const Ensemble& ensemble, const Sequence& seq_on, const Sequence& seq_off,
                              const EchoProbe& probe, const RunOptions& options) {
  SuppressionResult out;
  const RunResult off = run_sequence(ensemble, seq_off, options);
  const RunResult on = run_sequence(ensemble, seq_on, options);
  out.echo_off = detect_echo(find_trace(off, probe.label), probe.expected_time, probe.window);
  out.echo_on = detect_echo(find_trace(on, probe.label), probe.expected_time, probe.window);
  if (out.echo_off.intensity == 0.0) throw RangeError("reference echo intensity is zero");
  out.shot_intensities = {out.echo_on.intensity};
  out.mu = out.echo_on.intensity / out.echo_off.intensity;
  return out;
}

SuppressionResult suppression_jittered(const Ensemble& ensemble, const Sequence& seq_on, const Sequence& seq_off,
                                       const EchoProbe& probe, double relative_sigma, std::size_t shots,
                                       std::uint64_t seed, const RunOptions& options) {
  if (shots < 1) throw ValidationError("shots", "must be at least 1");
  if (!(relative_sigma >= 0.0)) throw ValidationError("jitter", "must be nonnegative");
  std::size_t stark_events = 0;
  for (const PulseEvent& e : seq_on.events) stark_events += std::holds_alternative<StarkPulse>(e.kind) ? 1 : 0;

  SuppressionResult out;
  const RunResult off = run_sequence(ensemble, seq_off, options);
  out.echo_off = detect_echo(find_trace(off, probe.label), probe.expected_time, probe.window);
  if (out.echo_off.intensity == 0.0) throw RangeError("reference echo intensity is zero");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  double total = 0.0;
  for (std::size_t shot = 0; shot < shots; ++shot) {
    RunOptions opts = options;
    opts.stark_scale.assign(stark_events, 1.0);
    for (double& s : opts.stark_scale) s = 1.0 + relative_sigma * normal(rng);
    const RunResult on = run_sequence(ensemble, seq_on, opts);
    EchoRecord rec = detect_echo(find_trace(on, probe.label), probe.expected_time, probe.window);
    total += rec.intensity;
    out.shot_intensities.push_back(rec.intensity);
    if (shot == 0) out.echo_on = rec;
  }
  out.mu = total / static_cast<double>(shots) / out.echo_off.intensity;
  return out;
}

std::vector<SweepPoint> sweep_modulation(const Ensemble& ensemble, const SemmParams& base, double stark_amplitude,
                                         const std::vector<double>& ts_values, const DistributionSpec& stark_shape,
                                         const RunOptions& options) {
  SemmParams p = base;
  p.options.acquire_stimulated = false;
  p.options.acquire_echo2 = false;
  p.options.acquire_output = false;
  p.options.acquire_echo1 = true;
  const double window = 2.0 * p.options.half_window;

  // With E = 0 the Stark pulses act as waits, so one reference serves every Ts.
  p.stark.amplitude = 0.0;
  p.stark.ts = 0.0;
  const SemmSequence off = make_semm(p);
  const RunResult ref_run = run_sequence(ensemble, off.sequence, options);
  const EchoRecord ref = detect_echo(ref_run.traces.at("echo1"), off.times.t4, window);
  if (ref.intensity == 0.0) throw RangeError("reference echo intensity is zero");

  std::vector<SweepPoint> out;
  for (double ts : ts_values) {
    p.stark.ts = ts;
    p.stark.amplitude = stark_amplitude;
    const SemmSequence on = make_semm(p);
    const RunResult r = run_sequence(ensemble, on.sequence, options);
    const SignalTrace& trace = r.traces.at("echo1");
    const EchoRecord rec = detect_echo(trace, on.times.t4, window);
    SweepPoint pt;
    pt.ts = ts;
    pt.normalized_intensity = rec.intensity / ref.intensity;
    pt.amplitude_ratio = trace.values[ref.peak_index] / ref.amplitude;
    const double f = ft_real(stark_shape, stark_amplitude * ts);
    pt.oracle = f * f;
    out.push_back(pt);
  }
  return out;
}

double solve_cancellation(const DistributionSpec& d, double x_max) {
  validate(d);
  if (!(x_max > 0.0) || !std::isfinite(x_max)) throw ValidationError("x_max", "must be positive");
  constexpr std::size_t kGrid = 2048;
  const double x_min = x_max * 1e-6;
  double prev_x = 0.0;
  double prev_f = 1.0;
  double min_f = 1.0;
  double argmin = 0.0;
  for (std::size_t i = 0; i < kGrid; ++i) {
    const double x =
        i + 1 == kGrid ? x_max : x_min * std::pow(x_max / x_min, static_cast<double>(i) / static_cast<double>(kGrid - 1));
    const double f = ft_real(d, x);
    if (f < min_f) {
      min_f = f;
      argmin = x;
    }
    if (f == 0.0) return x;
    if ((f < 0.0) != (prev_f < 0.0)) {
      double a = prev_x;
      double b = x;
      double fa = prev_f;
      while (b - a > 1e-12 * b) {
        const double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        const double fm = ft_real(d, m);
        if (fm == 0.0) return m;
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      return 0.5 * (a + b);
    }
    prev_x = x;
    prev_f = f;
  }
  throw NoRootFound(min_f, argmin);
}

}  // namespace semm
