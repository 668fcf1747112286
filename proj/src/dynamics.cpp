#include "semm/dynamics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "semm/error.hpp"

namespace semm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double decay_factor(double dt, double lifetime) { return std::isfinite(lifetime) ? std::exp(-dt / lifetime) : 1.0; }

struct StarkSegment {
  double start;
  double end;
  double field;
};

class Propagator {
 public:
  Propagator(Ensemble& ensemble, const Sequence& seq, const RunOptions& options)
      : ens_(ensemble), kernels_(options.simd ? kernel_table(*options.simd) : active_kernels()), options_(options) {
    std::size_t index = 0;
    for (const PulseEvent& e : seq.events) {
      const auto* s = std::get_if<StarkPulse>(&e.kind);
      if (s == nullptr) continue;
      double scale = 1.0;
      if (!options.stark_scale.empty()) {
        if (index >= options.stark_scale.size())
          throw ValidationError("stark_scale", "needs one entry per Stark pulse");
        scale = options.stark_scale[index];
      }
      ++index;
      segments_.push_back({e.start, e.end(), s->field() * scale});
    }
    if (!options.stark_scale.empty() && index != options.stark_scale.size())
      throw ValidationError("stark_scale", "needs one entry per Stark pulse");
  }

  double field_time(double t) const {
    double total = 0.0;
    for (const auto& s : segments_)
      if (t > s.start) total += s.field * (std::min(t, s.end) - s.start);
    return total;
  }

  void set_time(double t) {
    time_ = t;
    field_time_ = field_time(t);
  }
  double time() const { return time_; }

  void advance(double t) {
    const double dt = t - time_;
    if (dt < 0.0) throw Error("internal: time went backwards");
    const double ft = field_time(t) - field_time_;
    const std::size_t half = ens_.half();
    const double decay = decay_factor(dt, ens_.relaxation().t2);
    auto u = ens_.u();
    auto v = ens_.v();
    auto det = ens_.detuning();
    auto k = ens_.stark();
    kernels_.precess(u.data(), v.data(), det.data(), k.data(), half, dt, ft, decay);
    kernels_.precess(u.data() + half, v.data() + half, det.data() + half, k.data() + half, half, dt, -ft, decay);
    if (std::isfinite(ens_.relaxation().t1) && dt > 0.0)
      kernels_.relax_population(ens_.w().data(), ens_.size(), decay_factor(dt, ens_.relaxation().t1));
    time_ = t;
    field_time_ += ft;
  }

  void pulse(const PulseEvent& e) {
    const auto& rf = std::get<RfPulse>(e.kind);
    auto u = ens_.u();
    auto v = ens_.v();
    auto w = ens_.w();
    if (rf.rabi && options_.detuning_aware) {
      advance(e.start);
      const double phase = rf.area < 0.0 ? rf.phase + std::numbers::pi : rf.phase;
      kernels_.rotate_detuned(u.data(), v.data(), w.data(), ens_.detuning().data(), ens_.size(), *rf.rabi, phase,
                              e.duration);
      // No relaxation and no Stark field during rf pulses.
      time_ = e.end();
      field_time_ = field_time(time_);
      return;
    }
    const double center = e.start + 0.5 * e.duration;
    advance(center);
    const auto m = rotation_matrix(rf.area, rf.phase);
    kernels_.rotate_fixed(u.data(), v.data(), w.data(), ens_.size(), m.data());
    advance(e.end());
  }

  SignalTrace acquire(const PulseEvent& e, double sample_rate, std::mt19937_64& noise_rng) const {
    SignalTrace trace;
    trace.label = std::get<Acquire>(e.kind).label;
    trace.times = sample_times(e, sample_rate);
    const std::size_t half = ens_.half();
    const auto u = ens_.u();
    const auto v = ens_.v();
    const auto wt = ens_.weight();
    const auto det = ens_.detuning();
    const auto k = ens_.stark();
    std::normal_distribution<double> noise(0.0, 1.0);
    for (double t : trace.times) {
      const double dt = t - time_;
      if (dt < 0.0) throw Error("internal: sample precedes the current state");
      const double ft = field_time(t) - field_time_;
      const double decay = decay_factor(dt, ens_.relaxation().t2);
      std::complex<double> plus = kernels_.sample(u.data(), v.data(), wt.data(), det.data(), k.data(), half, dt, ft);
      std::complex<double> minus = kernels_.sample(u.data() + half, v.data() + half, wt.data() + half,
                                                   det.data() + half, k.data() + half, half, dt, -ft);
      plus *= decay;
      minus *= decay;
      std::complex<double> total = plus + minus;
      if (options_.noise_sigma > 0.0) {
        const double re = noise(noise_rng);
        const double im = noise(noise_rng);
        total += options_.noise_sigma * std::complex<double>(re, im);
      }
      trace.values.push_back(total);
      trace.values_plus.push_back(plus);
      trace.values_minus.push_back(minus);
    }
    return trace;
  }

 private:
  Ensemble& ens_;
  const KernelTable& kernels_;
  const RunOptions& options_;
  std::vector<StarkSegment> segments_;
  double time_ = 0.0;
  double field_time_ = 0.0;
};

}  // namespace

Center free_evolve(const Center& c, double dt, double extra_shift, const RelaxationSpec& relaxation) {
  if (!(dt >= 0.0)) throw ValidationError("dt", "must be nonnegative");
  Center out = c;
  const double turns = (c.detuning + c.parity * extra_shift) * dt;
  bloch::precess(out.state.u, out.state.v, turns, decay_factor(dt, relaxation.t2));
  const double keep = decay_factor(dt, relaxation.t1);
  out.state.w = -1.0 + (out.state.w + 1.0) * keep;
  return out;
}

std::array<double, 9> rotation_matrix(double area, double phase) {
  const double s = std::sin(area);
  const double c = std::cos(area);
  const double nx = std::cos(phase);
  const double ny = std::sin(phase);
  const double t = 1.0 - c;
  // R = c I + s [n]x + (1 - c) n n^T with n = (nx, ny, 0)
  return {c + t * nx * nx, t * nx * ny, s * ny,
          t * nx * ny,     c + t * ny * ny, -s * nx,
          -s * ny,         s * nx,          c};
}

Center rotate(const Center& c, double area, double phase, std::optional<double> rabi, bool detuning_aware) {
  Center out = c;
  BlochVector& r = out.state;
  if (rabi && detuning_aware && area != 0.0) {
    if (!(*rabi > 0.0)) throw ValidationError("rabi", "must be positive");
    const double duration = std::abs(area) / (kTwoPi * *rabi);
    const double ph = area < 0.0 ? phase + std::numbers::pi : phase;
    bloch::rotate_detuned(r.u, r.v, r.w, c.detuning, *rabi, std::cos(ph), std::sin(ph), duration);
    return out;
  }
  const auto m = rotation_matrix(area, phase);
  const BlochVector in = r;
  r.u = m[0] * in.u + m[1] * in.v + m[2] * in.w;
  r.v = m[3] * in.u + m[4] * in.v + m[5] * in.w;
  r.w = m[6] * in.u + m[7] * in.v + m[8] * in.w;
  return out;
}

RunResult run_sequence(Ensemble ensemble, const Sequence& seq, const RunOptions& options) {
  validate(seq);
  Propagator prop(ensemble, seq, options);
  std::mt19937_64 noise_rng(options.noise_seed);

  double origin = 0.0;
  double last_end = 0.0;
  for (const PulseEvent& e : seq.events) {
    origin = std::min(origin, e.start);
    last_end = std::max(last_end, e.end());
  }
  prop.set_time(origin);

  std::vector<const PulseEvent*> acquires;
  for (const PulseEvent& e : seq.events)
    if (std::holds_alternative<Acquire>(e.kind)) acquires.push_back(&e);

  RunResult result;
  std::size_t next = 0;
  auto emit_until = [&](double limit) {
    while (next < acquires.size() && acquires[next]->start < limit) {
      SignalTrace trace = prop.acquire(*acquires[next], seq.sample_rate, noise_rng);
      result.traces.emplace(trace.label, std::move(trace));
      ++next;
    }
  };
  for (const PulseEvent& e : seq.events) {
    if (!std::holds_alternative<RfPulse>(e.kind)) continue;
    // A window that starts before the pulse ends lies entirely before it.
    emit_until(e.end());
    prop.pulse(e);
  }
  emit_until(std::numeric_limits<double>::infinity());
  if (last_end > prop.time()) prop.advance(last_end);
  result.ensemble = std::move(ensemble);
  return result;
}

}  // namespace semm
