#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "semm/analysis.hpp"
#include "semm/error.hpp"

using namespace semm;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kK0 = 0.43;
constexpr double kField = 2000.0;

// Short timeline: the Stark pulse fits between t2 and t3 for Ts up to 0.9 ms.
SemmParams short_params() {
  SemmParams p;
  p.t1 = 0.0;
  p.t2 = 0.1e-3;
  p.t3 = 1e-3;
  p.t5_offset = 1e-3;
  p.options.half_window = 20e-6;
  return p;
}

Ensemble line_ensemble(const DistributionSpec& stark, std::size_t line_nodes, std::size_t stark_nodes) {
  EnsembleSpec spec;
  spec.line_shape = gaussian_fwhm(0.0, 32e3);
  spec.stark_shape = stark;
  spec.n_centers = 2 * line_nodes * stark_nodes;
  spec.sampling = QuadratureSampling{stark_nodes};
  return build_ensemble(spec);
}

}  // namespace

TEST(analysis, detect_echo_on_zero_trace) {
  SignalTrace t;
  t.label = "z";
  for (int i = 0; i < 11; ++i) {
    t.times.push_back(1e-3 + i * 1e-6);
    t.values.emplace_back(0.0, 0.0);
  }
  const EchoRecord r = detect_echo(t, 1.005e-3, 4e-6);
  EXPECT_DOUBLE_EQ(std::abs(r.amplitude), 0.0);
  EXPECT_NEAR(r.peak_time, 1.003e-3, 1e-15);
  EXPECT_THROW(detect_echo(t, 5e-3, 1e-6), RangeError);
}

TEST(analysis, detect_echo_integrates_intensity) {
  SignalTrace t;
  for (int i = 0; i <= 10; ++i) {
    t.times.push_back(i * 0.1);
    t.values.emplace_back(1.0, 1.0);
  }
  const EchoRecord r = detect_echo(t, 0.5, 1.0);
  EXPECT_NEAR(r.integrated_intensity, 2.0, 1e-12);
  EXPECT_DOUBLE_EQ(r.intensity, 2.0);
}

TEST(analysis, echo_times_match_rephasing) {
  const Ensemble e = line_ensemble(delta(kK0), 2048, 1);
  SemmParams p = short_params();
  p.stark = {kField, 0.3e-3, 1};
  const SemmSequence s = make_semm(p);
  const RunResult r = run_sequence(e, s.sequence);
  const EchoRecord e2 = detect_echo(r.traces.at("echo2"), s.times.t7, 40e-6);
  EXPECT_NEAR(e2.peak_time, 2 * s.times.t6 - s.times.t4, 1e-6);
  p.stark.amplitude = 0.0;
  const SemmSequence off = make_semm(p);
  const RunResult r0 = run_sequence(e, off.sequence);
  const EchoRecord e1 = detect_echo(r0.traces.at("echo1"), off.times.t4, 40e-6);
  EXPECT_NEAR(e1.peak_time, 2 * off.times.t3 - off.times.t1, 1e-6);
  EXPECT_NEAR(std::abs(detect_echo(r0.traces.at("echo2"), off.times.t7, 40e-6).amplitude), std::abs(e2.amplitude),
              1e-9);
}

TEST(analysis, sweep_delta_follows_cos_squared) {
  const Ensemble e = line_ensemble(delta(kK0), 1024, 1);
  const double quarter = 1.0 / (4 * kK0 * kField);
  const std::vector<double> ts = {0.0, 0.1e-3, quarter, 0.45e-3, 2 * quarter};
  const auto pts = sweep_modulation(e, short_params(), kField, ts, delta(kK0));
  ASSERT_EQ(pts.size(), ts.size());
  EXPECT_NEAR(pts[0].normalized_intensity, 1.0, 1e-12);
  EXPECT_LT(pts[2].normalized_intensity, 1e-12);
  EXPECT_NEAR(pts[4].normalized_intensity, 1.0, 1e-12);
  for (const auto& p : pts) {
    const double c = std::cos(2 * kPi * kK0 * kField * p.ts);
    EXPECT_NEAR(p.normalized_intensity, c * c, 1e-9);
    EXPECT_NEAR(p.oracle, c * c, 1e-12);
    EXPECT_NEAR(p.amplitude_ratio.real(), c, 1e-9);
  }
}

TEST(analysis, sweep_gaussian_matches_closed_form) {
  const double sigma = 0.05;
  const Ensemble e = line_ensemble(gaussian(kK0, sigma), 512, 64);
  const std::vector<double> ts = {0.05e-3, 0.2e-3, 0.29e-3, 0.5e-3, 0.8e-3};
  const auto pts = sweep_modulation(e, short_params(), kField, ts, gaussian(kK0, sigma));
  for (const auto& p : pts) {
    const double x = kField * p.ts;
    const double ref = std::cos(2 * kPi * kK0 * x) * std::exp(-2 * kPi * kPi * sigma * sigma * x * x);
    EXPECT_NEAR(p.amplitude_ratio.real(), ref, 1e-9) << p.ts;
    EXPECT_NEAR(p.amplitude_ratio.imag(), 0.0, 1e-9);
  }
}

TEST(analysis, suppression_without_field_is_one) {
  const Ensemble e = line_ensemble(delta(kK0), 256, 1);
  const SemmSequence s = make_semm(short_params());
  const SuppressionResult r = suppression(e, s.sequence, s.sequence, {"echo1", s.times.t4, 40e-6});
  EXPECT_DOUBLE_EQ(r.mu, 1.0);
}

TEST(analysis, suppression_at_cancellation_point) {
  const Ensemble e = line_ensemble(delta(kK0), 1024, 1);
  SemmParams p = short_params();
  const SemmSequence off = make_semm(p);
  p.stark = {kField, 1.0 / (4 * kK0 * kField), 1};
  const SemmSequence on = make_semm(p);
  const EchoProbe probe{"echo1", off.times.t4, 40e-6};
  EXPECT_LT(suppression(e, on.sequence, off.sequence, probe).mu, 1e-20);

  // Small jitter: mu ~ (pi/2 * sigma)^2 / ... of order sigma^2.
  const SuppressionResult j = suppression_jittered(e, on.sequence, off.sequence, probe, 2e-3, 50, 3);
  EXPECT_EQ(j.shot_intensities.size(), 50u);
  EXPECT_GT(j.mu, 1e-7);
  EXPECT_LT(j.mu, 1e-4);
  EXPECT_EQ(j.mu, suppression_jittered(e, on.sequence, off.sequence, probe, 2e-3, 50, 3).mu);
}

TEST(analysis, jittered_mu_matches_gaussian_average) {
  // Delta distribution: intensity ratio cos^2(pi/2 (1 + s)) averaged over s ~ N(0, sigma).
  const Ensemble e = line_ensemble(delta(kK0), 256, 1);
  SemmParams p = short_params();
  p.options.acquire_echo2 = false;
  p.options.acquire_stimulated = false;
  const SemmSequence off = make_semm(p);
  p.stark = {kField, 1.0 / (4 * kK0 * kField), 1};
  const SemmSequence on = make_semm(p);
  const double sigma = 2e-3;
  const SuppressionResult j =
      suppression_jittered(e, on.sequence, off.sequence, {"echo1", off.times.t4, 40e-6}, sigma, 400, 17);
  // Only the first Stark pulse lies before echo 1: E[sin^2(pi s / 2)] ~ (pi sigma / 2)^2.
  const double expected = std::pow(kPi * sigma / 2, 2);
  EXPECT_NEAR(j.mu / expected, 1.0, 0.25);
}

TEST(analysis, solve_cancellation_roots) {
  const double root = 1.0 / (4 * kK0);
  EXPECT_NEAR(solve_cancellation(delta(kK0), 10.0), root, 1e-10);
  EXPECT_NEAR(solve_cancellation(gaussian(kK0, 0.1), 10.0), root, 1e-10);
  EXPECT_NEAR(solve_cancellation(lorentzian(kK0, 0.05), 10.0), root, 1e-10);
  EXPECT_NEAR(solve_cancellation(uniform(0.33, 0.53), 10.0), root, 1e-10);
  try {
    solve_cancellation(mixture({{0.6, delta(0.0)}, {0.4, delta(1.0)}}), 10.0);
    FAIL();
  } catch (const NoRootFound& e) {
    EXPECT_NEAR(e.min_value(), 0.2, 1e-5);
    EXPECT_NEAR(std::fmod(e.argmin(), 1.0), 0.5, 1e-2);
  }
}

TEST(analysis, solve_cancellation_asymmetric) {
  const auto d = mixture({{0.7, gaussian(kK0, 0.03)}, {0.3, uniform(0.5, 0.8)}});
  const double x = solve_cancellation(d, 10.0);
  EXPECT_NEAR(ft_real(d, x), 0.0, 1e-12);
  for (double y = x * 0.01; y < x * 0.999; y += x * 0.01) EXPECT_GT(ft_real(d, y), 0.0);
}
