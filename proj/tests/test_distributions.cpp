#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "semm/distributions.hpp"
#include "semm/error.hpp"

using namespace semm;

namespace {

constexpr double kPi = std::numbers::pi;

// Brute-force cosine average over samples drawn with an independent generator.
double cosine_average(const std::vector<double>& ks, double x) {
  double s = 0.0;
  for (double k : ks) s += std::cos(2.0 * kPi * k * x);
  return s / static_cast<double>(ks.size());
}

// Adaptive Simpson on the pdf, independent of the library's rules.
double simpson(const std::function<double(double)>& f, double a, double b, int n = 200000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

TEST(distributions, pdf_values) {
  EXPECT_NEAR(pdf(gaussian(0.43, 0.04), 0.43), 1.0 / (0.04 * std::sqrt(2.0 * kPi)), 1e-12);
  EXPECT_NEAR(pdf(gaussian(0.43, 0.04), 0.43), 9.9736, 1e-4);
  EXPECT_DOUBLE_EQ(pdf(uniform(0.0, 1.0), 0.5), 1.0);
  const auto mix = mixture({{0.5, uniform(0, 1)}, {0.5, uniform(2, 3)}});
  EXPECT_DOUBLE_EQ(pdf(mix, 2.5), 0.5);
  EXPECT_DOUBLE_EQ(pdf(mix, 1.5), 0.0);
  EXPECT_NEAR(pdf(lorentzian(1.0, 0.5), 1.0), 1.0 / (kPi * 0.5), 1e-15);
}

TEST(distributions, pdf_of_delta_is_unsupported) { EXPECT_THROW(pdf(delta(0.43), 0.43), UnsupportedOperation); }

TEST(distributions, pdfs_are_normalized) {
  EXPECT_NEAR(simpson([](double k) { return pdf(gaussian(0.43, 0.04), k); }, 0.43 - 0.5, 0.43 + 0.5), 1.0, 1e-9);
  const auto t = table({{0.0, 0.0}, {1.0, 2.0}, {2.0, 1.0}, {3.0, 0.0}});
  EXPECT_NEAR(simpson([&](double k) { return pdf(t, k); }, 0.0, 3.0, 300000), 1.0, 1e-9);
}

TEST(distributions, ft_real_closed_forms) {
  const double k0 = 0.43;
  EXPECT_NEAR(ft_real(delta(k0), 1.0 / (4.0 * k0)), 0.0, 1e-15);
  for (const auto& d : {delta(k0), gaussian(k0, 0.05), lorentzian(k0, 0.02), uniform(0.1, 0.7)})
    EXPECT_DOUBLE_EQ(ft_real(d, 0.0), 1.0);
  const double x = 0.37;
  EXPECT_NEAR(ft_real(gaussian(k0, 0.05), x),
              std::cos(2 * kPi * k0 * x) * std::exp(-2 * kPi * kPi * 0.05 * 0.05 * x * x), 1e-15);
  EXPECT_NEAR(ft_real(lorentzian(k0, 0.02), x), std::cos(2 * kPi * k0 * x) * std::exp(-2 * kPi * 0.02 * x), 1e-15);
  // Uniform: (sin(2 pi hi x) - sin(2 pi lo x)) / (2 pi x (hi - lo))
  const double lo = 0.1;
  const double hi = 0.7;
  EXPECT_NEAR(ft_real(uniform(lo, hi), x),
              (std::sin(2 * kPi * hi * x) - std::sin(2 * kPi * lo * x)) / (2 * kPi * x * (hi - lo)), 1e-14);
}

TEST(distributions, ft_real_matches_cosine_sum_of_samples) {
  const auto d = gaussian(0.43, 0.04);
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> normal(0.43, 0.04);
  std::vector<double> ks(1000000);
  for (double& k : ks) k = normal(rng);
  for (double x : {0.1, 0.58, 1.3, 4.0}) EXPECT_NEAR(ft_real(d, x), cosine_average(ks, x), 1e-3);
}

TEST(distributions, ft_real_of_table_matches_simpson) {
  const auto t = table({{0.1, 0.0}, {0.3, 1.5}, {0.5, 3.0}, {0.6, 0.5}, {0.9, 0.0}});
  for (double x : {0.2, 0.9, 2.7, 7.5}) {
    const double ref = simpson([&](double k) { return pdf(t, k) * std::cos(2 * kPi * k * x); }, 0.1, 0.9, 400000);
    EXPECT_NEAR(ft_real(t, x), ref, 1e-10 * std::max(1.0, std::abs(ref)));
  }
}

TEST(distributions, ft_real_is_even_and_bounded) {
  const std::vector<DistributionSpec> ds = {gaussian(0.43, 0.1), lorentzian(0.2, 0.05), uniform(-0.3, 0.8),
                                            mixture({{0.3, delta(0.0)}, {0.7, gaussian(1.0, 0.2)}}),
                                            table({{0.0, 1.0}, {1.0, 0.0}})};
  for (const auto& d : ds) {
    for (double x = -5.0; x <= 5.0; x += 0.173) {
      const double f = ft_real(d, x);
      EXPECT_LE(std::abs(f), 1.0 + 1e-12);
      EXPECT_NEAR(f, ft_real(d, -x), 1e-12);
    }
  }
}

TEST(distributions, symmetric_factorization) {
  const double k0 = 0.43;
  const double sigma = 0.07;
  for (double x = 0.0; x < 3.0; x += 0.11)
    EXPECT_NEAR(ft_real(gaussian(k0, sigma), x), std::cos(2 * kPi * k0 * x) * ft_real(gaussian(0.0, sigma), x), 1e-15);
}

TEST(distributions, zero_shift_lower_bound) {
  for (double p : {0.2, 0.5, 0.6, 0.9}) {
    const auto d = mixture({{p, delta(0.0)}, {1.0 - p, gaussian(0.5, 0.1)}});
    for (double x = 0.0; x < 10.0; x += 0.05) EXPECT_GE(ft_real(d, x), 2.0 * p - 1.0 - 1e-12);
  }
}

TEST(distributions, sample_statistics) {
  const auto s = sample(delta(0.43), 3, 1);
  EXPECT_EQ(s, (std::vector<double>{0.43, 0.43, 0.43}));
  const auto u = sample(uniform(0, 1), 100000, 99);
  double m = 0.0;
  for (double x : u) m += x;
  m /= static_cast<double>(u.size());
  EXPECT_NEAR(m, 0.5, 0.005);
  EXPECT_EQ(sample(gaussian(1, 2), 100, 5), sample(gaussian(1, 2), 100, 5));
  EXPECT_NE(sample(gaussian(1, 2), 100, 5), sample(gaussian(1, 2), 100, 6));
}

TEST(distributions, sample_means_within_five_sigma) {
  const std::size_t n = 40000;
  struct Case {
    DistributionSpec d;
    double mean;
    double sd;
  };
  const std::vector<Case> cases = {
      {gaussian(0.43, 0.04), 0.43, 0.04},
      {uniform(-1, 3), 1.0, 4.0 / std::sqrt(12.0)},
      {mixture({{0.25, delta(0.0)}, {0.75, delta(1.0)}}), 0.75, std::sqrt(0.75 * 0.25)},
      // Triangular density on [0, 2] with apex at 0: mean 2/3, variance 2/9.
      {table({{0.0, 1.0}, {2.0, 0.0}}), 2.0 / 3.0, std::sqrt(2.0 / 9.0)},
  };
  for (const auto& c : cases) {
    const auto xs = sample(c.d, n, 2024);
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(n);
    EXPECT_NEAR(m, c.mean, 5.0 * c.sd / std::sqrt(static_cast<double>(n))) << kind_name(c.d);
    EXPECT_NEAR(mean(c.d), c.mean, 1e-12) << kind_name(c.d);
  }
}

TEST(distributions, validation_names_fields) {
  try {
    mixture({{0.5, uniform(0, 1)}, {-0.1, uniform(0, 1)}, {0.6, delta(0)}});
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "mixture.components[1].weight");
  }
  EXPECT_THROW(mixture({{0.5, uniform(0, 1)}, {0.4, delta(0)}}), ValidationError);
  EXPECT_THROW(gaussian(0, 0), ValidationError);
  EXPECT_THROW(uniform(1, 1), ValidationError);
  EXPECT_THROW(lorentzian(0, -1), ValidationError);
  EXPECT_THROW(table({{0.0, 1.0}}), ValidationError);
  EXPECT_THROW(table({{0.0, 0.0}, {1.0, 0.0}}), ValidationError);
  EXPECT_THROW(table({{1.0, 1.0}, {0.0, 1.0}}), ValidationError);
  EXPECT_THROW(sample(uniform(0, 1), 0, 1), ValidationError);
}

TEST(distributions, table_from_csv) {
  const std::string path = testing::TempDir() + "semm_table.csv";
  {
    std::ofstream out(path);
    out << "k,density\n0.0,0\n0.5,4\n1.0,0\n";
  }
  const auto t = table_from_csv(path);
  EXPECT_NEAR(pdf(t, 0.5), 2.0, 1e-12);
  EXPECT_NEAR(mean(t), 0.5, 1e-12);
  EXPECT_THROW(table_from_csv(path + ".missing"), ValidationError);
}

TEST(distributions, quadrature_rules_are_probability_rules) {
  const std::vector<DistributionSpec> ds = {delta(0.4), gaussian(0.43, 0.05), lorentzian(0.43, 0.02),
                                            uniform(0.33, 0.53),
                                            mixture({{0.7, gaussian(0.43, 0.03)}, {0.3, uniform(0.5, 0.8)}}),
                                            table({{0.0, 0.0}, {1.0, 2.0}, {2.0, 0.0}})};
  for (const auto& d : ds) {
    for (std::size_t n : {7u, 64u, 1000u}) {
      const QuadratureRule r = quadrature(d, n);
      ASSERT_EQ(r.size(), n) << kind_name(d);
      double total = 0.0;
      for (double w : r.weights) {
        EXPECT_GE(w, 0.0);
        total += w;
      }
      EXPECT_NEAR(total, 1.0, 1e-12) << kind_name(d);
    }
  }
}

TEST(distributions, quadrature_node_minimum) {
  EXPECT_EQ(quadrature(delta(0.4), 1).size(), 1u);
  EXPECT_EQ(quadrature(uniform(0, 1), 1).size(), 1u);
  EXPECT_THROW(quadrature(table({{0.0, 0.0}, {1.0, 2.0}, {2.0, 0.0}}), 1), ValidationError);
  EXPECT_THROW(quadrature(gaussian(0, 1), 0), ValidationError);
}

TEST(distributions, quadrature_reproduces_ft_real) {
  struct Case {
    DistributionSpec d;
    std::size_t n;
    double tol;
  };
  const std::vector<Case> cases = {
      {gaussian(0.43, 0.05), 64, 1e-12},
      {uniform(0.33, 0.53), 4096, 1e-6},
      {lorentzian(0.43, 0.02), 131072, 1e-6},
      {mixture({{0.7, gaussian(0.43, 0.03)}, {0.3, uniform(0.5, 0.8)}}), 8192, 1e-6},
      {table({{0.1, 0.0}, {0.3, 1.0}, {0.6, 0.2}, {0.8, 0.0}}), 256, 1e-9},
  };
  for (const auto& c : cases) {
    const QuadratureRule r = quadrature(c.d, c.n);
    for (double x = 0.0; x <= 1.2; x += 0.1) {
      double s = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) s += r.weights[i] * std::cos(2 * kPi * r.nodes[i] * x);
      EXPECT_NEAR(s, ft_real(c.d, x), c.tol) << kind_name(c.d) << " x=" << x;
    }
  }
}

TEST(distributions, gaussian_quadrature_half_normal_mean) {
  // Line of 32 kHz FWHM; E|detuning| = sigma sqrt(2/pi).
  const double sigma = 32e3 / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  const QuadratureRule r = quadrature(gaussian_fwhm(0.0, 32e3), 1000);
  double m = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) m += r.weights[i] * std::abs(r.nodes[i]);
  EXPECT_NEAR(m / (sigma * std::sqrt(2.0 / kPi)), 1.0, 0.005);
}
