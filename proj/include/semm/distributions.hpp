#pragma once

// Distributions of Stark coefficients g(k) and of transition detunings.
//
// Values are in Hz/(V/cm) for Stark coefficients and in Hz for line shapes.
// ft_real(d, x) = integral of cos(2 pi k x) g(k) dk, with x an electric
// field-time product in (V/cm)*s.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "semm/quadrature.hpp"

namespace semm {

struct Delta {
  bool operator==(const Delta&) const = default;
  double k0 = 0.0;
};

struct Gaussian {
  bool operator==(const Gaussian&) const = default;
  double mean = 0.0;
  double sigma = 1.0;
};

/// Cauchy line with half width at half maximum `gamma`.
struct Lorentzian {
  bool operator==(const Lorentzian&) const = default;
  double center = 0.0;
  double gamma = 1.0;
};

struct Uniform {
  bool operator==(const Uniform&) const = default;
  double lo = 0.0;
  double hi = 1.0;
};

struct MixtureComponent;

struct Mixture {
  std::vector<MixtureComponent> components;
  bool operator==(const Mixture& other) const;
};

/// Piecewise-linear density through (k[i], density[i]); normalized on construction.
struct Table {
  std::vector<double> k;
  std::vector<double> density;
  std::vector<double> cumulative;  // mass below k[i]
  bool operator==(const Table& other) const { return k == other.k && density == other.density; }
};

struct DistributionSpec {
  std::variant<Delta, Gaussian, Lorentzian, Uniform, Mixture, Table> kind;

  bool operator==(const DistributionSpec&) const = default;
};

struct MixtureComponent {
  double weight = 0.0;
  DistributionSpec dist;

  bool operator==(const MixtureComponent&) const = default;
};

inline bool Mixture::operator==(const Mixture& other) const { return components == other.components; }

DistributionSpec delta(double k0);
DistributionSpec gaussian(double mean, double sigma);
DistributionSpec gaussian_fwhm(double mean, double fwhm);
DistributionSpec lorentzian(double center, double gamma);
DistributionSpec uniform(double lo, double hi);
DistributionSpec mixture(std::vector<MixtureComponent> components);
/// Rows of (k, density); the density is normalized by the trapezoid rule.
DistributionSpec table(std::vector<std::pair<double, double>> rows);
/// Two-column CSV (k, density). A single header line is skipped.
DistributionSpec table_from_csv(const std::filesystem::path& path);

/// Throws ValidationError naming the offending field.
void validate(const DistributionSpec& d);
std::string kind_name(const DistributionSpec& d);

double pdf(const DistributionSpec& d, double k);
double ft_real(const DistributionSpec& d, double x);
double mean(const DistributionSpec& d);

double draw(const DistributionSpec& d, std::mt19937_64& rng);
std::vector<double> sample(const DistributionSpec& d, std::size_t n, std::uint64_t seed);

/// Deterministic probability rule with n nodes: equal weights for Delta and
/// Uniform (midpoint), truncated trapezoid for Gaussian, graded composite
/// Gauss-Legendre in the arctangent variable for Lorentzian, Gauss-Legendre
/// per segment for Table, and a proportional split for Mixture.
QuadratureRule quadrature(const DistributionSpec& d, std::size_t n);

}  // namespace semm
