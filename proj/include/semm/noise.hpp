#pragma once

#include <optional>
#include <string>
#include <vector>

namespace semm {

/// Cavity finesse F and memory opacity d.
struct CavityParams {
  double finesse = 100.0;
  double opacity = 0.01;

  void validate() const;
};

/// n_sp = F (exp(F d) - 1). Throws RangeError when F d > 700.
double spontaneous_photons(const CavityParams& c);

struct LeakedNoise {
  double photons = 0.0;
  bool single_photon_ok = false;
};

/// mu * n_sp, compared against `threshold` photons.
LeakedNoise leaked_noise(double mu, const CavityParams& c, double threshold = 1.0);

struct SystemInput {
  std::string name;
  double t2 = 0.0;  // s
  double k = 0.0;   // Hz/(V/cm)
  /// Tabulated field to compare against (V/cm).
  std::optional<double> expected_e0;
};

struct SystemRow {
  std::string name;
  double t2 = 0.0;
  double k = 0.0;
  double e0 = 0.0;
  std::optional<double> expected_e0;
  /// |e0 - expected| / expected, when an expectation is given.
  std::optional<double> deviation;
  /// deviation above the tolerance.
  bool inconsistent = false;
};

/// e0 = 1 / (4 k t2) for each row (Stark pulse as long as the coherence time).
std::vector<SystemRow> table_e0(const std::vector<SystemInput>& rows, double tolerance = 0.10);

/// Optical Eu:YSO, Er:CaWO4, NV and 151Eu:YSO nuclear spin rows with their tabulated fields.
std::vector<SystemInput> builtin_systems();

}  // namespace semm
