#include "semm/noise.hpp"

#include <cmath>

#include "semm/error.hpp"

namespace semm {

void CavityParams::validate() const {
  if (!(finesse > 0.0) || !std::isfinite(finesse)) throw ValidationError("finesse", "must be positive");
  if (!(opacity >= 0.0) || !std::isfinite(opacity)) throw ValidationError("opacity", "must be nonnegative");
}

double spontaneous_photons(const CavityParams& c) {
  c.validate();
  const double fd = c.finesse * c.opacity;
  if (fd > 700.0) throw RangeError("F*d = " + std::to_string(fd) + " overflows exp (limit 700)");
  return c.finesse * std::expm1(fd);
}

LeakedNoise leaked_noise(double mu, const CavityParams& c, double threshold) {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw ValidationError("mu", "must be nonnegative");
  if (!(threshold > 0.0)) throw ValidationError("threshold", "must be positive");
  LeakedNoise out;
  out.photons = mu * spontaneous_photons(c);
  out.single_photon_ok = out.photons < threshold;
  return out;
}

std::vector<SystemRow> table_e0(const std::vector<SystemInput>& rows, double tolerance) {
  std::vector<SystemRow> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SystemInput& in = rows[i];
    const std::string field = "rows[" + std::to_string(i) + "]";
    if (!(in.t2 > 0.0) || !std::isfinite(in.t2)) throw ValidationError(field + ".t2", "must be positive");
    if (!(in.k > 0.0) || !std::isfinite(in.k)) throw ValidationError(field + ".k", "must be positive");
    SystemRow row;
    row.name = in.name;
    row.t2 = in.t2;
    row.k = in.k;
    row.e0 = 1.0 / (4.0 * in.k * in.t2);
    row.expected_e0 = in.expected_e0;
    if (in.expected_e0) {
      if (!(*in.expected_e0 > 0.0)) throw ValidationError(field + ".expected_e0", "must be positive");
      row.deviation = std::abs(row.e0 - *in.expected_e0) / *in.expected_e0;
      row.inconsistent = *row.deviation > tolerance;
    }
    out.push_back(row);
  }
  return out;
}

std::vector<SystemInput> builtin_systems() {
  return {
      {"Eu:YSO optical", 2.6e-3, 27000.0, 0.005},
      {"Er:CaWO4", 5e-5, 399.0, 12.0},
      {"NV diamond", 1.8e-3, 17.0, 8.2},
      {"151Eu:YSO nuclear", 0.026, 0.1, 9.6},
  };
}

}  // namespace semm
