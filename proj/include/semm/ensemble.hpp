#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <variant>
#include <vector>

#include "semm/bloch.hpp"
#include "semm/distributions.hpp"

namespace semm {

/// Population (t1) and coherence (t2) lifetimes in seconds; infinity disables relaxation.
struct RelaxationSpec {
  double t1 = std::numeric_limits<double>::infinity();
  double t2 = std::numeric_limits<double>::infinity();

  void validate() const;
  bool operator==(const RelaxationSpec&) const = default;
};

struct MonteCarloSampling {
  std::uint64_t seed = 0;
  bool operator==(const MonteCarloSampling&) const = default;
};

/// Tensor-product quadrature: n_centers / 2 = line nodes * stark_nodes.
/// stark_nodes == 0 picks a split automatically.
struct QuadratureSampling {
  std::size_t stark_nodes = 0;
  bool operator==(const QuadratureSampling&) const = default;
};

struct EnsembleSpec {
  DistributionSpec line_shape = delta(0.0);
  DistributionSpec stark_shape = delta(0.0);
  std::size_t n_centers = 2;
  std::variant<MonteCarloSampling, QuadratureSampling> sampling = QuadratureSampling{};
  RelaxationSpec relaxation;

  void validate() const;
  bool operator==(const EnsembleSpec&) const = default;
};

/// One emitter. Stark shift under field E is parity * stark_coeff * E.
struct Center {
  double detuning = 0.0;
  double stark_coeff = 0.0;
  int parity = 1;
  BlochVector state;
  double weight = 0.0;
};

/// Structure-of-arrays storage. Centers [0, half) have parity +1 and
/// center i + half is the parity -1 partner of center i.
class Ensemble {
 public:
  Ensemble() = default;
  Ensemble(std::vector<double> detuning, std::vector<double> stark, std::vector<double> weight,
           RelaxationSpec relaxation);

  std::size_t size() const noexcept { return detuning_.size(); }
  std::size_t half() const noexcept { return detuning_.size() / 2; }
  int parity(std::size_t i) const noexcept { return i < half() ? 1 : -1; }
  const RelaxationSpec& relaxation() const noexcept { return relaxation_; }

  Center center(std::size_t i) const;
  std::vector<Center> centers() const;
  void set_state(std::size_t i, const BlochVector& state);
  void reset_states();

  std::span<const double> detuning() const noexcept { return detuning_; }
  std::span<const double> stark() const noexcept { return stark_; }
  std::span<const double> weight() const noexcept { return weight_; }
  std::span<const double> u() const noexcept { return u_; }
  std::span<const double> v() const noexcept { return v_; }
  std::span<const double> w() const noexcept { return w_; }
  std::span<double> u() noexcept { return u_; }
  std::span<double> v() noexcept { return v_; }
  std::span<double> w() noexcept { return w_; }

  /// Weighted coherence sum over all centers.
  std::complex<double> polarization() const;
  /// Weighted mean of w.
  double population() const;

 private:
  std::vector<double> detuning_;
  std::vector<double> stark_;
  std::vector<double> weight_;
  std::vector<double> u_;
  std::vector<double> v_;
  std::vector<double> w_;
  RelaxationSpec relaxation_;
};

Ensemble build_ensemble(const EnsembleSpec& spec);

/// Line/Stark node split used by quadrature sampling for this spec.
std::size_t resolved_stark_nodes(const EnsembleSpec& spec);

}  // namespace semm
