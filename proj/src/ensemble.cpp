#include "semm/ensemble.hpp"

#include <cmath>
#include <random>

#include "semm/error.hpp"
#include "semm/simd/kernels.hpp"

namespace semm {

void RelaxationSpec::validate() const {
  if (!(t1 > 0.0)) throw ValidationError("relaxation.t1", "must be positive");
  if (!(t2 > 0.0)) throw ValidationError("relaxation.t2", "must be positive");
  if (std::isfinite(t1) && std::isfinite(t2) && t2 > 2.0 * t1)
    throw ValidationError("relaxation.t2", "must not exceed 2 * t1");
}

void EnsembleSpec::validate() const {
  semm::validate(line_shape);
  semm::validate(stark_shape);
  if (n_centers < 2 || n_centers % 2 != 0) throw ValidationError("n_centers", "must be even and at least 2");
  relaxation.validate();
  if (const auto* q = std::get_if<QuadratureSampling>(&sampling)) {
    if (q->stark_nodes != 0 && (n_centers / 2) % q->stark_nodes != 0)
      throw ValidationError("sampling.stark_nodes", "must divide n_centers / 2");
  }
}

Ensemble::Ensemble(std::vector<double> detuning, std::vector<double> stark, std::vector<double> weight,
                   RelaxationSpec relaxation)
    : detuning_(std::move(detuning)),
      stark_(std::move(stark)),
      weight_(std::move(weight)),
      relaxation_(relaxation) {
  if (detuning_.size() != stark_.size() || detuning_.size() != weight_.size() || detuning_.size() % 2 != 0)
    throw ValidationError("ensemble", "inconsistent center arrays");
  reset_states();
}

Center Ensemble::center(std::size_t i) const {
  return Center{detuning_[i], stark_[i], parity(i), BlochVector{u_[i], v_[i], w_[i]}, weight_[i]};
}

std::vector<Center> Ensemble::centers() const {
  std::vector<Center> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(center(i));
  return out;
}

void Ensemble::set_state(std::size_t i, const BlochVector& state) {
  u_[i] = state.u;
  v_[i] = state.v;
  w_[i] = state.w;
}

void Ensemble::reset_states() {
  u_.assign(size(), 0.0);
  v_.assign(size(), 0.0);
  w_.assign(size(), -1.0);
}

std::complex<double> Ensemble::polarization() const {
  return active_kernels().coherence_sum(u_.data(), v_.data(), weight_.data(), size());
}

double Ensemble::population() const {
  return active_kernels().population_sum(w_.data(), weight_.data(), size());
}

std::size_t resolved_stark_nodes(const EnsembleSpec& spec) {
  const std::size_t half = spec.n_centers / 2;
  const auto* q = std::get_if<QuadratureSampling>(&spec.sampling);
  if (q != nullptr && q->stark_nodes != 0) return q->stark_nodes;
  if (std::holds_alternative<Delta>(spec.stark_shape.kind)) return 1;
  if (std::holds_alternative<Delta>(spec.line_shape.kind)) return half;
  std::size_t best = 1;
  for (std::size_t m = 1; m * m <= half; ++m)
    if (half % m == 0) best = m;
  return best;
}

Ensemble build_ensemble(const EnsembleSpec& spec) {
  spec.validate();
  const std::size_t half = spec.n_centers / 2;
  std::vector<double> detuning(spec.n_centers);
  std::vector<double> stark(spec.n_centers);
  std::vector<double> weight(spec.n_centers);

  if (const auto* mc = std::get_if<MonteCarloSampling>(&spec.sampling)) {
    std::mt19937_64 rng(mc->seed);
    const double w = 1.0 / static_cast<double>(spec.n_centers);
    for (std::size_t i = 0; i < half; ++i) {
      detuning[i] = draw(spec.line_shape, rng);
      // A negative coefficient is the same pair with parities exchanged.
      stark[i] = std::abs(draw(spec.stark_shape, rng));
      weight[i] = w;
    }
  } else {
    const std::size_t stark_nodes = resolved_stark_nodes(spec);
    const std::size_t line_nodes = half / stark_nodes;
    const QuadratureRule line = quadrature(spec.line_shape, line_nodes);
    const QuadratureRule coeff = quadrature(spec.stark_shape, stark_nodes);
    for (std::size_t d = 0; d < line_nodes; ++d) {
      for (std::size_t k = 0; k < stark_nodes; ++k) {
        const std::size_t i = d * stark_nodes + k;
        detuning[i] = line.nodes[d];
        stark[i] = std::abs(coeff.nodes[k]);
        weight[i] = 0.5 * line.weights[d] * coeff.weights[k];
      }
    }
  }
  for (std::size_t i = 0; i < half; ++i) {
    detuning[i + half] = detuning[i];
    stark[i + half] = stark[i];
    weight[i + half] = weight[i];
  }
  return Ensemble(std::move(detuning), std::move(stark), std::move(weight), spec.relaxation);
}

}  // namespace semm
