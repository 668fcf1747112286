#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace semm {

/// Nodes and positive weights of a discrete rule. Weights of a probability rule sum to one.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }
  void append(const QuadratureRule& other, double scale);
  void normalize();
};

/// Gauss-Legendre rule of the given order on [-1, 1].
QuadratureRule gauss_legendre(std::size_t order);

/// Composite Gauss-Legendre over consecutive panels `edges[i]..edges[i+1]`
/// using `n` nodes in total. Orders differ by at most one between panels.
/// Weights are the plain integration weights (not normalized).
QuadratureRule composite_gauss_legendre(std::span<const double> edges, std::size_t n);

}  // namespace semm
