#include "semm/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace semm {

void QuadratureRule::append(const QuadratureRule& other, double scale) {
  nodes.insert(nodes.end(), other.nodes.begin(), other.nodes.end());
  for (double w : other.weights) weights.push_back(w * scale);
}

void QuadratureRule::normalize() {
  double total = 0.0;
  for (double w : weights) total += w;
  for (double& w : weights) w /= total;
}

namespace {

QuadratureRule compute_gauss_legendre(std::size_t order) {
  QuadratureRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const auto n = static_cast<double>(order);
  for (std::size_t i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= order; ++k) {
        const auto kd = static_cast<double>(k);
        const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
  return rule;
}

}  // namespace

QuadratureRule gauss_legendre(std::size_t order) {
  if (order == 0) throw std::invalid_argument("gauss_legendre: order must be positive");
  if (order == 1) return QuadratureRule{{0.0}, {2.0}};
  static std::mutex mutex;
  static std::map<std::size_t, QuadratureRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_gauss_legendre(order)).first;
  return it->second;
}

QuadratureRule composite_gauss_legendre(std::span<const double> edges, std::size_t n) {
  if (edges.size() < 2) throw std::invalid_argument("composite_gauss_legendre: need at least one panel");
  const std::size_t panels = edges.size() - 1;
  if (n < panels) throw std::invalid_argument("composite_gauss_legendre: fewer nodes than panels");
  const std::size_t base = n / panels;
  const std::size_t extra = n % panels;
  QuadratureRule out;
  out.nodes.reserve(n);
  out.weights.reserve(n);
  for (std::size_t p = 0; p < panels; ++p) {
    const QuadratureRule gl = gauss_legendre(base + (p < extra ? 1 : 0));
    const double mid = 0.5 * (edges[p] + edges[p + 1]);
    const double half = 0.5 * (edges[p + 1] - edges[p]);
    for (std::size_t i = 0; i < gl.size(); ++i) {
      out.nodes.push_back(mid + half * gl.nodes[i]);
      out.weights.push_back(half * gl.weights[i]);
    }
  }
  return out;
}

}  // namespace semm
