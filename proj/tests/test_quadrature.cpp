#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "semm/quadrature.hpp"

using namespace semm;

TEST(quadrature, gauss_legendre_integrates_polynomials_exactly) {
  for (std::size_t order : {1u, 2u, 5u, 16u, 64u}) {
    const QuadratureRule r = gauss_legendre(order);
    ASSERT_EQ(r.size(), order);
    for (std::size_t p = 0; p < 2 * order; ++p) {
      double sum = 0.0;
      for (std::size_t i = 0; i < order; ++i) sum += r.weights[i] * std::pow(r.nodes[i], static_cast<double>(p));
      const double exact = p % 2 == 1 ? 0.0 : 2.0 / static_cast<double>(p + 1);
      EXPECT_NEAR(sum, exact, 1e-13) << "order " << order << " power " << p;
    }
  }
}

TEST(quadrature, gauss_legendre_nodes_sorted_and_symmetric) {
  const QuadratureRule r = gauss_legendre(33);
  for (std::size_t i = 0; i + 1 < r.size(); ++i) EXPECT_LT(r.nodes[i], r.nodes[i + 1]);
  for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(r.nodes[i], -r.nodes[r.size() - 1 - i], 1e-15);
}

TEST(quadrature, composite_rule_splits_nodes) {
  const double edges[] = {0.0, 1.0, 3.0, 3.5};
  const QuadratureRule r = composite_gauss_legendre(edges, 30);
  ASSERT_EQ(r.size(), 30u);
  double length = 0.0;
  double moment = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    length += r.weights[i];
    moment += r.weights[i] * std::exp(r.nodes[i]);
  }
  EXPECT_NEAR(length, 3.5, 1e-14);
  EXPECT_NEAR(moment, std::exp(3.5) - 1.0, 1e-9);
}

TEST(quadrature, normalize_and_append) {
  QuadratureRule a{{0.0, 1.0}, {1.0, 3.0}};
  a.normalize();
  EXPECT_DOUBLE_EQ(a.weights[0], 0.25);
  QuadratureRule b{{5.0}, {1.0}};
  a.append(b, 0.5);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_DOUBLE_EQ(a.weights[2], 0.5);
}
