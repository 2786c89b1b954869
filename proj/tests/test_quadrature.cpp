#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "hetwig/quadrature.hpp"

using namespace hetwig;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("gauss-hermite integrates even moments", "[quadrature]") {
  const auto r = gauss_hermite(20);
  CHECK_THAT(r.weights.sum(), WithinRel(std::sqrt(kPi), 1e-14));
  // int x^{2k} e^{-x^2} = Gamma(k + 1/2)
  for (int k = 1; k < 10; ++k) {
    CHECK_THAT((r.weights.array() * r.nodes.array().pow(2 * k)).sum(), WithinRel(std::tgamma(k + 0.5), 1e-12));
  }
  CHECK_THAT((r.weights.array() * r.nodes.array().pow(5)).sum(), WithinAbs(0.0, 1e-12));
}

TEST_CASE("gauss-legendre on an interval", "[quadrature]") {
  const auto r = gauss_legendre(12, 0.0, 2.0);
  CHECK_THAT(r.weights.sum(), WithinRel(2.0, 1e-14));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) acc += r.weights(i) * std::exp(r.nodes(i));
  CHECK_THAT(acc, WithinRel(std::exp(2.0) - 1.0, 1e-14));
  CHECK_THROWS(gauss_legendre(0));
  CHECK_THROWS(gauss_hermite(0));
}

TEST_CASE("spin product rule carries the sin(2 theta) measure", "[quadrature]") {
  const auto r = spin_product_rule(32, 32);
  CHECK(r.points.size() == 32 * 32);
  CHECK_THAT(std::accumulate(r.weights.begin(), r.weights.end(), 0.0), WithinRel(2.0, 1e-14));
  for (const auto& a : r.points) {
    CHECK(a.theta >= 0.0);
    CHECK(a.theta <= kPi / 2);
    CHECK(a.phi >= 0.0);
    CHECK(a.phi < kPi);
  }
  // int cos^2(2 theta) dmu = 2/3
  double acc = 0.0;
  for (std::size_t i = 0; i < r.points.size(); ++i) acc += r.weights[i] * std::pow(std::cos(2 * r.points[i].theta), 2);
  CHECK_THAT(acc, WithinRel(2.0 / 3.0, 1e-13));
}
