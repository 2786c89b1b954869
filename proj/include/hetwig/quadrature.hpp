#pragma once

#include <vector>

#include <Eigen/Core>

#include "hetwig/types.hpp"

namespace hetwig {

/// Nodes and weights of a one-dimensional Gauss rule.
struct GaussRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;

  Eigen::Index size() const { return nodes.size(); }
};

/// Gauss-Hermite rule for int f(x) e^{-x^2} dx (Golub-Welsch).
GaussRule gauss_hermite(int n);

/// Gauss-Legendre rule on [a, b] (Golub-Welsch).
GaussRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Product rule over the doubled-angle rectangle [0, pi/2] x [0, pi) with the
/// measure (2/pi) sin(2 theta) folded into the weights. The weights sum to 2.
struct SpinQuadrature {
  std::vector<SpinAngle> points;
  std::vector<double> weights;
};

SpinQuadrature spin_product_rule(int n_theta, int n_phi);

/// Quadrature orders used by the integrating diagnostics.
struct QuadratureConfig {
  int hermite_nodes = 40;
  int spin_theta = 32;
  int spin_phi = 32;
};

}  // namespace hetwig
