#include "hetwig/quadrature.hpp"

#include "hetwig/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace hetwig {
namespace {

// Golub-Welsch: eigen-decomposition of the symmetric Jacobi matrix.
GaussRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag, double mu0) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, offdiag, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw std::runtime_error("Golub-Welsch eigensolve failed");
  GaussRule rule;
  rule.nodes = solver.eigenvalues();
  rule.weights = mu0 * solver.eigenvectors().row(0).transpose().array().square();
  return rule;
}

}  // namespace

GaussRule gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("Gauss-Hermite needs at least one node");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) off(k - 1) = std::sqrt(0.5 * k);
  GaussRule rule = golub_welsch(diag, off, std::sqrt(kPi));
  if (n > kMaxHermiteOrder) return rule;

  // Eigenvector components lose the tail weights (they drop below 1e-32 long
  // before the true ones do). Polish each node by Newton on psi_n, then use
  //   w_i = exp(-x_i^2) / (n psi_{n-1}(x_i)^2).
  for (Eigen::Index i = 0; i < n; ++i) {
    double x = rule.nodes(i);
    for (int it = 0; it < 3; ++it) {
      const auto psi = hermite_functions<double>(n, x);
      x -= psi(n) / (std::sqrt(2.0 * n) * psi(n - 1));
    }
    const double prev = hermite_functions<double>(n, x)(n - 1);
    rule.nodes(i) = x;
    rule.weights(i) = std::exp(-x * x - std::log(static_cast<double>(n)) - 2.0 * std::log(std::abs(prev)));
  }
  return rule;
}

GaussRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("Gauss-Legendre needs at least one node");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) off(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  GaussRule rule = golub_welsch(diag, off, 2.0);
  const double half = 0.5 * (b - a);
  rule.nodes = (rule.nodes.array() * half + 0.5 * (a + b)).matrix();
  rule.weights *= half;
  return rule;
}

SpinQuadrature spin_product_rule(int n_theta, int n_phi) {
  const GaussRule th = gauss_legendre(n_theta, 0.0, kPi / 2);
  const GaussRule ph = gauss_legendre(n_phi, 0.0, kPi);
  SpinQuadrature q;
  q.points.reserve(static_cast<std::size_t>(n_theta) * n_phi);
  q.weights.reserve(q.points.capacity());
  for (Eigen::Index i = 0; i < th.size(); ++i) {
    const double wt = th.weights(i) * (2.0 / kPi) * std::sin(2.0 * th.nodes(i));
    for (Eigen::Index j = 0; j < ph.size(); ++j) {
      q.points.push_back({th.nodes(i), ph.nodes(j)});
      q.weights.push_back(wt * ph.weights(j));
    }
  }
  return q;
}

}  // namespace hetwig
