#pragma once

// Brute-force references for the closed-form kernels and the sparse
// contraction engine. Slow by construction; each avoids the code path it
// checks.

#include <span>

#include <Eigen/Core>

#include "hetwig/engine.hpp"
#include "hetwig/states.hpp"

namespace hetwig::oracles {

struct QuadratureSpec {
  int nodes_per_panel = 20;
  int panels = 48;
  double half_width = 12.0;
};

/// (1/pi) int psi_m(q+y) psi_n(q-y) e^{-2ipy} dy by composite Gauss-Legendre,
/// with Hermite functions from the explicit polynomial sum. This is the Wigner
/// kernel of |m><n|. Requires m, n <= 12.
Complex wigner_quadrature(int m, int n, double q, double p, const QuadratureSpec& spec = {});

struct SeriesResult {
  Complex value;
  /// Upper bound on the truncated tail.
  double tail_bound = 0.0;
  /// Tail bound above 1e-10.
  bool flagged = false;
};

/// <n| exp(xi a^dag - conj(xi) a) |m> from the truncated exponential series.
SeriesResult displaced_series(int n, Complex xi, int m, int terms = 64);

/// Explicit Euler product U pi U^dagger with U = exp(i sz phi) exp(i sy theta).
Eigen::Matrix2cd euler_spin_kernel(const SpinAngle& angle);

/// Tr[rho Pi] from an explicit dense density matrix and a Kronecker-product
/// kernel over the Fock levels that occur in rho. Dimension is capped at 4096.
/// Displaced kets are rejected.
Complex dense_contract(const DensityOperator& rho, const ReductionPlan& plan,
                       std::span<const SpinAngle> group_angles = {});

}  // namespace hetwig::oracles
