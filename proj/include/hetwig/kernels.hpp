#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Core>

#include "hetwig/types.hpp"

namespace hetwig {

template <typename Scalar>
using Kernel2 = Eigen::Matrix<std::complex<Scalar>, 2, 2>;

using HermitianKernel2 = Kernel2<double>;

/// Largest Fock index accepted by the oscillator eigenfunctions.
inline constexpr int kMaxHermiteOrder = 200;

/// Displaced spin parity U(theta, phi) pi U^dagger with pi = (1 + sqrt(3) sigma_z) / 2.
///
/// Closed form: (I + sqrt(3) n.sigma) / 2 with
/// n = (-sin 2theta cos 2phi, sin 2theta sin 2phi, cos 2theta).
/// Basis order is (up, down), so entry (0,0) is <up|kernel|up>.
template <typename Scalar>
Kernel2<Scalar> spin_kernel(Scalar theta, Scalar phi) {
  using C = std::complex<Scalar>;
  const Scalar s3 = std::numbers::sqrt3_v<Scalar>;
  const Scalar half = Scalar(1) / Scalar(2);
  const Scalar nx = -std::sin(2 * theta) * std::cos(2 * phi);
  const Scalar ny = std::sin(2 * theta) * std::sin(2 * phi);
  const Scalar nz = std::cos(2 * theta);
  Kernel2<Scalar> k;
  k(0, 0) = C(half * (1 + s3 * nz), 0);
  k(1, 1) = C(half * (1 - s3 * nz), 0);
  k(0, 1) = half * s3 * C(nx, -ny);
  k(1, 0) = half * s3 * C(nx, ny);
  return k;
}

inline HermitianKernel2 spin_kernel(const SpinAngle& angle) {
  return spin_kernel<double>(angle.theta, angle.phi);
}

/// Unit Bloch direction the kernel at `angle` points along.
inline Eigen::Vector3d kernel_direction(const SpinAngle& angle) {
  return {-std::sin(2 * angle.theta) * std::cos(2 * angle.phi),
          std::sin(2 * angle.theta) * std::sin(2 * angle.phi), std::cos(2 * angle.theta)};
}

/// psi_0 .. psi_{n_max} at x via the normalized three-term recurrence
///   psi_{k+1} = sqrt(2/(k+1)) x psi_k - sqrt(k/(k+1)) psi_{k-1}.
template <typename Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, 1> hermite_functions(int n_max, Scalar x) {
  if (n_max < 0 || n_max > kMaxHermiteOrder) {
    throw std::domain_error("hermite order out of range [0, 200]");
  }
  Eigen::Array<Scalar, Eigen::Dynamic, 1> psi(n_max + 1);
  psi(0) = std::pow(std::numbers::pi_v<Scalar>, Scalar(-0.25)) * std::exp(-x * x / 2);
  if (n_max >= 1) psi(1) = std::sqrt(Scalar(2)) * x * psi(0);
  for (int k = 1; k < n_max; ++k) {
    psi(k + 1) = std::sqrt(Scalar(2) / Scalar(k + 1)) * x * psi(k) -
                 std::sqrt(Scalar(k) / Scalar(k + 1)) * psi(k - 1);
  }
  return psi;
}

template <typename Scalar>
Scalar hermite_function(int n, Scalar x) {
  return hermite_functions<Scalar>(n, x)(n);
}

enum class Representation { position, momentum };

/// Oscillator eigenfunction in the position or momentum representation.
/// The momentum form is (-i)^n psi_n(p) for the transform (2pi)^{-1/2} int psi(q) e^{-iqp} dq.
Complex hermite_wavefunction(int n, double x, Representation rep);

/// <n| D(xi) |m> with D(xi) = exp(xi a^dagger - conj(xi) a).
Complex displaced_fock_element(int n, Complex xi, int m);

/// Contribution of one oscillator factor to Tr[|ket><bra| kernel].
///
///  - Trace:            <bra|ket>
///  - Fixed(q, p):      Wigner kernel of |ket><bra| at (q, p), normalized so
///                      that int W dq dp = Tr for a density operator
///  - PositionMarginal: phi_ket(q) conj(phi_bra(q))
///  - MomentumMarginal: same in the momentum representation
///
/// Throws std::invalid_argument for non-finite phase points.
Complex mode_kernel(const ModeEntry& ket, const ModeEntry& bra, const ModeDirective& directive);

/// Position (or momentum) wavefunction of D(displacement)|fock>.
Complex displaced_wavefunction(const ModeEntry& entry, double x, Representation rep);

}  // namespace hetwig
