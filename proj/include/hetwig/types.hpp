#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <variant>

namespace hetwig {

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSqrt3 = std::numbers::sqrt3;

/// Doubled-angle coordinates of the spin kernel.
///
/// theta lives in [0, pi/2] and phi in [0, pi). The kernel depends only on
/// 2*theta and 2*phi, so this rectangle already covers the whole Bloch sphere.
/// A sphere-surface direction (Theta, Phi_az) maps to (Theta/2, Phi_az/2).
struct SpinAngle {
  double theta = 0.0;
  double phi = 0.0;
};

/// Dimensionless phase-space point (hbar = m = omega = 1).
struct PhasePoint {
  double q = 0.0;
  double p = 0.0;

  /// Coherent amplitude alpha = (q + i p) / sqrt(2).
  Complex alpha() const { return Complex(q, p) / std::numbers::sqrt2; }
};

/// One oscillator factor of a product ket: D(displacement)|fock>.
struct ModeEntry {
  Complex displacement{0.0, 0.0};
  int fock = 0;

  friend bool operator==(const ModeEntry&, const ModeEntry&) = default;
};

enum class Spin : std::uint8_t { up = 0, down = 1 };

inline int spin_index(Spin s) { return static_cast<int>(s); }

// Per-factor reduction directives. Mode factors accept Trace, Fixed,
// PositionMarginal and MomentumMarginal; spin factors accept Trace,
// SphereAngle and EqualAngle.
struct Trace {};
struct Fixed {
  PhasePoint point;
};
struct PositionMarginal {
  double q = 0.0;
};
struct MomentumMarginal {
  double p = 0.0;
};
struct SphereAngle {
  SpinAngle angle;
};
struct EqualAngle {
  int group = 0;
};

using ModeDirective = std::variant<Trace, Fixed, PositionMarginal, MomentumMarginal>;
using Directive =
    std::variant<Trace, Fixed, PositionMarginal, MomentumMarginal, SphereAngle, EqualAngle>;

}  // namespace hetwig
