#include "hetwig/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <variant>

namespace hetwig {
namespace {

// (-i)^n
Complex minus_i_power(int n) {
  switch (n % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

// Generalized Laguerre polynomial L_j^{(a)}(x) by upward recurrence.
double laguerre(int j, int a, double x) {
  double prev = 1.0;
  if (j == 0) return prev;
  double cur = 1.0 + a - x;
  for (int i = 1; i < j; ++i) {
    const double next = ((2.0 * i + 1.0 + a - x) * cur - (i + a) * prev) / (i + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::invalid_argument(std::string("non-finite ") + what);
}

}  // namespace

Complex hermite_wavefunction(int n, double x, Representation rep) {
  const double psi = hermite_function<double>(n, x);
  if (rep == Representation::position) return {psi, 0.0};
  return minus_i_power(n) * psi;
}

Complex displaced_fock_element(int n, Complex xi, int m) {
  if (n < 0 || m < 0) throw std::domain_error("negative Fock index");
  if (!std::isfinite(xi.real()) || !std::isfinite(xi.imag())) {
    throw std::invalid_argument("non-finite displacement");
  }
  if (xi == Complex(0.0, 0.0)) return n == m ? Complex(1.0, 0.0) : Complex(0.0, 0.0);

  // <n|D|m> = sqrt(m!/n!) xi^{n-m} e^{-|xi|^2/2} L_m^{(n-m)}(|xi|^2)   for n >= m,
  // and the mirrored form with (-conj xi) otherwise.
  const double x = std::norm(xi);
  const int lo = std::min(n, m);
  const int k = std::abs(n - m);
  const Complex base = n >= m ? xi : -std::conj(xi);
  const double log_mag = 0.5 * (std::lgamma(lo + 1.0) - std::lgamma(lo + k + 1.0)) - 0.5 * x +
                         (k > 0 ? k * std::log(std::abs(base)) : 0.0);
  const double phase = k * std::arg(base);
  return std::polar(std::exp(log_mag), phase) * laguerre(lo, k, x);
}

Complex displaced_wavefunction(const ModeEntry& entry, double x, Representation rep) {
  const double q0 = std::numbers::sqrt2 * entry.displacement.real();
  const double p0 = std::numbers::sqrt2 * entry.displacement.imag();
  if (rep == Representation::position) {
    const Complex phase = std::polar(1.0, p0 * x - 0.5 * q0 * p0);
    return phase * hermite_wavefunction(entry.fock, x - q0, Representation::position);
  }
  const Complex phase = std::polar(1.0, 0.5 * q0 * p0 - q0 * x);
  return phase * hermite_wavefunction(entry.fock, x - p0, Representation::momentum);
}

Complex mode_kernel(const ModeEntry& ket, const ModeEntry& bra, const ModeDirective& directive) {
  const Complex beta = ket.displacement;
  const Complex gamma = bra.displacement;
  return std::visit(
      [&](const auto& d) -> Complex {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, Trace>) {
          // D^dag(gamma) D(beta) = e^{i Im(conj(gamma) beta)} D(beta - gamma)
          const double phi = std::imag(std::conj(gamma) * beta);
          return std::polar(1.0, phi) * displaced_fock_element(bra.fock, beta - gamma, ket.fock);
        } else if constexpr (std::is_same_v<D, Fixed>) {
          require_finite(d.point.q, "phase-space position");
          require_finite(d.point.p, "phase-space momentum");
          // (1/pi) <bra| D(a) Parity D^dag(a) |ket> collapses to a single
          // displaced-Fock element at 2a - beta - gamma.
          const Complex a = d.point.alpha();
          const double phi = std::imag(std::conj(gamma) * a) + std::imag(std::conj(a) * beta) +
                             std::imag((a - gamma) * std::conj(a - beta));
          const double parity = (ket.fock % 2 == 0) ? 1.0 : -1.0;
          return parity / kPi * std::polar(1.0, phi) *
                 displaced_fock_element(bra.fock, 2.0 * a - beta - gamma, ket.fock);
        } else if constexpr (std::is_same_v<D, PositionMarginal>) {
          require_finite(d.q, "position");
          return displaced_wavefunction(ket, d.q, Representation::position) *
                 std::conj(displaced_wavefunction(bra, d.q, Representation::position));
        } else {
          require_finite(d.p, "momentum");
          return displaced_wavefunction(ket, d.p, Representation::momentum) *
                 std::conj(displaced_wavefunction(bra, d.p, Representation::momentum));
        }
      },
      directive);
}

}  // namespace hetwig
