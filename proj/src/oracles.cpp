#include "hetwig/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

namespace hetwig::oracles {
namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// psi_n from H_n(x) = n! sum_k (-1)^k (2x)^{n-2k} / (k! (n-2k)!).
double hermite_by_sum(int n, double x) {
  double h = 0.0;
  for (int k = 0; 2 * k <= n; ++k) {
    const double term = std::pow(2.0 * x, n - 2 * k) / (factorial(k) * factorial(n - 2 * k));
    h += (k % 2 == 0 ? term : -term);
  }
  h *= factorial(n);
  return h * std::exp(-0.5 * x * x) / std::sqrt(std::pow(2.0, n) * factorial(n) * std::sqrt(kPi));
}

// Gauss-Legendre on [-1, 1] by Newton iteration on P_n.
void legendre_rule(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[static_cast<std::size_t>(i)] = z;
    w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

Complex directive_mode_element(const Directive& d, int k, int b) {
  // Value of Tr[|k><b| kernel] for undisplaced Fock levels.
  if (std::holds_alternative<Trace>(d)) return k == b ? 1.0 : 0.0;
  if (const auto* f = std::get_if<Fixed>(&d)) return wigner_quadrature(k, b, f->point.q, f->point.p);
  if (const auto* pm = std::get_if<PositionMarginal>(&d)) {
    return hermite_by_sum(k, pm->q) * hermite_by_sum(b, pm->q);
  }
  const double p = std::get<MomentumMarginal>(d).p;
  auto phase = [](int n) { return std::pow(Complex(0.0, -1.0), n); };
  return phase(k) * hermite_by_sum(k, p) * std::conj(phase(b) * hermite_by_sum(b, p));
}

}  // namespace

Complex wigner_quadrature(int m, int n, double q, double p, const QuadratureSpec& spec) {
  if (m < 0 || n < 0 || m > 12 || n > 12) throw std::domain_error("wigner_quadrature needs m, n <= 12");
  if (spec.nodes_per_panel < 16) throw std::invalid_argument("quadrature needs >= 16 nodes per panel");
  std::vector<double> x, w;
  legendre_rule(spec.nodes_per_panel, x, w);
  const double h = 2.0 * spec.half_width / spec.panels;
  Complex acc{0.0, 0.0};
  for (int panel = 0; panel < spec.panels; ++panel) {
    const double mid = -spec.half_width + (panel + 0.5) * h;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double y = mid + 0.5 * h * x[i];
      const double f = hermite_by_sum(m, q + y) * hermite_by_sum(n, q - y);
      acc += 0.5 * h * w[i] * f * std::polar(1.0, -2.0 * p * y);
    }
  }
  return acc / kPi;
}

SeriesResult displaced_series(int n, Complex xi, int m, int terms) {
  if (n < 0 || m < 0) throw std::domain_error("negative Fock index");
  if (terms < 32) throw std::invalid_argument("displaced_series needs at least 32 terms");
  const int levels = m + terms + 2;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(levels);
  v(m) = 1.0;
  Complex sum = n < levels ? v(n) : Complex(0.0, 0.0);
  for (int j = 1; j <= terms; ++j) {
    // v <- (xi a^dag - conj(xi) a) v / j
    Eigen::VectorXcd next = Eigen::VectorXcd::Zero(levels);
    for (int k = 0; k < levels; ++k) {
      if (k > 0) next(k) += xi * std::sqrt(double(k)) * v(k - 1);
      if (k + 1 < levels) next(k) -= std::conj(xi) * std::sqrt(double(k + 1)) * v(k + 1);
    }
    v = next / double(j);
    if (n < levels) sum += v(n);
  }
  // ||v_{j+1}|| <= r_j ||v_j|| with r_j = 2|xi| sqrt(m + j + 1)/(j + 1), decreasing in j.
  const double r = 2.0 * std::abs(xi) * std::sqrt(double(m + terms + 1)) / (terms + 1);
  SeriesResult out;
  out.value = sum;
  out.tail_bound = r < 1.0 ? v.norm() * r / (1.0 - r) : std::numeric_limits<double>::infinity();
  out.flagged = !(out.tail_bound <= 1e-10);
  return out;
}

Eigen::Matrix2cd euler_spin_kernel(const SpinAngle& angle) {
  const Complex i{0.0, 1.0};
  Eigen::Matrix2cd rz, ry, pi;
  rz << std::exp(i * angle.phi), 0.0, 0.0, std::exp(-i * angle.phi);
  const double c = std::cos(angle.theta), s = std::sin(angle.theta);
  ry << c, s, -s, c;  // exp(i sigma_y theta)
  pi << 0.5 * (1.0 + std::sqrt(3.0)), 0.0, 0.0, 0.5 * (1.0 - std::sqrt(3.0));
  const Eigen::Matrix2cd u = rz * ry;
  return u * pi * u.adjoint();
}

Complex dense_contract(const DensityOperator& rho, const ReductionPlan& plan,
                       std::span<const SpinAngle> group_angles) {
  const auto& sig = rho.signature();
  plan.validate(sig);
  if (group_angles.size() < static_cast<std::size_t>(plan.group_count())) {
    throw std::invalid_argument("missing angles for equal-angle groups");
  }
  const std::size_t nf = sig.size();

  // Per-factor basis: Fock levels in use, or {up, down}.
  std::vector<std::vector<int>> levels(nf);
  for (std::size_t f = 0; f < nf; ++f) {
    if (sig[f].is_spin()) levels[f] = {0, 1};
  }
  for (const auto& t : rho.terms()) {
    for (const auto* k : {&t.ket, &t.bra}) {
      for (std::size_t f = 0; f < nf; ++f) {
        if (const auto* m = std::get_if<ModeEntry>(&k->entries[f])) {
          if (m->displacement != Complex(0.0, 0.0)) {
            throw std::invalid_argument("dense_contract does not expand displaced kets");
          }
          auto& l = levels[f];
          if (std::find(l.begin(), l.end(), m->fock) == l.end()) l.push_back(m->fock);
        }
      }
    }
  }
  Eigen::Index dim = 1;
  for (auto& l : levels) {
    std::sort(l.begin(), l.end());
    dim *= static_cast<Eigen::Index>(l.size());
    if (dim > 4096) throw std::length_error("dense dimension exceeds 4096");
  }

  auto flat_index = [&](const ProductKet& k) {
    Eigen::Index idx = 0;
    for (std::size_t f = 0; f < nf; ++f) {
      const int level = std::visit(
          [](const auto& e) -> int {
            if constexpr (std::is_same_v<std::decay_t<decltype(e)>, ModeEntry>) {
              return e.fock;
            } else {
              return spin_index(e);
            }
          },
          k.entries[f]);
      const auto& l = levels[f];
      idx = idx * static_cast<Eigen::Index>(l.size()) +
            (std::lower_bound(l.begin(), l.end(), level) - l.begin());
    }
    return idx;
  };

  Eigen::MatrixXcd dense = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : rho.terms()) dense(flat_index(t.ket), flat_index(t.bra)) += t.coeff;

  Eigen::MatrixXcd kernel = Eigen::MatrixXcd::Ones(1, 1);
  for (std::size_t f = 0; f < nf; ++f) {
    const auto& l = levels[f];
    const auto n = static_cast<Eigen::Index>(l.size());
    Eigen::MatrixXcd kf(n, n);
    const Directive& d = plan[f];
    if (sig[f].is_spin()) {
      if (std::holds_alternative<Trace>(d)) {
        kf = Eigen::Matrix2cd::Identity();
      } else if (const auto* s = std::get_if<SphereAngle>(&d)) {
        kf = euler_spin_kernel(s->angle);
      } else {
        kf = euler_spin_kernel(group_angles[static_cast<std::size_t>(std::get<EqualAngle>(d).group)]);
      }
    } else {
      // kf(b, k) = Tr[|k><b| kernel]
      for (Eigen::Index b = 0; b < n; ++b) {
        for (Eigen::Index k = 0; k < n; ++k) kf(b, k) = directive_mode_element(d, l[k], l[b]);
      }
    }
    kernel = Eigen::kroneckerProduct(kernel, kf).eval();
  }
  // Tr[rho K] with rho = sum dense(k, b) |k><b|.
  return dense.cwiseProduct(kernel.transpose()).sum();
}

}  // namespace hetwig::oracles
