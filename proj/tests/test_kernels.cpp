#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "hetwig/kernels.hpp"
#include "hetwig/oracles.hpp"
#include "hetwig/quadrature.hpp"

using namespace hetwig;
using Catch::Matchers::WithinAbs;

namespace {

Eigen::Matrix2cd pauli(int k) {
  const Complex i{0.0, 1.0};
  Eigen::Matrix2cd s;
  if (k == 0) s << 0, 1, 1, 0;
  if (k == 1) s << 0, -i, i, 0;
  if (k == 2) s << 1, 0, 0, -1;
  return s;
}

}  // namespace

TEST_CASE("spin kernel at the pole is the bare parity", "[kernels]") {
  const auto k = spin_kernel({0.0, 0.0});
  CHECK_THAT(k(0, 0).real(), WithinAbs((1 + kSqrt3) / 2, 1e-15));
  CHECK_THAT(k(1, 1).real(), WithinAbs((1 - kSqrt3) / 2, 1e-15));
  CHECK(std::abs(k(0, 1)) < 1e-15);

  const auto s = spin_kernel({kPi / 2, 0.0});
  CHECK_THAT(s(0, 0).real(), WithinAbs((1 - kSqrt3) / 2, 1e-15));
  CHECK_THAT(s(1, 1).real(), WithinAbs((1 + kSqrt3) / 2, 1e-15));
}

TEST_CASE("spin kernel at (pi/4, pi/4) is (I + sqrt3 sigma_y)/2", "[kernels]") {
  const Eigen::Matrix2cd expected = 0.5 * (Eigen::Matrix2cd::Identity() + kSqrt3 * pauli(1));
  CHECK((spin_kernel({kPi / 4, kPi / 4}) - expected).norm() < 1e-15);
}

TEST_CASE("spin kernel matches the explicit rotation product", "[kernels]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> th(0.0, kPi / 2), ph(0.0, kPi);
  for (int i = 0; i < 200; ++i) {
    const SpinAngle a{th(rng), ph(rng)};
    const auto k = spin_kernel(a);
    CHECK((k - oracles::euler_spin_kernel(a)).norm() < 1e-14);
    CHECK((k - k.adjoint()).norm() < 1e-14);
    CHECK_THAT(k.trace().real(), WithinAbs(1.0, 1e-14));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(k);
    CHECK_THAT(es.eigenvalues()(0), WithinAbs((1 - kSqrt3) / 2, 1e-14));
    CHECK_THAT(es.eigenvalues()(1), WithinAbs((1 + kSqrt3) / 2, 1e-14));
    // Kernel is (I + sqrt3 n.sigma)/2 along kernel_direction.
    const Eigen::Vector3d n = kernel_direction(a);
    Eigen::Matrix2cd rebuilt = 0.5 * Eigen::Matrix2cd::Identity();
    for (int c = 0; c < 3; ++c) rebuilt += 0.5 * kSqrt3 * n(c) * pauli(c);
    CHECK((k - rebuilt).norm() < 1e-14);
  }
}

TEST_CASE("spin kernel integrates to the identity", "[kernels]") {
  const auto rule = spin_product_rule(64, 64);
  Eigen::Matrix2cd acc = Eigen::Matrix2cd::Zero();
  for (std::size_t i = 0; i < rule.points.size(); ++i) acc += rule.weights[i] * spin_kernel(rule.points[i]);
  CHECK((acc - Eigen::Matrix2cd::Identity()).norm() < 1e-12);
}

TEST_CASE("spin kernel is templated on the scalar", "[kernels]") {
  const auto kf = spin_kernel<float>(0.3f, 1.1f);
  const auto kd = spin_kernel<double>(0.3, 1.1);
  CHECK((kf.cast<std::complex<double>>() - kd).norm() < 1e-6);
  const auto kl = spin_kernel<long double>(0.3L, 1.1L);
  CHECK((kl.cast<std::complex<double>>() - kd).norm() < 1e-15);
}

TEST_CASE("hermite wavefunctions", "[kernels]") {
  CHECK_THAT(hermite_wavefunction(0, 0.0, Representation::position).real(),
             WithinAbs(std::pow(kPi, -0.25), 1e-15));
  CHECK_THAT(std::abs(hermite_wavefunction(1, 0.0, Representation::position)), WithinAbs(0.0, 1e-15));
  // H_2(1) = 2: psi_2(1) = 2 e^{-1/2} / sqrt(8 sqrt(pi)).
  const double psi21 = 2.0 * std::exp(-0.5) / std::sqrt(8.0 * std::sqrt(kPi));
  CHECK_THAT(hermite_wavefunction(2, 1.0, Representation::position).real(), WithinAbs(psi21, 1e-15));
  // Momentum form carries (-i)^n.
  const Complex m3 = hermite_wavefunction(3, 0.7, Representation::momentum);
  CHECK_THAT(m3.real(), WithinAbs(0.0, 1e-15));
  CHECK_THAT(m3.imag(), WithinAbs(hermite_function(3, 0.7), 1e-15));

  CHECK_NOTHROW(hermite_functions<double>(200, 3.0));
  CHECK_THROWS_AS(hermite_functions<double>(201, 0.0), std::domain_error);
  CHECK_THROWS_AS(hermite_wavefunction(-1, 0.0, Representation::position), std::domain_error);
}

TEST_CASE("hermite functions are orthonormal up to high order", "[kernels]") {
  const auto gh = gauss_hermite(150);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(61, 61);
  for (Eigen::Index k = 0; k < gh.size(); ++k) {
    const double x = gh.nodes(k);
    const Eigen::ArrayXd psi = hermite_functions<double>(60, x);
    gram += gh.weights(k) * std::exp(x * x) * (psi.matrix() * psi.matrix().transpose());
  }
  CHECK((gram - Eigen::MatrixXd::Identity(61, 61)).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("displaced fock elements", "[kernels]") {
  const Complex xi{0.7, 0.3};
  CHECK_THAT(displaced_fock_element(0, xi, 0).real(), WithinAbs(std::exp(-std::norm(xi) / 2), 1e-15));
  for (int n = 0; n < 6; ++n) {
    for (int m = 0; m < 6; ++m) {
      CHECK(displaced_fock_element(n, 0.0, m) == Complex(n == m ? 1.0 : 0.0, 0.0));
    }
  }
  const auto series = oracles::displaced_series(2, xi, 1);
  REQUIRE_FALSE(series.flagged);
  CHECK(std::abs(displaced_fock_element(2, xi, 1) - series.value) < 1e-12);
}

TEST_CASE("displaced fock elements agree with the series and are unitary", "[kernels]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 100; ++trial) {
    const Complex xi{u(rng), u(rng)};
    const int n = static_cast<int>(rng() % 9), m = static_cast<int>(rng() % 9);
    const auto s = oracles::displaced_series(n, xi, m, 96);
    REQUIRE_FALSE(s.flagged);
    CHECK(std::abs(displaced_fock_element(n, xi, m) - s.value) < 1e-12);
    CHECK(std::abs(displaced_fock_element(n, xi, m) - std::conj(displaced_fock_element(m, -xi, n))) < 1e-12);
  }
  // Columns of D(xi) stay normalized.
  const Complex xi{1.1, -0.4};
  for (int m = 0; m < 4; ++m) {
    double col = 0.0;
    for (int n = 0; n < 80; ++n) col += std::norm(displaced_fock_element(n, xi, m));
    CHECK_THAT(col, WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("displaced fock elements survive large indices", "[kernels]") {
  const Complex v = displaced_fock_element(150, Complex(3.0, 1.0), 140);
  CHECK(std::isfinite(v.real()));
  CHECK(std::isfinite(v.imag()));
  CHECK(std::abs(v) <= 1.0);
}

TEST_CASE("mode kernel examples", "[kernels]") {
  const ModeEntry g0{{0.0, 0.0}, 0}, g1{{0.0, 0.0}, 1}, g2{{0.0, 0.0}, 2};
  CHECK_THAT(mode_kernel(g0, g0, Fixed{{0.0, 0.0}}).real(), WithinAbs(1.0 / kPi, 1e-15));
  CHECK_THAT(mode_kernel(g1, g1, Fixed{{0.0, 0.0}}).real(), WithinAbs(-1.0 / kPi, 1e-15));
  const Complex w20 = mode_kernel(g2, g0, Fixed{{0.5, -0.3}});
  CHECK(std::abs(w20 - oracles::wigner_quadrature(2, 0, 0.5, -0.3)) < 1e-8);
  CHECK_THROWS_AS(mode_kernel(g0, g0, Fixed{{NAN, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(mode_kernel(g0, g0, PositionMarginal{INFINITY}), std::invalid_argument);
}

TEST_CASE("mode kernel is hermitian in its arguments", "[kernels]") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (int trial = 0; trial < 100; ++trial) {
    const ModeEntry a{{u(rng), u(rng)}, static_cast<int>(rng() % 5)};
    const ModeEntry b{{u(rng), u(rng)}, static_cast<int>(rng() % 5)};
    for (const ModeDirective& d : {ModeDirective{Trace{}}, ModeDirective{Fixed{{u(rng), u(rng)}}},
                                   ModeDirective{PositionMarginal{u(rng)}},
                                   ModeDirective{MomentumMarginal{u(rng)}}}) {
      CHECK(std::abs(mode_kernel(a, b, d) - std::conj(mode_kernel(b, a, d))) < 1e-14);
    }
  }
}

TEST_CASE("mode kernel marginals integrate the full kernel", "[kernels]") {
  const auto gh = gauss_hermite(60);
  for (int m = 0; m <= 6; ++m) {
    for (int n = 0; n <= 6; ++n) {
      const ModeEntry a{{0.0, 0.0}, m}, b{{0.0, 0.0}, n};
      for (double q : {-1.5, 0.0, 0.8}) {
        Complex acc{0.0, 0.0};
        for (Eigen::Index k = 0; k < gh.size(); ++k) {
          const double p = gh.nodes(k);
          acc += gh.weights(k) * std::exp(p * p) * mode_kernel(a, b, Fixed{{q, p}});
        }
        CHECK(std::abs(acc - mode_kernel(a, b, PositionMarginal{q})) < 1e-8);
        // Momentum marginal by integrating over q.
        Complex accp{0.0, 0.0};
        for (Eigen::Index k = 0; k < gh.size(); ++k) {
          const double x = gh.nodes(k);
          accp += gh.weights(k) * std::exp(x * x) * mode_kernel(a, b, Fixed{{x, q}});
        }
        CHECK(std::abs(accp - mode_kernel(a, b, MomentumMarginal{q})) < 1e-8);
      }
    }
  }
}

TEST_CASE("displaced mode kernels agree with shifted quadrature", "[kernels]") {
  // W of D(beta)|m><n|D(beta)^dag is the undisplaced kernel shifted by beta.
  const Complex beta{0.4, -0.6};
  const double q0 = std::sqrt(2.0) * beta.real(), p0 = std::sqrt(2.0) * beta.imag();
  for (int m = 0; m <= 3; ++m) {
    for (int n = 0; n <= 3; ++n) {
      const ModeEntry a{beta, m}, b{beta, n};
      const Complex w = mode_kernel(a, b, Fixed{{0.3, 0.9}});
      CHECK(std::abs(w - oracles::wigner_quadrature(m, n, 0.3 - q0, 0.9 - p0)) < 1e-9);
    }
  }
}

TEST_CASE("displaced wavefunctions are translated eigenfunctions", "[kernels]") {
  const ModeEntry e{{0.5, 0.0}, 2};  // real displacement shifts q by 0.5 sqrt2
  const double s = 0.5 * std::sqrt(2.0);
  for (double x : {-1.0, 0.2, 1.7}) {
    CHECK(std::abs(displaced_wavefunction(e, x, Representation::position) - hermite_function(2, x - s)) < 1e-15);
  }
  // Trace directive is the exact overlap.
  const ModeEntry a{{0.3, 0.2}, 1}, b{{-0.4, 0.1}, 0};
  const auto gh = gauss_hermite(80);
  Complex acc{0.0, 0.0};
  for (Eigen::Index k = 0; k < gh.size(); ++k) {
    const double x = gh.nodes(k);
    acc += gh.weights(k) * std::exp(x * x) * mode_kernel(a, b, PositionMarginal{x});
  }
  CHECK(std::abs(acc - mode_kernel(a, b, Trace{})) < 1e-10);
}
