#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hetwig/engine.hpp"
#include "hetwig/kernels.hpp"
#include "hetwig/oracles.hpp"
#include "hetwig/states.hpp"

using namespace hetwig;
using Catch::Matchers::WithinAbs;

TEST_CASE("wigner quadrature examples", "[oracles]") {
  CHECK_THAT(oracles::wigner_quadrature(0, 0, 0, 0).real(), WithinAbs(1 / kPi, 1e-12));
  CHECK_THAT(oracles::wigner_quadrature(1, 1, 0, 0).real(), WithinAbs(-1 / kPi, 1e-12));
  // Gaussian closed form away from the origin.
  CHECK_THAT(oracles::wigner_quadrature(0, 0, 0.8, -1.1).real(),
             WithinAbs(std::exp(-0.64 - 1.21) / kPi, 1e-12));
  CHECK_THROWS_AS(oracles::wigner_quadrature(13, 0, 0, 0), std::domain_error);
  CHECK_THROWS_AS(oracles::wigner_quadrature(0, 0, 0, 0, {8, 10, 10.0}), std::invalid_argument);
}

TEST_CASE("displaced series examples", "[oracles]") {
  const Complex xi{0.6, -0.2};
  const auto s0 = oracles::displaced_series(0, xi, 0);
  CHECK_FALSE(s0.flagged);
  CHECK(std::abs(s0.value - std::exp(-std::norm(xi) / 2)) < s0.tail_bound + 1e-15);
  CHECK(oracles::displaced_series(2, 0.0, 2).value == Complex(1.0, 0.0));
  CHECK(oracles::displaced_series(2, 0.0, 3).value == Complex(0.0, 0.0));
  CHECK_THROWS_AS(oracles::displaced_series(0, xi, 0, 16), std::invalid_argument);
  // Large displacements with the default cutoff cannot certify the tail.
  CHECK(oracles::displaced_series(0, Complex(6.0, 0.0), 0).flagged);
}

TEST_CASE("dense contraction examples", "[oracles]") {
  const SpinAngle pole{0.0, 0.0}, tilt{kPi / 4, 0.0};
  const ReductionPlan two({EqualAngle{0}, EqualAngle{0}});
  const auto singlet = DensityOperator::pure(reference_spin_state('e'));
  CHECK_THAT(oracles::dense_contract(singlet, two, std::span(&tilt, 1)).real(), WithinAbs(-0.5, 1e-14));
  const auto t0 = DensityOperator::pure(reference_spin_state('f'));
  CHECK_THAT(oracles::dense_contract(t0, two, std::span(&pole, 1)).real(), WithinAbs(-0.5, 1e-14));
  CHECK_THAT(oracles::dense_contract(t0, two, std::span(&tilt, 1)).real(), WithinAbs(1.0, 1e-14));
  const auto upup = DensityOperator::pure(reference_spin_state('c'));
  CHECK_THAT(oracles::dense_contract(upup, two, std::span(&pole, 1)).real(),
             WithinAbs(std::pow((1 + kSqrt3) / 2, 2), 1e-14));

  const auto bond = DensityOperator::pure(pi_bond(BondKind::single, 1.0));
  CHECK_THROWS_AS(oracles::dense_contract(bond, ReductionPlan::traced(bond.signature())), std::invalid_argument);
}

TEST_CASE("dense contraction refuses oversized bases", "[oracles]") {
  // 4 electrons in 2S-like superpositions: (3 levels)^12 x 2^4 exceeds the cap.
  std::vector<StateVector> orbitals;
  for (auto [label, spin] : {std::pair{OrbitalLabel::s2, Spin::up}, {OrbitalLabel::s2, Spin::down},
                             {OrbitalLabel::d3z2, Spin::up}, {OrbitalLabel::d3z2, Spin::down}}) {
    orbitals.push_back(spin_orbital(label, spin));
  }
  const auto rho = DensityOperator::pure(slater_determinant(orbitals));
  CHECK_THROWS_AS(oracles::dense_contract(rho, ReductionPlan::traced(rho.signature())), std::length_error);
}

namespace {

/// Random undisplaced state over `electrons` electrons with Fock levels <= 2.
StateVector random_state(std::mt19937_64& rng, int electrons, int terms) {
  std::normal_distribution<double> g;
  const auto sig = SystemSignature::electrons(electrons);
  StateVector psi(sig);
  for (int t = 0; t < terms; ++t) {
    ProductKet k;
    for (const auto& f : sig) {
      if (f.is_spin()) {
        k.entries.emplace_back(rng() % 2 ? Spin::up : Spin::down);
      } else {
        k.entries.emplace_back(ModeEntry{{0.0, 0.0}, static_cast<int>(rng() % 3)});
      }
    }
    psi.add(Complex(g(rng), g(rng)), std::move(k));
  }
  return psi.normalized();
}

ReductionPlan random_plan(std::mt19937_64& rng, const SystemSignature& sig) {
  std::uniform_real_distribution<double> u(-2.0, 2.0), th(0.0, kPi / 2), ph(0.0, kPi);
  std::vector<Directive> d;
  for (const auto& f : sig) {
    const auto pick = rng() % 4;
    if (f.is_spin()) {
      if (pick == 0) d.emplace_back(Trace{});
      else if (pick == 1) d.emplace_back(SphereAngle{{th(rng), ph(rng)}});
      else d.emplace_back(EqualAngle{0});
    } else {
      if (pick == 0) d.emplace_back(Trace{});
      else if (pick == 1) d.emplace_back(Fixed{{u(rng), u(rng)}});
      else if (pick == 2) d.emplace_back(PositionMarginal{u(rng)});
      else d.emplace_back(MomentumMarginal{u(rng)});
    }
  }
  // Make sure group 0 is used so a single angle list always fits.
  d[sig.spin_of(1).value()] = EqualAngle{0};
  return ReductionPlan(std::move(d));
}

}  // namespace

TEST_CASE("engine agrees with the dense oracle on 1000 random cases", "[oracles][randomized]") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> th(0.0, kPi / 2), ph(0.0, kPi);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int electrons = 1 + static_cast<int>(trial % 2);
    const auto rho = DensityOperator::pure(random_state(rng, electrons, 1 + static_cast<int>(rng() % 4)));
    const auto plan = random_plan(rng, rho.signature());
    const SpinAngle angle{th(rng), ph(rng)};
    const auto w = evaluate(rho, plan, std::span(&angle, 1));
    const Complex dense = oracles::dense_contract(rho, plan, std::span(&angle, 1));
    worst = std::max(worst, std::abs(Complex(w.value, 0.0) - dense));
    CHECK(w.residual < 1e-10);
  }
  CHECK(worst < 1e-8);
}
