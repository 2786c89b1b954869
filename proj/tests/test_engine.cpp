#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "hetwig/engine.hpp"
#include "hetwig/kernels.hpp"
#include "hetwig/states.hpp"

using namespace hetwig;
using Catch::Matchers::WithinAbs;

namespace {

DensityOperator pure(const StateVector& psi) { return DensityOperator::pure(psi); }

ReductionPlan all_equal(std::size_t n) { return ReductionPlan(std::vector<Directive>(n, EqualAngle{0})); }

/// Plan with electron `e`'s modes at position q and its spin at `angle`, the rest traced.
ReductionPlan electron_point(const SystemSignature& sig, int e, const Eigen::Vector3d& q, SpinAngle angle) {
  ReductionPlan plan = ReductionPlan::traced(sig);
  const auto modes = sig.modes_of(e);
  for (std::size_t k = 0; k < modes.size(); ++k) plan[modes[k]] = PositionMarginal{q(static_cast<Eigen::Index>(k))};
  plan[sig.spin_of(e).value()] = SphereAngle{angle};
  return plan;
}

}  // namespace

TEST_CASE("evaluate: reference examples", "[engine]") {
  const auto singlet = pure(reference_spin_state('e'));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> th(0.0, kPi / 2), ph(0.0, kPi);
  for (int i = 0; i < 50; ++i) {
    const SpinAngle a{th(rng), ph(rng)};
    const auto w = evaluate(singlet, all_equal(2), std::span(&a, 1));
    CHECK_THAT(w.value, WithinAbs(-0.5, 1e-12));
    CHECK(w.residual < 1e-10);
  }
  const auto up = pure(reference_spin_state('a'));
  const SpinAngle pole{0.0, 0.0};
  CHECK_THAT(evaluate(up, all_equal(1), std::span(&pole, 1)).value, WithinAbs((1 + kSqrt3) / 2, 1e-15));

  const auto h1s = pure(spin_orbital(OrbitalLabel::s1, Spin::up));
  const ReductionPlan fixed0({Fixed{}, Fixed{}, Fixed{}, Trace{}});
  CHECK_THAT(evaluate(h1s, fixed0).value, WithinAbs(std::pow(kPi, -3), 1e-15));
}

TEST_CASE("evaluate rejects malformed plans", "[engine]") {
  const auto rho = pure(spin_orbital(OrbitalLabel::s1, Spin::up));
  CHECK_THROWS_AS(evaluate(rho, ReductionPlan({Trace{}, Trace{}, Trace{}})), std::invalid_argument);
  CHECK_THROWS_AS(evaluate(rho, ReductionPlan({Trace{}, Trace{}, Trace{}, Fixed{}})), std::invalid_argument);
  CHECK_THROWS_AS(evaluate(rho, ReductionPlan({SphereAngle{}, Trace{}, Trace{}, Trace{}})), std::invalid_argument);
  CHECK_THROWS_AS(evaluate(rho, ReductionPlan({Trace{}, Trace{}, Trace{}, EqualAngle{1}})), std::invalid_argument);
  // Missing angle for group 0.
  CHECK_THROWS_AS(evaluate(rho, ReductionPlan({Trace{}, Trace{}, Trace{}, EqualAngle{0}})), std::invalid_argument);
  CHECK_THROWS_AS(evaluate(rho, ReductionPlan({Fixed{{NAN, 0.0}}, Trace{}, Trace{}, Trace{}})), std::invalid_argument);
}

TEST_CASE("position density", "[engine]") {
  const auto h1s = pure(spin_orbital(OrbitalLabel::s1, Spin::up));
  CHECK_THAT(position_density(h1s, 1, Eigen::Vector3d::Zero()), WithinAbs(std::pow(kPi, -1.5), 1e-12));

  // 2 H2(z) - H2(x) - H2(y) = 4 (2z^2 - x^2 - y^2): d_z2 vanishes on that cone.
  const auto dz2 = pure(spin_orbital(OrbitalLabel::d3z2, Spin::up));
  const double lobe = position_density(dz2, 1, {0.0, 0.0, 1.0});
  for (double r : {0.5, 1.0, 2.0}) {
    const double z = r / std::sqrt(2.0);
    CHECK(position_density(dz2, 1, {r, 0.0, z}) < 1e-15 * lobe);
    CHECK(position_density(dz2, 1, {r * 0.6, r * 0.8, -z}) < 1e-15 * lobe);
  }

  // Helium ground: either electron sees |1S(q)|^2.
  const auto he = pure(helium_state(HeliumState::ground));
  const Eigen::Vector3d q{0.3, -0.7, 1.1};
  const double expected = std::pow(kPi, -1.5) * std::exp(-q.squaredNorm());
  CHECK_THAT(position_density(he, 1, q), WithinAbs(expected, 1e-14));
  CHECK_THAT(position_density(he, 2, q), WithinAbs(expected, 1e-14));
}

TEST_CASE("position density equals the spin-integrated slice", "[engine]") {
  const auto rho = pure(jm_state(5, 1));
  const auto rule = spin_product_rule(32, 32);
  const Eigen::Vector3d q{0.4, 0.2, -0.9};
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.points.size(); ++i) {
    acc += rule.weights[i] * evaluate(rho, electron_point(rho.signature(), 1, q, rule.points[i])).value;
  }
  CHECK_THAT(acc, WithinAbs(position_density(rho, 1, q), 1e-12));
}

TEST_CASE("bloch field", "[engine]") {
  const auto dz2 = pure(spin_orbital(OrbitalLabel::d3z2, Spin::up));
  const auto b = bloch_field(dz2, 1, {0.4, -0.3, 1.2});
  CHECK_FALSE(b.underflow);
  CHECK((b.vector - Eigen::Vector3d(0, 0, 1)).norm() < 1e-12);

  const auto jm = pure(jm_state(5, 1));
  // Along the z axis only d_z2 survives.
  const auto axis = bloch_field(jm, 1, {0.0, 0.0, 0.8});
  CHECK((axis.vector - Eigen::Vector3d(0, 0, 1)).norm() < 1e-12);
  // On the d_z2 node cone only the down branch survives.
  const double r = 1.3;
  const auto cone = bloch_field(jm, 1, {r * 0.6, r * 0.8, r / std::sqrt(2.0)});
  CHECK_FALSE(cone.underflow);
  CHECK((cone.vector - Eigen::Vector3d(0, 0, -1)).norm() < 1e-9);
  // At the origin every orbital component vanishes: the flag is raised.
  const auto origin = bloch_field(jm, 1, Eigen::Vector3d::Zero());
  CHECK(origin.underflow);
  CHECK(origin.vector.isZero());
}

TEST_CASE("moment identity", "[engine]") {
  const auto rho = pure(jm_state(5, 1));
  const auto rule = spin_product_rule(32, 32);
  for (const Eigen::Vector3d q : {Eigen::Vector3d(0.5, 0.3, 0.7), Eigen::Vector3d(-1.1, 0.2, 0.4)}) {
    Eigen::Vector3d m = Eigen::Vector3d::Zero();
    double norm = 0.0;
    for (std::size_t i = 0; i < rule.points.size(); ++i) {
      const double w = evaluate(rho, electron_point(rho.signature(), 1, q, rule.points[i])).value;
      m += rule.weights[i] * w * kernel_direction(rule.points[i]);
      norm += rule.weights[i] * w;
    }
    CHECK((kSqrt3 * m / norm - bloch_field(rho, 1, q).vector).norm() < 1e-9);
  }
  const Eigen::Vector3d s = spin_moment(rho, 1);
  CHECK_THAT(s.z(), WithinAbs(0.2, 1e-9));
  CHECK_THAT(s.x(), WithinAbs(0.0, 1e-9));
  CHECK_THAT(s.y(), WithinAbs(0.0, 1e-9));
}

TEST_CASE("entanglement entropy", "[engine]") {
  const auto jm = jm_state(5, 1);
  const std::vector<std::size_t> spin{3};
  CHECK_THAT(entanglement_entropy(jm, spin), WithinAbs(0.971, 1e-3));
  // -(3/5) log2(3/5) - (2/5) log2(2/5)
  CHECK_THAT(entanglement_entropy(jm, spin), WithinAbs(-0.6 * std::log2(0.6) - 0.4 * std::log2(0.4), 1e-12));
  CHECK_THAT(entanglement_entropy(jm, jm.signature().modes_of(1)), WithinAbs(entanglement_entropy(jm, spin), 1e-12));

  const std::vector<std::size_t> first{0};
  CHECK_THAT(entanglement_entropy(reference_spin_state('e'), first), WithinAbs(1.0, 1e-12));
  CHECK_THAT(entanglement_entropy(spin_orbital(OrbitalLabel::d3z2, Spin::up), spin), WithinAbs(0.0, 1e-12));

  // Non-orthogonal displaced kets: the double pi bond is a spatial product
  // times a singlet, so the spins carry exactly one bit.
  const auto bond = pi_bond(BondKind::double_, 0.8);
  const std::vector<std::size_t> spins{3, 7};
  CHECK_THAT(entanglement_entropy(bond, spins), WithinAbs(0.0, 1e-9));
  const std::vector<std::size_t> s1{3};
  CHECK_THAT(entanglement_entropy(bond, s1), WithinAbs(1.0, 1e-9));

  StateVector unnormalized = jm;
  unnormalized *= 2.0;
  CHECK_THROWS_AS(entanglement_entropy(unnormalized, spin), std::invalid_argument);
}

TEST_CASE("overlap", "[engine]") {
  const auto he = pure(helium_state(HeliumState::ground));
  CHECK_THAT(overlap(he, he), WithinAbs(1.0, 1e-12));
  CHECK_THAT(overlap(pure(reference_spin_state('e')), pure(reference_spin_state('f'))), WithinAbs(0.0, 1e-15));
  CHECK_THAT(overlap(he, pure(helium_state(HeliumState::singlet1))), WithinAbs(0.0, 1e-14));
  CHECK_THROWS_AS(overlap(he, pure(reference_spin_state('e'))), std::invalid_argument);
}

TEST_CASE("normalization by full quadrature", "[engine]") {
  for (const auto& psi : {spin_orbital(OrbitalLabel::s2, Spin::down), jm_state(5, 1), jm_state(3, -1),
                          helium_state(HeliumState::triplet_m0), lithium_state()}) {
    CHECK_THAT(integrate_wigner(pure(psi)), WithinAbs(1.0, 1e-6));
  }
  for (char p = 'a'; p <= 'h'; ++p) CHECK_THAT(integrate_wigner(pure(reference_spin_state(p))), WithinAbs(1.0, 1e-10));
}

TEST_CASE("traciality", "[engine]") {
  const std::vector<StateVector> states{spin_orbital(OrbitalLabel::s1, Spin::up), spin_orbital(OrbitalLabel::p2z, Spin::down),
                                        jm_state(5, 1), jm_state(3, 1), spin_orbital(bonding_orbital(0.9), Spin::up)};
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (std::size_t j = i; j < states.size(); ++j) {
      const auto a = pure(states[i]), b = pure(states[j]);
      CHECK_THAT(phase_space_overlap(a, b), WithinAbs(overlap(a, b), 1e-6));
    }
  }
  const auto s = pure(reference_spin_state('e')), t = pure(reference_spin_state('d'));
  CHECK_THAT(phase_space_overlap(s, t), WithinAbs(overlap(s, t), 1e-10));
}

TEST_CASE("electron relabeling leaves indistinguishable states invariant", "[engine]") {
  const auto li = pure(lithium_state());
  const auto& sig = li.signature();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    // Fixed point for electron A, marginal for B, trace for C; then swap roles.
    const PhasePoint pa{u(rng), u(rng)};
    const double qb = u(rng);
    const SpinAngle ang{std::abs(u(rng)) / 2, std::abs(u(rng)) * 2};
    auto plan_for = [&](int a, int b) {
      ReductionPlan p = ReductionPlan::traced(sig);
      p[sig.index_of(Factor::mode(Axis::x, a))] = Fixed{pa};
      p[sig.index_of(Factor::mode(Axis::z, b))] = PositionMarginal{qb};
      p[sig.spin_of(a).value()] = SphereAngle{ang};
      p[sig.spin_of(b).value()] = EqualAngle{0};
      return p;
    };
    const SpinAngle g{0.3, 1.2};
    const double w12 = evaluate(li, plan_for(1, 2), std::span(&g, 1)).value;
    const double w21 = evaluate(li, plan_for(2, 1), std::span(&g, 1)).value;
    const double w31 = evaluate(li, plan_for(3, 1), std::span(&g, 1)).value;
    CHECK_THAT(w21, WithinAbs(w12, 1e-12));
    CHECK_THAT(w31, WithinAbs(w12, 1e-12));
  }
}

TEST_CASE("lithium slice (d) conditional spin state", "[engine]") {
  // Spins 2, 3 conditioned on electron 1 at (0, 0, 3). In the oscillator
  // model the singlet fidelity is (2R + 1)/(2R + 4) with R = (2 z^2 - 3)^2/6.
  const auto li = pure(lithium_state());
  const auto& sig = li.signature();
  ReductionPlan plan = ReductionPlan::traced(sig);
  const auto modes = sig.modes_of(1);
  plan[modes[0]] = PositionMarginal{0.0};
  plan[modes[1]] = PositionMarginal{0.0};
  plan[modes[2]] = PositionMarginal{3.0};
  plan[sig.spin_of(2).value()] = EqualAngle{0};
  plan[sig.spin_of(3).value()] = EqualAngle{0};
  const auto c = conditional_spin_operator(li, plan);
  REQUIRE(c.op.rows() == 4);
  Eigen::Vector4cd singlet(0, 1, -1, 0);
  singlet /= std::sqrt(2.0);
  const double fidelity = (singlet.adjoint() * c.op * singlet)(0).real() / c.trace();
  const double r = std::pow(2 * 9.0 - 3, 2) / 6.0;
  CHECK_THAT(fidelity, WithinAbs((2 * r + 1) / (2 * r + 4), 1e-12));
}

TEST_CASE("conditional operator reproduces evaluate", "[engine]") {
  const auto rho = pure(lithium_state());
  const auto& sig = rho.signature();
  ReductionPlan plan = ReductionPlan::traced(sig);
  for (auto f : sig.modes_of(1)) plan[f] = PositionMarginal{0.4};
  for (int e : {1, 2, 3}) plan[sig.spin_of(e).value()] = EqualAngle{0};
  const auto c = conditional_spin_operator(rho, plan);
  for (const SpinAngle a : {SpinAngle{0.0, 0.0}, SpinAngle{0.7, 2.1}, SpinAngle{1.3, 0.4}}) {
    const std::vector<SpinAngle> three(3, a);
    CHECK_THAT(contract(c, spin_kernel_product(three)), WithinAbs(evaluate(rho, plan, std::span(&a, 1)).value, 1e-14));
  }
}
