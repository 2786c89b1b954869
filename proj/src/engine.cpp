#include "hetwig/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "hetwig/kernels.hpp"

namespace hetwig {
namespace {

bool is_mode_directive(const Directive& d) {
  return std::holds_alternative<Trace>(d) || std::holds_alternative<Fixed>(d) ||
         std::holds_alternative<PositionMarginal>(d) || std::holds_alternative<MomentumMarginal>(d);
}

bool is_spin_directive(const Directive& d) {
  return std::holds_alternative<Trace>(d) || std::holds_alternative<SphereAngle>(d) ||
         std::holds_alternative<EqualAngle>(d);
}

ModeDirective as_mode_directive(const Directive& d) {
  return std::visit(
      [](const auto& x) -> ModeDirective {
        using D = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<D, SphereAngle> || std::is_same_v<D, EqualAngle>) {
          throw std::invalid_argument("spin directive on a mode factor");
        } else {
          return x;
        }
      },
      d);
}

void require_finite_angle(const SpinAngle& a) {
  if (!std::isfinite(a.theta) || !std::isfinite(a.phi)) {
    throw std::invalid_argument("non-finite spin angle");
  }
}

// Per-factor kernel for spins carrying an angle; empty for the rest.
std::vector<HermitianKernel2> spin_kernels_for(const ReductionPlan& plan,
                                               std::span<const SpinAngle> group_angles,
                                               bool include_equal_angle) {
  std::vector<HermitianKernel2> k(plan.size(), HermitianKernel2::Zero());
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (const auto* s = std::get_if<SphereAngle>(&plan[i])) {
      require_finite_angle(s->angle);
      k[i] = spin_kernel(s->angle);
    } else if (const auto* e = std::get_if<EqualAngle>(&plan[i]); e && include_equal_angle) {
      const SpinAngle a = group_angles[static_cast<std::size_t>(e->group)];
      require_finite_angle(a);
      k[i] = spin_kernel(a);
    }
  }
  return k;
}

// Value of factor i for one term, for factors that are not open spins.
Complex factor_value(const KetEntry& ket, const KetEntry& bra, const Directive& d,
                     const HermitianKernel2& kernel) {
  if (const auto* km = std::get_if<ModeEntry>(&ket)) {
    return mode_kernel(*km, std::get<ModeEntry>(bra), as_mode_directive(d));
  }
  const int k = spin_index(std::get<Spin>(ket));
  const int b = spin_index(std::get<Spin>(bra));
  if (std::holds_alternative<Trace>(d)) return k == b ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
  return kernel(b, k);
}

ReductionPlan position_plan(const SystemSignature& sig, int electron, const Eigen::Vector3d& q) {
  ReductionPlan plan = ReductionPlan::traced(sig);
  bool found = false;
  for (std::size_t i = 0; i < sig.size(); ++i) {
    if (sig[i].is_mode() && sig[i].electron == electron) {
      plan[i] = PositionMarginal{q(static_cast<int>(sig[i].axis))};
      found = true;
    }
  }
  if (!found) throw std::invalid_argument("electron " + std::to_string(electron) + " has no modes");
  return plan;
}

Eigen::MatrixXcd psd_sqrt(const Eigen::MatrixXcd& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g);
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

ProductKet restrict_ket(const ProductKet& k, std::span<const std::size_t> idx) {
  ProductKet out;
  out.entries.reserve(idx.size());
  for (std::size_t i : idx) out.entries.push_back(k.entries[i]);
  return out;
}

std::size_t index_in(std::vector<ProductKet>& basis, ProductKet k) {
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (basis[i] == k) return i;
  }
  basis.push_back(std::move(k));
  return basis.size() - 1;
}

Eigen::MatrixXcd gram(const std::vector<ProductKet>& basis) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = ket_overlap(basis[i], basis[j]);
  }
  return g;
}

// Sampled kernel values of one factor for one term, for the quadrature diagnostics.
struct FactorSamples {
  std::vector<PhasePoint> mode_points;
  std::vector<double> mode_weights;  // includes the e^{x^2} reweighting
  SpinQuadrature spin;
};

FactorSamples make_samples(const QuadratureConfig& config, double scale) {
  const GaussRule gh = gauss_hermite(config.hermite_nodes);
  FactorSamples s;
  for (Eigen::Index i = 0; i < gh.size(); ++i) {
    for (Eigen::Index j = 0; j < gh.size(); ++j) {
      const double xi = gh.nodes(i), xj = gh.nodes(j);
      s.mode_points.push_back({scale * xi, scale * xj});
      s.mode_weights.push_back(scale * scale * gh.weights(i) * gh.weights(j) *
                               std::exp(xi * xi + xj * xj));
    }
  }
  s.spin = spin_product_rule(config.spin_theta, config.spin_phi);
  return s;
}

Eigen::VectorXcd sample_factor(const KetEntry& ket, const KetEntry& bra, const FactorSamples& s) {
  if (const auto* km = std::get_if<ModeEntry>(&ket)) {
    const auto& bm = std::get<ModeEntry>(bra);
    Eigen::VectorXcd v(static_cast<Eigen::Index>(s.mode_points.size()));
    for (std::size_t i = 0; i < s.mode_points.size(); ++i) {
      v(static_cast<Eigen::Index>(i)) = mode_kernel(*km, bm, Fixed{s.mode_points[i]});
    }
    return v;
  }
  const int k = spin_index(std::get<Spin>(ket));
  const int b = spin_index(std::get<Spin>(bra));
  Eigen::VectorXcd v(static_cast<Eigen::Index>(s.spin.points.size()));
  for (std::size_t i = 0; i < s.spin.points.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = spin_kernel(s.spin.points[i])(b, k);
  }
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------

ReductionPlan ReductionPlan::traced(const SystemSignature& signature) {
  return ReductionPlan(std::vector<Directive>(signature.size(), Trace{}));
}

int ReductionPlan::group_count() const {
  int max_group = -1;
  for (const auto& d : directives_) {
    if (const auto* e = std::get_if<EqualAngle>(&d)) max_group = std::max(max_group, e->group);
  }
  return max_group + 1;
}

void ReductionPlan::validate(const SystemSignature& signature) const {
  if (directives_.size() != signature.size()) {
    throw std::invalid_argument("plan has " + std::to_string(directives_.size()) +
                                " directives for " + std::to_string(signature.size()) + " factors");
  }
  const int groups = group_count();
  std::vector<int> members(static_cast<std::size_t>(std::max(groups, 0)), 0);
  for (std::size_t i = 0; i < directives_.size(); ++i) {
    const auto& d = directives_[i];
    if (signature[i].is_mode() ? !is_mode_directive(d) : !is_spin_directive(d)) {
      throw std::invalid_argument("directive kind does not match factor " + signature[i].label());
    }
    if (const auto* e = std::get_if<EqualAngle>(&d)) {
      if (e->group < 0) throw std::invalid_argument("negative equal-angle group");
      ++members[static_cast<std::size_t>(e->group)];
    }
  }
  for (int g = 0; g < groups; ++g) {
    if (members[static_cast<std::size_t>(g)] == 0) {
      throw std::invalid_argument("equal-angle group " + std::to_string(g) + " is empty");
    }
  }
}

WignerValue evaluate(const DensityOperator& rho, const ReductionPlan& plan,
                     std::span<const SpinAngle> group_angles) {
  plan.validate(rho.signature());
  if (group_angles.size() < static_cast<std::size_t>(plan.group_count())) {
    throw std::invalid_argument("missing angles for equal-angle groups");
  }
  const auto kernels = spin_kernels_for(plan, group_angles, true);
  const std::size_t nf = plan.size();
  Complex acc{0.0, 0.0};
  for (const auto& t : rho.terms()) {
    Complex prod = t.coeff;
    for (std::size_t i = 0; i < nf && prod != Complex(0.0, 0.0); ++i) {
      prod *= factor_value(t.ket.entries[i], t.bra.entries[i], plan[i], kernels[i]);
    }
    acc += prod;
  }
  return {acc.real(), std::abs(acc.imag())};
}

SpinConditional conditional_spin_operator(const DensityOperator& rho, const ReductionPlan& plan) {
  plan.validate(rho.signature());
  const auto kernels = spin_kernels_for(plan, {}, false);
  SpinConditional c;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (std::holds_alternative<EqualAngle>(plan[i])) c.spins.push_back(i);
  }
  const auto dim = Eigen::Index{1} << c.spins.size();
  c.op = Eigen::MatrixXcd::Zero(dim, dim);
  std::vector<char> open(plan.size(), 0);
  for (std::size_t i : c.spins) open[i] = 1;

  for (const auto& t : rho.terms()) {
    Complex prod = t.coeff;
    for (std::size_t i = 0; i < plan.size() && prod != Complex(0.0, 0.0); ++i) {
      if (open[i]) continue;
      prod *= factor_value(t.ket.entries[i], t.bra.entries[i], plan[i], kernels[i]);
    }
    if (prod == Complex(0.0, 0.0)) continue;
    Eigen::Index kb = 0, bb = 0;
    for (std::size_t i : c.spins) {
      kb = (kb << 1) | spin_index(std::get<Spin>(t.ket.entries[i]));
      bb = (bb << 1) | spin_index(std::get<Spin>(t.bra.entries[i]));
    }
    c.op(kb, bb) += prod;
  }
  return c;
}

Eigen::MatrixXcd spin_kernel_product(std::span<const SpinAngle> angles) {
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Ones(1, 1);
  for (const auto& a : angles) {
    const HermitianKernel2 s = spin_kernel(a);
    Eigen::MatrixXcd next(k.rows() * 2, k.cols() * 2);
    for (Eigen::Index r = 0; r < 2; ++r) {
      for (Eigen::Index c = 0; c < 2; ++c) {
        // Earlier spins are more significant.
        for (Eigen::Index i = 0; i < k.rows(); ++i) {
          for (Eigen::Index j = 0; j < k.cols(); ++j) next(2 * i + r, 2 * j + c) = k(i, j) * s(r, c);
        }
      }
    }
    k = std::move(next);
  }
  return k;
}

double contract(const SpinConditional& c, const Eigen::MatrixXcd& kernel) {
  // Tr[op K] = sum_{k,b} op(k,b) K(b,k)
  return c.op.cwiseProduct(kernel.transpose()).sum().real();
}

double position_density(const DensityOperator& rho, int electron, const Eigen::Vector3d& q) {
  return evaluate(rho, position_plan(rho.signature(), electron, q)).value;
}

BlochField bloch_vector(const SpinConditional& c) {
  if (c.spins.size() != 1) throw std::invalid_argument("Bloch vector needs exactly one open spin");
  BlochField f;
  f.weight = c.trace();
  if (!(f.weight >= 1e-12)) {
    f.underflow = true;
    return f;
  }
  // rho~ = sum op(k,b)|k><b|: <sigma_x> = 2 Re op(0,1), <sigma_y> = -2 Im op(0,1).
  f.vector = Eigen::Vector3d(2.0 * c.op(0, 1).real(), -2.0 * c.op(0, 1).imag(),
                             (c.op(0, 0) - c.op(1, 1)).real()) /
             f.weight;
  return f;
}

BlochField bloch_field(const DensityOperator& rho, int spin_electron, const Eigen::Vector3d& q,
                       int position_electron) {
  const auto& sig = rho.signature();
  ReductionPlan plan = position_plan(sig, position_electron, q);
  const auto s = sig.spin_of(spin_electron);
  if (!s) throw std::invalid_argument("electron " + std::to_string(spin_electron) + " has no spin");
  plan[*s] = EqualAngle{0};
  return bloch_vector(conditional_spin_operator(rho, plan));
}

double entanglement_entropy(const StateVector& psi, std::span<const std::size_t> subset) {
  const std::size_t nf = psi.signature().size();
  std::vector<char> in_a(nf, 0);
  for (std::size_t i : subset) {
    if (i >= nf || in_a[i]) throw std::invalid_argument("invalid bipartition subset");
    in_a[i] = 1;
  }
  if (std::abs(psi.norm_squared() - 1.0) > 1e-10) {
    throw std::invalid_argument("entanglement entropy needs a normalized state");
  }
  std::vector<std::size_t> a_idx, b_idx;
  for (std::size_t i = 0; i < nf; ++i) (in_a[i] ? a_idx : b_idx).push_back(i);

  std::vector<ProductKet> a_basis, b_basis;
  std::vector<std::tuple<std::size_t, std::size_t, Complex>> entries;
  for (const auto& t : psi.terms()) {
    const std::size_t ia = index_in(a_basis, restrict_ket(t.ket, a_idx));
    const std::size_t ib = index_in(b_basis, restrict_ket(t.ket, b_idx));
    entries.emplace_back(ia, ib, t.amplitude);
  }
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(a_basis.size()),
                                              static_cast<Eigen::Index>(b_basis.size()));
  for (const auto& [ia, ib, amp] : entries) {
    c(static_cast<Eigen::Index>(ia), static_cast<Eigen::Index>(ib)) += amp;
  }
  // Reduced state R = C G_B^T C^dagger in the (non-orthogonal) A basis; its
  // spectrum is that of G_A^{1/2} R G_A^{1/2}.
  const Eigen::MatrixXcd sa = psd_sqrt(gram(a_basis));
  const Eigen::MatrixXcd gb = gram(b_basis);
  Eigen::MatrixXcd h = sa * c * gb.transpose() * c.adjoint() * sa;
  h = 0.5 * (h + h.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  double entropy = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = es.eigenvalues()(i);
    if (l > 1e-15) entropy -= l * std::log2(l);
  }
  return std::max(entropy, 0.0);
}

double overlap(const DensityOperator& rho1, const DensityOperator& rho2) {
  if (!(rho1.signature() == rho2.signature())) throw std::invalid_argument("signature mismatch");
  Complex acc{0.0, 0.0};
  for (const auto& a : rho1.terms()) {
    for (const auto& b : rho2.terms()) {
      const Complex x = ket_overlap(a.bra, b.ket);
      if (x == Complex(0.0, 0.0)) continue;
      acc += a.coeff * b.coeff * x * ket_overlap(b.bra, a.ket);
    }
  }
  return acc.real();
}

double integrate_wigner(const DensityOperator& rho, const QuadratureConfig& config) {
  const FactorSamples s = make_samples(config, 1.0);
  Complex acc{0.0, 0.0};
  for (const auto& t : rho.terms()) {
    Complex prod = t.coeff;
    for (std::size_t i = 0; i < t.ket.entries.size(); ++i) {
      const Eigen::VectorXcd v = sample_factor(t.ket.entries[i], t.bra.entries[i], s);
      const bool mode = std::holds_alternative<ModeEntry>(t.ket.entries[i]);
      const auto& w = mode ? s.mode_weights : s.spin.weights;
      const Eigen::Map<const Eigen::VectorXd> wv(w.data(), static_cast<Eigen::Index>(w.size()));
      prod *= (v.array() * wv.array().cast<Complex>()).sum();
    }
    acc += prod;
  }
  return acc.real();
}

double phase_space_overlap(const DensityOperator& rho1, const DensityOperator& rho2,
                           const QuadratureConfig& config) {
  if (!(rho1.signature() == rho2.signature())) throw std::invalid_argument("signature mismatch");
  // W1 W2 decays like e^{-2(q^2+p^2)}: rescale the Hermite nodes by 1/sqrt2.
  const FactorSamples s = make_samples(config, 1.0 / std::numbers::sqrt2);
  const std::size_t nf = rho1.signature().size();
  auto sample_all = [&](const DensityOperator& r) {
    std::vector<std::vector<Eigen::VectorXcd>> out;
    for (const auto& t : r.terms()) {
      std::vector<Eigen::VectorXcd> per;
      for (std::size_t i = 0; i < nf; ++i) {
        Eigen::VectorXcd v = sample_factor(t.ket.entries[i], t.bra.entries[i], s);
        const bool mode = std::holds_alternative<ModeEntry>(t.ket.entries[i]);
        const auto& w = mode ? s.mode_weights : s.spin.weights;
        for (Eigen::Index k = 0; k < v.size(); ++k) v(k) *= w[static_cast<std::size_t>(k)];
        if (mode) v *= 2.0 * kPi;
        per.push_back(std::move(v));
      }
      out.push_back(std::move(per));
    }
    return out;
  };
  const auto s1 = sample_all(rho1);
  auto raw = [&](const DensityOperator& r) {
    std::vector<std::vector<Eigen::VectorXcd>> out;
    for (const auto& t : r.terms()) {
      std::vector<Eigen::VectorXcd> per;
      for (std::size_t i = 0; i < nf; ++i) per.push_back(sample_factor(t.ket.entries[i], t.bra.entries[i], s));
      out.push_back(std::move(per));
    }
    return out;
  };
  const auto r2 = raw(rho2);
  Complex acc{0.0, 0.0};
  for (std::size_t a = 0; a < s1.size(); ++a) {
    for (std::size_t b = 0; b < r2.size(); ++b) {
      Complex prod = rho1.terms()[a].coeff * rho2.terms()[b].coeff;
      for (std::size_t i = 0; i < nf && prod != Complex(0.0, 0.0); ++i) {
        prod *= (s1[a][i].array() * r2[b][i].array()).sum();
      }
      acc += prod;
    }
  }
  return acc.real();
}

Eigen::Vector3d spin_moment(const DensityOperator& rho, int electron, const QuadratureConfig& config) {
  const auto& sig = rho.signature();
  const auto s = sig.spin_of(electron);
  if (!s) throw std::invalid_argument("electron " + std::to_string(electron) + " has no spin");
  ReductionPlan plan = ReductionPlan::traced(sig);
  const SpinQuadrature rule = spin_product_rule(config.spin_theta, config.spin_phi);
  Eigen::Vector3d first = Eigen::Vector3d::Zero();
  double zeroth = 0.0;
  for (std::size_t i = 0; i < rule.points.size(); ++i) {
    plan[*s] = SphereAngle{rule.points[i]};
    const double w = evaluate(rho, plan).value;
    zeroth += rule.weights[i] * w;
    first += rule.weights[i] * w * kernel_direction(rule.points[i]);
  }
  return kSqrt3 * first / zeroth;
}

double total_jz(const StateVector& psi, int electron) {
  const auto& sig = psi.signature();
  const std::size_t ix = sig.index_of(Factor::mode(Axis::x, electron));
  const std::size_t iy = sig.index_of(Factor::mode(Axis::y, electron));
  const auto is = sig.spin_of(electron);
  // L_z = i (a_x a_y^dagger - a_x^dagger a_y)
  StateVector lz(sig);
  double sz = 0.0;
  for (const auto& t : psi.terms()) {
    const auto& mx = std::get<ModeEntry>(t.ket.entries[ix]);
    const auto& my = std::get<ModeEntry>(t.ket.entries[iy]);
    if (mx.displacement != Complex(0.0, 0.0) || my.displacement != Complex(0.0, 0.0)) {
      throw std::invalid_argument("total_jz needs undisplaced modes");
    }
    if (mx.fock > 0) {
      ProductKet k = t.ket;
      std::get<ModeEntry>(k.entries[ix]).fock -= 1;
      std::get<ModeEntry>(k.entries[iy]).fock += 1;
      lz.add(Complex(0.0, 1.0) * std::sqrt(double(mx.fock) * (my.fock + 1)) * t.amplitude, std::move(k));
    }
    if (my.fock > 0) {
      ProductKet k = t.ket;
      std::get<ModeEntry>(k.entries[ix]).fock += 1;
      std::get<ModeEntry>(k.entries[iy]).fock -= 1;
      lz.add(Complex(0.0, -1.0) * std::sqrt(double(mx.fock + 1) * my.fock) * t.amplitude, std::move(k));
    }
    if (is) sz += std::norm(t.amplitude) * (std::get<Spin>(t.ket.entries[*is]) == Spin::up ? 0.5 : -0.5);
  }
  return inner(psi, lz).real() + sz / psi.norm_squared();
}

}  // namespace hetwig
