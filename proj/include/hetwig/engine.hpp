#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "hetwig/quadrature.hpp"
#include "hetwig/states.hpp"
#include "hetwig/types.hpp"

namespace hetwig {

/// One directive per signature factor, defining a reduced Wigner functional.
class ReductionPlan {
 public:
  ReductionPlan() = default;
  explicit ReductionPlan(std::vector<Directive> directives) : directives_(std::move(directives)) {}

  /// Every factor traced.
  static ReductionPlan traced(const SystemSignature& signature);

  std::size_t size() const { return directives_.size(); }
  const Directive& operator[](std::size_t i) const { return directives_[i]; }
  Directive& operator[](std::size_t i) { return directives_[i]; }
  const std::vector<Directive>& directives() const { return directives_; }

  /// Number of EqualAngle groups; groups must be numbered 0..n-1 without gaps.
  int group_count() const;

  /// Throws std::invalid_argument when the plan does not conform to `signature`.
  void validate(const SystemSignature& signature) const;

 private:
  std::vector<Directive> directives_;
};

struct WignerValue {
  double value = 0.0;
  /// |imaginary part| of the contraction; a Hermiticity diagnostic.
  double residual = 0.0;
};

/// W = Tr[rho Pi] reduced according to `plan`. `group_angles[g]` is the angle
/// shared by every spin in EqualAngle group g.
WignerValue evaluate(const DensityOperator& rho, const ReductionPlan& plan,
                     std::span<const SpinAngle> group_angles = {});

/// Contraction of every factor except the EqualAngle spins ("open" spins).
///
/// `op(k, b)` is the coefficient of |k><b| over the open spins, where the bit
/// string of the first open spin is the most significant (0 = up, 1 = down).
/// Evaluating the Wigner function at a set of open-spin angles is then
/// Tr[op * (kernel_1 (x) ... (x) kernel_k)].
struct SpinConditional {
  std::vector<std::size_t> spins;
  Eigen::MatrixXcd op;

  double trace() const { return op.trace().real(); }
};

SpinConditional conditional_spin_operator(const DensityOperator& rho, const ReductionPlan& plan);

/// kernel(angles[0]) (x) kernel(angles[1]) (x) ... as a dense matrix.
Eigen::MatrixXcd spin_kernel_product(std::span<const SpinAngle> angles);

/// Re Tr[c.op * kernel] for a precomputed kernel product.
double contract(const SpinConditional& c, const Eigen::MatrixXcd& kernel);

/// Spatial probability density of `electron` at q (all else traced).
double position_density(const DensityOperator& rho, int electron, const Eigen::Vector3d& q);

struct BlochField {
  Eigen::Vector3d vector = Eigen::Vector3d::Zero();
  /// Tr of the conditional spin operator (the position density at q).
  double weight = 0.0;
  /// Set when the weight is below 1e-12; `vector` is then zero.
  bool underflow = false;
};

/// Bloch vector of a single-spin conditional operator.
BlochField bloch_vector(const SpinConditional& c);

/// Conditional Bloch vector of `spin_electron`'s spin given `position_electron` at q,
/// with every other factor traced.
BlochField bloch_field(const DensityOperator& rho, int spin_electron, const Eigen::Vector3d& q,
                       int position_electron);
inline BlochField bloch_field(const DensityOperator& rho, int electron, const Eigen::Vector3d& q) {
  return bloch_field(rho, electron, q, electron);
}

/// von Neumann entropy (bits) of the reduced state on `subset` (signature
/// indices). Non-orthogonal kets are handled through their Gram matrices.
/// Throws std::invalid_argument for non-normalized input.
double entanglement_entropy(const StateVector& psi, std::span<const std::size_t> subset);

/// Tr[rho1 rho2] from exact ket algebra.
double overlap(const DensityOperator& rho1, const DensityOperator& rho2);

/// Quadrature of W over the whole phase space (all modes and spins).
/// Factorizes term by term, so this equals the tensor-product rule exactly.
double integrate_wigner(const DensityOperator& rho, const QuadratureConfig& config = {});

/// Phase-space integral of W1 * W2 with measure 2pi dq dp per mode and
/// (2/pi) sin(2theta) dtheta dphi per spin. Equals Tr[rho1 rho2].
double phase_space_overlap(const DensityOperator& rho1, const DensityOperator& rho2,
                           const QuadratureConfig& config = {});

/// sqrt(3) * int n W dmu / int W dmu for one spin with every other factor traced.
Eigen::Vector3d spin_moment(const DensityOperator& rho, int electron,
                            const QuadratureConfig& config = {});

/// <L_z + S_z> of `electron` for undisplaced Fock states.
double total_jz(const StateVector& psi, int electron);

}  // namespace hetwig
