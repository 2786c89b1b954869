#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hetwig/types.hpp"

namespace hetwig {

enum class FactorKind { mode, spin };
enum class Axis { x, y, z };

char axis_char(Axis a);

/// One tensor factor of the composite system: an oscillator mode of one
/// electron along one axis, or the spin of one electron.
struct Factor {
  FactorKind kind = FactorKind::mode;
  Axis axis = Axis::x;  // ignored for spins
  int electron = 1;

  static Factor mode(Axis a, int electron) { return {FactorKind::mode, a, electron}; }
  static Factor spin(int electron) { return {FactorKind::spin, Axis::x, electron}; }

  bool is_mode() const { return kind == FactorKind::mode; }
  bool is_spin() const { return kind == FactorKind::spin; }

  /// "x1", "z2", "s3", ...
  std::string label() const;
  static Factor parse(std::string_view label);

  friend bool operator==(const Factor& a, const Factor& b) {
    return a.kind == b.kind && a.electron == b.electron && (a.is_spin() || a.axis == b.axis);
  }
};

/// Ordered list of factors. Labels are unique.
class SystemSignature {
 public:
  SystemSignature() = default;
  explicit SystemSignature(std::vector<Factor> factors);

  /// x, y, z modes of one electron.
  static SystemSignature orbital(int electron);
  /// x, y, z modes then the spin of one electron.
  static SystemSignature electron(int electron);
  /// Electrons 1..n, each laid out as x, y, z, spin.
  static SystemSignature electrons(int n);
  /// Bare spins s1..sn.
  static SystemSignature spins(int n);

  std::size_t size() const { return factors_.size(); }
  const Factor& operator[](std::size_t i) const { return factors_[i]; }
  auto begin() const { return factors_.begin(); }
  auto end() const { return factors_.end(); }
  const std::vector<Factor>& factors() const { return factors_; }

  std::optional<std::size_t> find(const Factor& f) const;
  std::size_t index_of(const Factor& f) const;
  std::optional<std::size_t> spin_of(int electron) const;
  /// Indices of the electron's modes, in signature order.
  std::vector<std::size_t> modes_of(int electron) const;
  /// Distinct electron labels in order of first appearance.
  std::vector<int> electron_labels() const;

  SystemSignature concat(const SystemSignature& other) const;
  SystemSignature relabeled(int from, int to) const;

  friend bool operator==(const SystemSignature&, const SystemSignature&) = default;

 private:
  std::vector<Factor> factors_;
};

using KetEntry = std::variant<ModeEntry, Spin>;

/// One basis ket of the composite system, one entry per signature factor.
struct ProductKet {
  std::vector<KetEntry> entries;

  friend bool operator==(const ProductKet&, const ProductKet&) = default;
};

/// <bra|ket>, exact for displaced oscillator entries.
Complex ket_overlap(const ProductKet& bra, const ProductKet& ket);

/// Sparse complex-weighted sum of product kets over a fixed signature.
class StateVector {
 public:
  struct Term {
    Complex amplitude;
    ProductKet ket;
  };

  StateVector() = default;
  explicit StateVector(SystemSignature signature);

  /// Adds amp*|ket>, merging with an identical ket if present.
  StateVector& add(Complex amplitude, ProductKet ket);

  const SystemSignature& signature() const { return signature_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  double norm_squared() const;
  /// Throws std::domain_error when the norm vanishes.
  StateVector normalized() const;

  StateVector& operator*=(Complex s);
  StateVector& operator+=(const StateVector& other);
  StateVector& operator-=(const StateVector& other);

  /// Same vector with factors permuted into `target` order.
  StateVector reordered(const SystemSignature& target) const;
  StateVector relabeled(int from, int to) const;

 private:
  void check_conforms(const ProductKet& ket) const;
  void prune();

  SystemSignature signature_;
  std::vector<Term> terms_;
};

StateVector operator*(Complex s, StateVector v);
StateVector operator+(StateVector a, const StateVector& b);
StateVector operator-(StateVector a, const StateVector& b);

/// |a> (x) |b> over the concatenated signature.
StateVector tensor(const StateVector& a, const StateVector& b);

/// <a|b>
Complex inner(const StateVector& a, const StateVector& b);

/// Sum of coefficient * |ket><bra| over a fixed signature.
class DensityOperator {
 public:
  struct Term {
    Complex coeff;
    ProductKet ket;
    ProductKet bra;
  };

  DensityOperator() = default;
  DensityOperator(SystemSignature signature, std::vector<Term> terms);

  static DensityOperator pure(const StateVector& psi);

  const SystemSignature& signature() const { return signature_; }
  const std::vector<Term>& terms() const { return terms_; }

  Complex trace() const;

  DensityOperator& operator*=(double s);
  DensityOperator& operator+=(const DensityOperator& other);

 private:
  SystemSignature signature_;
  std::vector<Term> terms_;
};

// ---------------------------------------------------------------------------
// State builders

/// Reference spin states a..h (one to three bare spins).
StateVector reference_spin_state(char panel);

enum class OrbitalLabel { s1, s2, p2x, p2y, p2z, d3xz, d3yz, d3z2 };

/// Parses "1S", "2S", "2Px", "2Py", "2Pz", "3Dxz", "3Dyz", "3Dz2".
OrbitalLabel parse_orbital_label(std::string_view label);
std::string to_string(OrbitalLabel label);

/// Oscillator orbital over the three modes of `electron`.
StateVector orbital(OrbitalLabel label, int electron = 1);

/// orbital (x) spin over x, y, z, s of `electron`.
StateVector spin_orbital(OrbitalLabel label, Spin spin, int electron = 1);
StateVector spin_orbital(const StateVector& spatial, Spin spin);

/// l = 2 orbital with definite m_l.
///
/// Phase convention: m_l = +-1 -> (d_xz +- i d_yz)/sqrt2 and
/// m_l = +-2 -> (d_{x2-y2} +- i d_xy)/sqrt2 with d_{x2-y2} = (|200> - |020>)/sqrt2.
/// This reproduces sqrt(3/5)|d_z2>|up> + sqrt(1/5)(|d_xz> + i|d_yz>)|down> for
/// |5/2, 1/2> with positive coefficients.
StateVector d_orbital(int m_l, int electron = 1);

/// <l m_l; 1/2 m_s | j m> in closed form with Condon-Shortley phases.
/// Half-integers are passed doubled (two_ms = +-1, two_j = 2l +- 1, two_m).
/// Selection-rule violations give 0.
double clebsch_gordan_ls(int l, int m_l, int two_ms, int two_j, int two_m);

/// Spin-orbit coupled |j, m> of the l = 2 shell. Arguments doubled: two_j in {3, 5}.
StateVector jm_state(int two_j, int two_m);

/// (1/sqrt N!) sum_perm sign * (x)_i orbital_{perm(i)} placed on electron i,
/// then normalized with exact (displaced) overlaps. Inputs are single-electron
/// states over an x, y, z, s signature; at most four.
/// Throws std::domain_error for linearly dependent inputs.
StateVector slater_determinant(std::span<const StateVector> spin_orbitals);

enum class HeliumState { ground, singlet1, triplet_m1, triplet_m0, triplet_mm1 };
HeliumState parse_helium_state(std::string_view label);
StateVector helium_state(HeliumState state);

/// 1S(up) 1S(down) 2S(up) determinant.
StateVector lithium_state();

enum class BondKind { single, double_ };
BondKind parse_bond_kind(std::string_view label);

/// Bonding orbital N(|p_z; +d> + |p_z; -d>) with the p_z centers displaced to
/// x = +-d (coherent displacement +-d/sqrt2 on the x mode).
StateVector bonding_orbital(double separation, int electron = 1);

/// single: bonding (x) up. double: both electrons in the bonding orbital, spin singlet.
StateVector pi_bond(BondKind kind, double separation);

}  // namespace hetwig
