#include "hetwig/states.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hetwig/kernels.hpp"

namespace hetwig {
namespace {

constexpr double kPruneTolerance = 1e-14;

ProductKet fock_ket(std::initializer_list<int> levels) {
  ProductKet k;
  for (int n : levels) k.entries.emplace_back(ModeEntry{{}, n});
  return k;
}

ProductKet spin_ket(std::initializer_list<Spin> spins) {
  ProductKet k;
  for (Spin s : spins) k.entries.emplace_back(s);
  return k;
}

int permutation_sign(const std::vector<int>& perm) {
  int sign = 1;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    for (std::size_t j = i + 1; j < perm.size(); ++j) {
      if (perm[i] > perm[j]) sign = -sign;
    }
  }
  return sign;
}

}  // namespace

char axis_char(Axis a) {
  switch (a) {
    case Axis::x: return 'x';
    case Axis::y: return 'y';
    default: return 'z';
  }
}

std::string Factor::label() const {
  return (is_spin() ? std::string(1, 's') : std::string(1, axis_char(axis))) +
         std::to_string(electron);
}

Factor Factor::parse(std::string_view label) {
  if (label.size() < 2) throw std::invalid_argument("bad factor label '" + std::string(label) + "'");
  int e = 0;
  for (char c : label.substr(1)) {
    if (c < '0' || c > '9') throw std::invalid_argument("bad factor label '" + std::string(label) + "'");
    e = e * 10 + (c - '0');
  }
  switch (label[0]) {
    case 'x': return mode(Axis::x, e);
    case 'y': return mode(Axis::y, e);
    case 'z': return mode(Axis::z, e);
    case 's': return spin(e);
    default: throw std::invalid_argument("bad factor label '" + std::string(label) + "'");
  }
}

// ---------------------------------------------------------------------------
// SystemSignature

SystemSignature::SystemSignature(std::vector<Factor> factors) : factors_(std::move(factors)) {
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    for (std::size_t j = i + 1; j < factors_.size(); ++j) {
      if (factors_[i] == factors_[j]) {
        throw std::invalid_argument("duplicate factor label " + factors_[i].label());
      }
    }
  }
}

SystemSignature SystemSignature::orbital(int electron) {
  return SystemSignature({Factor::mode(Axis::x, electron), Factor::mode(Axis::y, electron),
                          Factor::mode(Axis::z, electron)});
}

SystemSignature SystemSignature::electron(int electron) {
  return SystemSignature({Factor::mode(Axis::x, electron), Factor::mode(Axis::y, electron),
                          Factor::mode(Axis::z, electron), Factor::spin(electron)});
}

SystemSignature SystemSignature::electrons(int n) {
  std::vector<Factor> f;
  for (int e = 1; e <= n; ++e) {
    const auto one = electron(e);
    f.insert(f.end(), one.begin(), one.end());
  }
  return SystemSignature(std::move(f));
}

SystemSignature SystemSignature::spins(int n) {
  std::vector<Factor> f;
  for (int e = 1; e <= n; ++e) f.push_back(Factor::spin(e));
  return SystemSignature(std::move(f));
}

std::optional<std::size_t> SystemSignature::find(const Factor& f) const {
  const auto it = std::find(factors_.begin(), factors_.end(), f);
  if (it == factors_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - factors_.begin());
}

std::size_t SystemSignature::index_of(const Factor& f) const {
  if (auto i = find(f)) return *i;
  throw std::invalid_argument("factor " + f.label() + " not in signature");
}

std::optional<std::size_t> SystemSignature::spin_of(int electron) const {
  return find(Factor::spin(electron));
}

std::vector<std::size_t> SystemSignature::modes_of(int electron) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (factors_[i].is_mode() && factors_[i].electron == electron) out.push_back(i);
  }
  return out;
}

std::vector<int> SystemSignature::electron_labels() const {
  std::vector<int> out;
  for (const auto& f : factors_) {
    if (std::find(out.begin(), out.end(), f.electron) == out.end()) out.push_back(f.electron);
  }
  return out;
}

SystemSignature SystemSignature::concat(const SystemSignature& other) const {
  std::vector<Factor> f = factors_;
  f.insert(f.end(), other.factors_.begin(), other.factors_.end());
  return SystemSignature(std::move(f));
}

SystemSignature SystemSignature::relabeled(int from, int to) const {
  std::vector<Factor> f = factors_;
  for (auto& x : f) {
    if (x.electron == from) x.electron = to;
  }
  return SystemSignature(std::move(f));
}

// ---------------------------------------------------------------------------
// Kets and vectors

Complex ket_overlap(const ProductKet& bra, const ProductKet& ket) {
  if (bra.entries.size() != ket.entries.size()) throw std::invalid_argument("ket length mismatch");
  Complex acc{1.0, 0.0};
  for (std::size_t i = 0; i < ket.entries.size(); ++i) {
    const auto& k = ket.entries[i];
    const auto& b = bra.entries[i];
    if (k.index() != b.index()) throw std::invalid_argument("ket entry kind mismatch");
    if (const auto* km = std::get_if<ModeEntry>(&k)) {
      acc *= mode_kernel(*km, std::get<ModeEntry>(b), Trace{});
    } else if (std::get<Spin>(k) != std::get<Spin>(b)) {
      return {0.0, 0.0};
    }
    if (acc == Complex(0.0, 0.0)) return acc;
  }
  return acc;
}

StateVector::StateVector(SystemSignature signature) : signature_(std::move(signature)) {}

void StateVector::check_conforms(const ProductKet& ket) const {
  if (ket.entries.size() != signature_.size()) {
    throw std::invalid_argument("ket has " + std::to_string(ket.entries.size()) +
                                " entries, signature has " + std::to_string(signature_.size()));
  }
  for (std::size_t i = 0; i < ket.entries.size(); ++i) {
    const bool is_mode = std::holds_alternative<ModeEntry>(ket.entries[i]);
    if (is_mode != signature_[i].is_mode()) {
      throw std::invalid_argument("ket entry kind does not match factor " + signature_[i].label());
    }
    if (is_mode && std::get<ModeEntry>(ket.entries[i]).fock < 0) {
      throw std::invalid_argument("negative Fock index");
    }
  }
}

StateVector& StateVector::add(Complex amplitude, ProductKet ket) {
  check_conforms(ket);
  for (auto it = terms_.begin(); it != terms_.end(); ++it) {
    if (it->ket == ket) {
      it->amplitude += amplitude;
      if (std::abs(it->amplitude) < kPruneTolerance) terms_.erase(it);
      return *this;
    }
  }
  if (std::abs(amplitude) >= kPruneTolerance) terms_.push_back({amplitude, std::move(ket)});
  return *this;
}

void StateVector::prune() {
  std::erase_if(terms_, [](const Term& t) { return std::abs(t.amplitude) < kPruneTolerance; });
}

double StateVector::norm_squared() const { return inner(*this, *this).real(); }

StateVector StateVector::normalized() const {
  const double n2 = norm_squared();
  if (!(n2 > 1e-24)) throw std::domain_error("state has zero norm");
  StateVector out = *this;
  out *= Complex(1.0 / std::sqrt(n2), 0.0);
  return out;
}

StateVector& StateVector::operator*=(Complex s) {
  for (auto& t : terms_) t.amplitude *= s;
  prune();
  return *this;
}

StateVector& StateVector::operator+=(const StateVector& other) {
  if (!(other.signature_ == signature_)) throw std::invalid_argument("signature mismatch in sum");
  for (const auto& t : other.terms_) add(t.amplitude, t.ket);
  return *this;
}

StateVector& StateVector::operator-=(const StateVector& other) {
  if (!(other.signature_ == signature_)) throw std::invalid_argument("signature mismatch in sum");
  for (const auto& t : other.terms_) add(-t.amplitude, t.ket);
  return *this;
}

StateVector StateVector::reordered(const SystemSignature& target) const {
  if (target.size() != signature_.size()) throw std::invalid_argument("reorder size mismatch");
  std::vector<std::size_t> src(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) src[i] = signature_.index_of(target[i]);
  StateVector out(target);
  for (const auto& t : terms_) {
    ProductKet k;
    k.entries.reserve(src.size());
    for (std::size_t i : src) k.entries.push_back(t.ket.entries[i]);
    out.add(t.amplitude, std::move(k));
  }
  return out;
}

StateVector StateVector::relabeled(int from, int to) const {
  StateVector out = *this;
  out.signature_ = signature_.relabeled(from, to);
  return out;
}

StateVector operator*(Complex s, StateVector v) { return v *= s; }
StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
StateVector operator-(StateVector a, const StateVector& b) { return a -= b; }

StateVector tensor(const StateVector& a, const StateVector& b) {
  StateVector out(a.signature().concat(b.signature()));
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      ProductKet k = ta.ket;
      k.entries.insert(k.entries.end(), tb.ket.entries.begin(), tb.ket.entries.end());
      out.add(ta.amplitude * tb.amplitude, std::move(k));
    }
  }
  return out;
}

Complex inner(const StateVector& a, const StateVector& b) {
  if (!(a.signature() == b.signature())) throw std::invalid_argument("signature mismatch in inner");
  Complex acc{0.0, 0.0};
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      acc += std::conj(ta.amplitude) * tb.amplitude * ket_overlap(ta.ket, tb.ket);
    }
  }
  return acc;
}

// ---------------------------------------------------------------------------
// DensityOperator

DensityOperator::DensityOperator(SystemSignature signature, std::vector<Term> terms)
    : signature_(std::move(signature)), terms_(std::move(terms)) {
  StateVector probe(signature_);
  for (const auto& t : terms_) {
    probe.add(1.0, t.ket);
    probe.add(1.0, t.bra);
  }
}

DensityOperator DensityOperator::pure(const StateVector& psi) {
  std::vector<Term> terms;
  terms.reserve(psi.terms().size() * psi.terms().size());
  for (const auto& k : psi.terms()) {
    for (const auto& b : psi.terms()) {
      terms.push_back({k.amplitude * std::conj(b.amplitude), k.ket, b.ket});
    }
  }
  DensityOperator rho;
  rho.signature_ = psi.signature();
  rho.terms_ = std::move(terms);
  return rho;
}

Complex DensityOperator::trace() const {
  Complex acc{0.0, 0.0};
  for (const auto& t : terms_) acc += t.coeff * ket_overlap(t.bra, t.ket);
  return acc;
}

DensityOperator& DensityOperator::operator*=(double s) {
  for (auto& t : terms_) t.coeff *= s;
  return *this;
}

DensityOperator& DensityOperator::operator+=(const DensityOperator& other) {
  if (!(other.signature_ == signature_)) throw std::invalid_argument("signature mismatch in sum");
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

// ---------------------------------------------------------------------------
// Builders

StateVector reference_spin_state(char panel) {
  const double r = 1.0 / std::numbers::sqrt2;
  using enum Spin;
  switch (panel) {
    case 'a': return StateVector(SystemSignature::spins(1)).add(1.0, spin_ket({up}));
    case 'b':
      return StateVector(SystemSignature::spins(1)).add(r, spin_ket({up})).add(r, spin_ket({down}));
    case 'c': return StateVector(SystemSignature::spins(2)).add(1.0, spin_ket({up, up}));
    case 'd': return StateVector(SystemSignature::spins(2)).add(1.0, spin_ket({up, down}));
    case 'e':
      return StateVector(SystemSignature::spins(2))
          .add(r, spin_ket({up, down}))
          .add(-r, spin_ket({down, up}));
    case 'f':
      return StateVector(SystemSignature::spins(2))
          .add(r, spin_ket({up, down}))
          .add(r, spin_ket({down, up}));
    case 'g': return StateVector(SystemSignature::spins(3)).add(1.0, spin_ket({up, down, up}));
    case 'h':
      return StateVector(SystemSignature::spins(3))
          .add(r, spin_ket({up, down, up}))
          .add(-r, spin_ket({down, up, up}));
    default: throw std::invalid_argument(std::string("unknown reference panel '") + panel + "'");
  }
}

OrbitalLabel parse_orbital_label(std::string_view label) {
  if (label == "1S") return OrbitalLabel::s1;
  if (label == "2S") return OrbitalLabel::s2;
  if (label == "2Px") return OrbitalLabel::p2x;
  if (label == "2Py") return OrbitalLabel::p2y;
  if (label == "2Pz") return OrbitalLabel::p2z;
  if (label == "3Dxz") return OrbitalLabel::d3xz;
  if (label == "3Dyz") return OrbitalLabel::d3yz;
  if (label == "3Dz2") return OrbitalLabel::d3z2;
  throw std::invalid_argument("unknown orbital label '" + std::string(label) + "'");
}

std::string to_string(OrbitalLabel label) {
  switch (label) {
    case OrbitalLabel::s1: return "1S";
    case OrbitalLabel::s2: return "2S";
    case OrbitalLabel::p2x: return "2Px";
    case OrbitalLabel::p2y: return "2Py";
    case OrbitalLabel::p2z: return "2Pz";
    case OrbitalLabel::d3xz: return "3Dxz";
    case OrbitalLabel::d3yz: return "3Dyz";
    default: return "3Dz2";
  }
}

StateVector orbital(OrbitalLabel label, int electron) {
  StateVector v(SystemSignature::orbital(electron));
  switch (label) {
    case OrbitalLabel::s1: return v.add(1.0, fock_ket({0, 0, 0}));
    case OrbitalLabel::s2: {
      // l = 0 member of the N = 2 shell.
      const double c = 1.0 / std::sqrt(3.0);
      return v.add(c, fock_ket({2, 0, 0})).add(c, fock_ket({0, 2, 0})).add(c, fock_ket({0, 0, 2}));
    }
    case OrbitalLabel::p2x: return v.add(1.0, fock_ket({1, 0, 0}));
    case OrbitalLabel::p2y: return v.add(1.0, fock_ket({0, 1, 0}));
    case OrbitalLabel::p2z: return v.add(1.0, fock_ket({0, 0, 1}));
    case OrbitalLabel::d3xz: return v.add(1.0, fock_ket({1, 0, 1}));
    case OrbitalLabel::d3yz: return v.add(1.0, fock_ket({0, 1, 1}));
    case OrbitalLabel::d3z2: {
      const double c = std::sqrt(1.0 / 6.0);
      return v.add(2 * c, fock_ket({0, 0, 2}))
          .add(-c, fock_ket({2, 0, 0}))
          .add(-c, fock_ket({0, 2, 0}));
    }
  }
  throw std::invalid_argument("unknown orbital label");
}

StateVector spin_orbital(const StateVector& spatial, Spin spin) {
  const int e = spatial.signature().electron_labels().at(0);
  StateVector s(SystemSignature({Factor::spin(e)}));
  s.add(1.0, spin_ket({spin}));
  return tensor(spatial, s);
}

StateVector spin_orbital(OrbitalLabel label, Spin spin, int electron) {
  return spin_orbital(orbital(label, electron), spin);
}

StateVector d_orbital(int m_l, int electron) {
  const double r = 1.0 / std::numbers::sqrt2;
  const Complex i{0.0, 1.0};
  StateVector v(SystemSignature::orbital(electron));
  switch (m_l) {
    case 0: return orbital(OrbitalLabel::d3z2, electron);
    case 1: return v.add(r, fock_ket({1, 0, 1})).add(i * r, fock_ket({0, 1, 1}));
    case -1: return v.add(r, fock_ket({1, 0, 1})).add(-i * r, fock_ket({0, 1, 1}));
    case 2:
      return v.add(0.5, fock_ket({2, 0, 0})).add(-0.5, fock_ket({0, 2, 0})).add(i * r, fock_ket({1, 1, 0}));
    case -2:
      return v.add(0.5, fock_ket({2, 0, 0})).add(-0.5, fock_ket({0, 2, 0})).add(-i * r, fock_ket({1, 1, 0}));
    default: throw std::invalid_argument("m_l out of range for l = 2");
  }
}

double clebsch_gordan_ls(int l, int m_l, int two_ms, int two_j, int two_m) {
  if (l < 0 || std::abs(m_l) > l) return 0.0;
  if (two_ms != 1 && two_ms != -1) return 0.0;
  if (two_m != 2 * m_l + two_ms) return 0.0;
  if (two_j != 2 * l + 1 && !(l > 0 && two_j == 2 * l - 1)) return 0.0;
  if (std::abs(two_m) > two_j) return 0.0;
  const double denom = 2.0 * (2 * l + 1);
  const double plus = (2.0 * l + two_m + 1) / denom;   // (l + m + 1/2)/(2l + 1)
  const double minus = (2.0 * l - two_m + 1) / denom;  // (l - m + 1/2)/(2l + 1)
  if (two_j == 2 * l + 1) return std::sqrt(two_ms > 0 ? plus : minus);
  return two_ms > 0 ? -std::sqrt(minus) : std::sqrt(plus);
}

StateVector jm_state(int two_j, int two_m) {
  if ((two_j != 5 && two_j != 3) || std::abs(two_m) > two_j || (two_m % 2) == 0) {
    throw std::invalid_argument("invalid (j, m) for the l = 2 shell");
  }
  StateVector out(SystemSignature::electron(1));
  for (int two_ms : {1, -1}) {
    const int m_l = (two_m - two_ms) / 2;
    if (std::abs(m_l) > 2) continue;
    const double cg = clebsch_gordan_ls(2, m_l, two_ms, two_j, two_m);
    if (cg == 0.0) continue;
    out += Complex(cg, 0.0) * spin_orbital(d_orbital(m_l), two_ms > 0 ? Spin::up : Spin::down);
  }
  return out;
}

StateVector slater_determinant(std::span<const StateVector> spin_orbitals) {
  const int n = static_cast<int>(spin_orbitals.size());
  if (n < 1 || n > 4) throw std::invalid_argument("Slater determinant needs 1..4 orbitals");
  const SystemSignature& single = spin_orbitals[0].signature();
  const auto labels = single.electron_labels();
  if (labels.size() != 1) throw std::invalid_argument("orbitals must be single-electron states");
  const int e0 = labels[0];
  double scale = 1.0;
  for (const auto& o : spin_orbitals) {
    if (!(o.signature() == single)) throw std::invalid_argument("orbitals must share one signature");
    scale *= o.norm_squared();
  }

  SystemSignature target = single.relabeled(e0, 1);
  for (int e = 2; e <= n; ++e) target = target.concat(single.relabeled(e0, e));

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  StateVector acc(target);
  do {
    StateVector product = spin_orbitals[perm[0]].relabeled(e0, 1);
    for (int e = 2; e <= n; ++e) product = tensor(product, spin_orbitals[perm[e - 1]].relabeled(e0, e));
    const double sign = permutation_sign(perm);
    acc += Complex(sign, 0.0) * product;
  } while (std::next_permutation(perm.begin(), perm.end()));

  double fact = 1.0;
  for (int k = 2; k <= n; ++k) fact *= k;
  acc *= Complex(1.0 / std::sqrt(fact), 0.0);
  if (!(acc.norm_squared() > 1e-20 * scale)) {
    throw std::domain_error("linearly dependent spin orbitals: determinant vanishes");
  }
  return acc.normalized();
}

HeliumState parse_helium_state(std::string_view label) {
  if (label == "ground") return HeliumState::ground;
  if (label == "singlet1") return HeliumState::singlet1;
  if (label == "triplet_m1") return HeliumState::triplet_m1;
  if (label == "triplet_m0") return HeliumState::triplet_m0;
  if (label == "triplet_m-1") return HeliumState::triplet_mm1;
  throw std::invalid_argument("unknown helium state '" + std::string(label) + "'");
}

StateVector helium_state(HeliumState state) {
  const double r = 1.0 / std::numbers::sqrt2;
  const auto canonical = SystemSignature::electrons(2);
  using enum Spin;

  auto two_spins = [&](std::initializer_list<std::pair<double, std::pair<Spin, Spin>>> parts) {
    StateVector s(SystemSignature::spins(2));
    for (const auto& [c, ss] : parts) s.add(c, spin_ket({ss.first, ss.second}));
    return s;
  };
  const StateVector singlet = two_spins({{r, {up, down}}, {-r, {down, up}}});

  if (state == HeliumState::ground) {
    const StateVector spatial = tensor(orbital(OrbitalLabel::s1, 1), orbital(OrbitalLabel::s1, 2));
    return tensor(spatial, singlet).reordered(canonical);
  }
  const StateVector a = tensor(orbital(OrbitalLabel::s1, 1), orbital(OrbitalLabel::s2, 2));
  const StateVector b = tensor(orbital(OrbitalLabel::s2, 1), orbital(OrbitalLabel::s1, 2));
  const StateVector sym = Complex(r, 0.0) * (a + b);
  const StateVector anti = Complex(r, 0.0) * (a - b);
  switch (state) {
    case HeliumState::singlet1: return tensor(sym, singlet).reordered(canonical);
    case HeliumState::triplet_m1: return tensor(anti, two_spins({{1.0, {up, up}}})).reordered(canonical);
    case HeliumState::triplet_m0:
      return tensor(anti, two_spins({{r, {up, down}}, {r, {down, up}}})).reordered(canonical);
    default: return tensor(anti, two_spins({{1.0, {down, down}}})).reordered(canonical);
  }
}

StateVector lithium_state() {
  const std::vector<StateVector> columns = {spin_orbital(OrbitalLabel::s1, Spin::up),
                                            spin_orbital(OrbitalLabel::s1, Spin::down),
                                            spin_orbital(OrbitalLabel::s2, Spin::up)};
  return slater_determinant(columns);
}

BondKind parse_bond_kind(std::string_view label) {
  if (label == "single") return BondKind::single;
  if (label == "double") return BondKind::double_;
  throw std::invalid_argument("unknown bond kind '" + std::string(label) + "'");
}

StateVector bonding_orbital(double separation, int electron) {
  if (!std::isfinite(separation) || separation <= 0.0) {
    throw std::invalid_argument("bond separation must be positive (degenerate centers)");
  }
  const double shift = separation / std::numbers::sqrt2;
  StateVector b(SystemSignature::orbital(electron));
  for (double s : {shift, -shift}) {
    ProductKet k;
    k.entries = {ModeEntry{{s, 0.0}, 0}, ModeEntry{{}, 0}, ModeEntry{{}, 1}};
    b.add(1.0, std::move(k));
  }
  return b.normalized();
}

StateVector pi_bond(BondKind kind, double separation) {
  const StateVector b = bonding_orbital(separation);
  if (kind == BondKind::single) return spin_orbital(b, Spin::up);
  const std::vector<StateVector> pair = {spin_orbital(b, Spin::up), spin_orbital(b, Spin::down)};
  return slater_determinant(pair);
}

}  // namespace hetwig
