#include "hetwig/figures.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace hetwig {
namespace {

using nlohmann::json;

FigureRecipe base_recipe(const FigureOptions& o, OpacityMode default_opacity) {
  FigureRecipe r;
  r.grid = o.grid;
  r.sphere = o.sphere;
  r.opacity = o.opacity.value_or(default_opacity);
  r.threshold = o.threshold;
  r.arrows = o.arrows;
  r.threads = o.threads;
  return r;
}

/// Traced plan with the spins of `electrons` in equal-angle group 0.
ReductionPlan spin_plan(const SystemSignature& sig, std::initializer_list<int> electrons) {
  ReductionPlan plan = ReductionPlan::traced(sig);
  for (int e : electrons) plan[sig.spin_of(e).value()] = EqualAngle{0};
  return plan;
}

/// Every factor of `electron`.
std::vector<std::size_t> electron_factors(const SystemSignature& sig, int electron) {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < sig.size(); ++f) {
    if (sig[f].electron == electron) out.push_back(f);
  }
  return out;
}

Figure lattice_figure(std::string name, std::string title, StateVector state,
                      ReductionPlan plan, OpacityMode default_opacity, const FigureOptions& o) {
  Figure fig;
  fig.name = std::move(name);
  fig.title = std::move(title);
  fig.recipe = base_recipe(o, default_opacity);
  fig.recipe.plan = std::move(plan);
  fig.recipe.bindings = FigureRecipe::bind_electron(state.signature(), 1);
  fig.state = std::move(state);
  return fig;
}

double parse_number(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw std::invalid_argument("bad number '" + std::string(text) + "' in " + std::string(what));
  }
  return v;
}

std::pair<double, double> parse_pair(std::string_view text, std::string_view what) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw std::invalid_argument(std::string(what) + " needs <a>:<b>");
  return {parse_number(text.substr(0, colon), what), parse_number(text.substr(colon + 1), what)};
}

Complex parse_complex(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw std::invalid_argument("complex numbers are [re, im] or a real number");
}

}  // namespace

Figure reference_figure(char panel, const FigureOptions& o) {
  StateVector state = reference_spin_state(panel);
  Figure fig;
  fig.name = std::string("reference-") + panel;
  fig.title = std::string("reference spin state (") + panel + ")";
  fig.recipe = base_recipe(o, OpacityMode::constant);
  fig.recipe.plan = ReductionPlan(std::vector<Directive>(state.signature().size(), EqualAngle{0}));
  if (state.signature().size() > 1) fig.entropy_cut = std::vector<std::size_t>{0};
  fig.state = std::move(state);
  return fig;
}

Figure hydrogen_orbital_figure(OrbitalLabel label, Spin spin, const FigureOptions& o) {
  StateVector state = spin_orbital(label, spin, 1);
  ReductionPlan plan = spin_plan(state.signature(), {1});
  auto fig = lattice_figure("hydrogen-" + to_string(label) + (spin == Spin::up ? "-up" : "-down"),
                            "hydrogen " + to_string(label) + (spin == Spin::up ? " spin up" : " spin down"),
                            std::move(state), std::move(plan), OpacityMode::marginal, o);
  fig.entropy_cut = fig.state.signature().modes_of(1);
  return fig;
}

Figure hydrogen_jm_figure(int two_j, int two_m, const FigureOptions& o) {
  StateVector state = jm_state(two_j, two_m);
  ReductionPlan plan = spin_plan(state.signature(), {1});
  const std::string jm = std::to_string(two_j) + "_2-" + (two_m < 0 ? "m" : "") +
                         std::to_string(std::abs(two_m)) + "_2";
  auto fig = lattice_figure("hydrogen-j" + jm,
                            "hydrogen |j=" + std::to_string(two_j) + "/2, m=" + std::to_string(two_m) + "/2>",
                            std::move(state), std::move(plan), OpacityMode::marginal, o);
  fig.entropy_cut = fig.state.signature().modes_of(1);
  return fig;
}

Figure helium_figure(HeliumState which, const FigureOptions& o) {
  static constexpr const char* kNames[] = {"ground", "singlet1", "triplet_m1", "triplet_m0", "triplet_m-1"};
  const std::string label = kNames[static_cast<int>(which)];
  StateVector state = helium_state(which);
  ReductionPlan plan = spin_plan(state.signature(), {1, 2});
  auto fig = lattice_figure("helium-" + label, "helium " + label, std::move(state), std::move(plan),
                            OpacityMode::marginal, o);
  fig.entropy_cut = electron_factors(fig.state.signature(), 1);
  return fig;
}

Figure lithium_figure(char slice, const FigureOptions& o) {
  StateVector state = lithium_state();
  const auto& sig = state.signature();
  ReductionPlan plan;
  OpacityMode opacity = OpacityMode::marginal;
  switch (slice) {
    case 'a': plan = spin_plan(sig, {1, 2, 3}); break;
    case 'b': plan = spin_plan(sig, {1}); break;
    case 'c': plan = spin_plan(sig, {1, 2}); opacity = OpacityMode::constant; break;
    case 'd': plan = spin_plan(sig, {2, 3}); opacity = OpacityMode::constant; break;
    default: throw std::invalid_argument(std::string("unknown lithium slice '") + slice + "'");
  }
  auto fig = lattice_figure(std::string("lithium-") + slice, std::string("lithium slice (") + slice + ")",
                            std::move(state), std::move(plan), opacity, o);
  fig.entropy_cut = electron_factors(fig.state.signature(), 1);
  return fig;
}

Figure molecule_figure(BondKind kind, double separation, const FigureOptions& o) {
  StateVector state = pi_bond(kind, separation);
  ReductionPlan plan = kind == BondKind::single ? spin_plan(state.signature(), {1})
                                                : spin_plan(state.signature(), {1, 2});
  const std::string k = kind == BondKind::single ? "single" : "double";
  auto fig = lattice_figure("molecule-" + k, k + " pi bond", std::move(state), std::move(plan),
                            OpacityMode::marginal, o);
  fig.entropy_cut = kind == BondKind::single ? fig.state.signature().modes_of(1)
                                             : electron_factors(fig.state.signature(), 1);
  return fig;
}

Figure custom_figure(const StateVector& state, const ReductionPlan& plan,
                     const std::vector<GridBinding>& bindings, const FigureOptions& o) {
  Figure fig;
  fig.name = "custom";
  fig.title = "custom state";
  fig.recipe = base_recipe(o, OpacityMode::marginal);
  fig.recipe.plan = plan;
  fig.recipe.bindings = bindings;
  fig.state = state;
  return fig;
}

int parse_half_integer(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    return 2 * static_cast<int>(std::lround(parse_number(text, "quantum number")));
  }
  if (text.substr(slash + 1) != "2") throw std::invalid_argument("quantum numbers are n or n/2");
  const double num = parse_number(text.substr(0, slash), "quantum number");
  if (num != std::round(num)) throw std::invalid_argument("quantum numbers are n or n/2");
  return static_cast<int>(num);
}

StateVector parse_state_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    std::vector<Factor> factors;
    for (const auto& l : doc.at("signature")) factors.push_back(Factor::parse(l.get<std::string>()));
    const SystemSignature sig(std::move(factors));
    StateVector psi(sig);
    for (const auto& t : doc.at("terms")) {
      const auto& ket = t.at("ket");
      if (ket.size() != sig.size()) throw std::invalid_argument("ket length differs from signature");
      ProductKet k;
      for (std::size_t f = 0; f < sig.size(); ++f) {
        const auto& e = ket[f];
        if (sig[f].is_spin()) {
          const auto s = e.get<std::string>();
          if (s != "up" && s != "down") throw std::invalid_argument("spin entries are \"up\" or \"down\"");
          k.entries.emplace_back(s == "up" ? Spin::up : Spin::down);
        } else if (e.is_number_integer()) {
          k.entries.emplace_back(ModeEntry{{0.0, 0.0}, e.get<int>()});
        } else {
          ModeEntry m;
          m.fock = e.at("fock").get<int>();
          if (e.contains("displacement")) m.displacement = parse_complex(e.at("displacement"));
          k.entries.emplace_back(m);
        }
      }
      psi.add(parse_complex(t.at("amplitude")), std::move(k));
    }
    return psi.normalized();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("state file: ") + e.what());
  } catch (const std::domain_error& e) {
    throw std::invalid_argument(std::string("state file: ") + e.what());
  }
}

PlanSpec parse_plan_spec(std::string_view text, const SystemSignature& sig) {
  std::vector<std::string_view> tokens;
  for (std::size_t start = 0;;) {
    const auto comma = text.find(',', start);
    tokens.push_back(text.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (tokens.size() != sig.size()) {
    throw std::invalid_argument("plan has " + std::to_string(tokens.size()) + " tokens for " +
                                std::to_string(sig.size()) + " factors");
  }
  PlanSpec out;
  std::vector<Directive> d;
  for (std::size_t f = 0; f < sig.size(); ++f) {
    const std::string_view t = tokens[f];
    const std::string where = "plan token '" + std::string(t) + "' for " + sig[f].label();
    if (t == "trace") {
      d.emplace_back(Trace{});
    } else if (sig[f].is_spin()) {
      if (t == "eq") {
        d.emplace_back(EqualAngle{0});
      } else if (t.starts_with("angle=")) {
        const auto [th, ph] = parse_pair(t.substr(6), where);
        d.emplace_back(SphereAngle{{th, ph}});
      } else {
        throw std::invalid_argument(where + ": spins take trace, eq or angle=<theta>:<phi>");
      }
    } else if (t == "grid") {
      d.emplace_back(Trace{});
      out.bindings.push_back({f, sig[f].axis});
    } else if (t.starts_with("q=")) {
      d.emplace_back(PositionMarginal{parse_number(t.substr(2), where)});
    } else if (t.starts_with("p=")) {
      d.emplace_back(MomentumMarginal{parse_number(t.substr(2), where)});
    } else if (t.starts_with("fixed=")) {
      const auto [q, p] = parse_pair(t.substr(6), where);
      d.emplace_back(Fixed{{q, p}});
    } else {
      throw std::invalid_argument(where + ": modes take grid, trace, q=, p= or fixed=<q>:<p>");
    }
  }
  out.plan = ReductionPlan(std::move(d));
  out.plan.validate(sig);
  return out;
}

}  // namespace hetwig
