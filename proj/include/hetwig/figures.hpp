#pragma once

// Catalogue of the glyph figures: reference spin states, hydrogen, helium,
// lithium slices, pi bonds, and user-supplied states.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hetwig/scene.hpp"
#include "hetwig/states.hpp"

namespace hetwig {

/// Options shared by every figure; unset fields keep the figure's own choice.
struct FigureOptions {
  GridSpec grid;
  SphereSampling sphere;
  std::optional<OpacityMode> opacity;
  double threshold = 0.1;
  bool arrows = false;
  int threads = 1;
};

struct Figure {
  std::string name;  // file stem
  std::string title;
  StateVector state;
  FigureRecipe recipe;
  /// Signature indices of one side of the bipartition reported as
  /// entanglement entropy, when the figure has a natural one.
  std::optional<std::vector<std::size_t>> entropy_cut;
};

Figure reference_figure(char panel, const FigureOptions& options);
Figure hydrogen_orbital_figure(OrbitalLabel label, Spin spin, const FigureOptions& options);
/// Doubled quantum numbers.
Figure hydrogen_jm_figure(int two_j, int two_m, const FigureOptions& options);
Figure helium_figure(HeliumState state, const FigureOptions& options);
/// Slices 'a'..'d'; electron 1 rides the lattice in each.
Figure lithium_figure(char slice, const FigureOptions& options);
Figure molecule_figure(BondKind kind, double separation, const FigureOptions& options);
Figure custom_figure(const StateVector& state, const ReductionPlan& plan,
                     const std::vector<GridBinding>& bindings, const FigureOptions& options);

/// Parses "5/2", "-1/2" or "3" into a doubled integer.
int parse_half_integer(std::string_view text);

/// State file: {"signature": ["x1", "y1", "z1", "s1"], "terms": [{"amplitude": [re, im],
/// "ket": [{"fock": 2, "displacement": [re, im]}, 0, 0, "up"]}]}. A bare integer
/// is an undisplaced Fock level; "displacement" is optional. The state is
/// normalized. Throws std::invalid_argument for malformed documents.
StateVector parse_state_json(const std::string& text);

struct PlanSpec {
  ReductionPlan plan;
  std::vector<GridBinding> bindings;
};

/// One comma-separated token per signature factor:
///   modes: grid | trace | q=<v> | p=<v> | fixed=<q>:<p>
///   spins: trace | eq | angle=<theta>:<phi>
/// "grid" binds the mode to the lattice along its own axis.
PlanSpec parse_plan_spec(std::string_view text, const SystemSignature& signature);

}  // namespace hetwig
