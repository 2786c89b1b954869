#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hetwig/engine.hpp"
#include "hetwig/states.hpp"

namespace hetwig {

enum class OpacityMode { marginal, constant };

/// Square lattice in the xz-plane at y = plane_value.
struct GridSpec {
  double extent = 4.5;  // both axes span [-extent, extent]
  int count = 61;       // points per axis
  double plane_value = 0.0;

  double spacing() const { return 2.0 * extent / (count - 1); }
  double coordinate(int i) const { return -extent + i * spacing(); }
};

/// Texture sample directions on each sphere: polar Theta_i = pi i/(n_theta - 1)
/// (poles included) and azimuth Phi_j = 2 pi j / n_phi.
struct SphereSampling {
  int n_theta = 24;
  int n_phi = 12;

  double polar(int i) const;
  double azimuth(int j) const;
};

/// Mode factor whose PositionMarginal is driven by one lattice coordinate.
struct GridBinding {
  std::size_t factor = 0;
  Axis axis = Axis::x;
};

struct FigureRecipe {
  GridSpec grid;
  SphereSampling sphere;
  OpacityMode opacity = OpacityMode::marginal;
  double threshold = 0.1;
  /// Template plan. Bound factors are overwritten per lattice point; spins in
  /// EqualAngle group 0 are the ones painted on the spheres.
  ReductionPlan plan;
  std::vector<GridBinding> bindings;
  bool arrows = false;
  int threads = 1;

  /// Binds all three modes of `electron` to the lattice.
  static std::vector<GridBinding> bind_electron(const SystemSignature& signature, int electron);

  void validate(const SystemSignature& signature) const;
};

struct SceneGlyph {
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  double radius = 0.0;
  double opacity = 1.0;
  /// n_theta x n_phi conditional Wigner values, see SphereSampling.
  Eigen::MatrixXd texture;
  std::optional<Eigen::Vector3d> arrow;
};

struct Scene {
  static constexpr int kSchemaVersion = 1;

  std::string colormap = "diverging-blue-white-red";
  double range_min = -1.0;
  double range_max = 1.0;
  char plane_axis = 'y';
  double plane_value = 0.0;
  /// Ordered by lattice index; this is also the compositing tie-break.
  std::vector<SceneGlyph> glyphs;
};

/// Builds the glyph lattice. Opacity is W(q)/max W over the lattice (or 1 in
/// constant mode); glyphs below the threshold are dropped. Texture values are
/// the conditional spin Wigner function W(q, Omega)/W(q). Without lattice
/// bindings the scene is one unit sphere at the origin.
/// Throws std::domain_error when the marginal vanishes on the whole lattice.
Scene build_scene(const DensityOperator& rho, const FigureRecipe& recipe);
Scene build_scene(const StateVector& psi, const FigureRecipe& recipe);

std::string scene_to_json(const Scene& scene);
Scene scene_from_json(const std::string& text);

/// Writes the versioned JSON document. Throws std::runtime_error on I/O failure.
void export_scene(const Scene& scene, const std::filesystem::path& path);
Scene import_scene(const std::filesystem::path& path);

}  // namespace hetwig
