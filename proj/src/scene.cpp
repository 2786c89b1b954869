#include "hetwig/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "hetwig/parallel.hpp"

namespace hetwig {
namespace {

using nlohmann::json;

// Conditional textures are left at zero where the marginal is this small
// relative to the lattice maximum; the ratio is meaningless there.
constexpr double kRelativeUnderflow = 1e-14;

double lattice_value(const GridSpec& g, Axis axis, int iu, int iv) {
  switch (axis) {
    case Axis::x: return g.coordinate(iu);
    case Axis::y: return g.plane_value;
    case Axis::z: return g.coordinate(iv);
  }
  return 0.0;
}

std::vector<std::size_t> open_spins(const ReductionPlan& plan) {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < plan.size(); ++f) {
    if (std::holds_alternative<EqualAngle>(plan[f])) out.push_back(f);
  }
  return out;
}

json vec3(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

Eigen::Vector3d vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw std::runtime_error("scene: expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

double SphereSampling::polar(int i) const { return kPi * i / (n_theta - 1); }
double SphereSampling::azimuth(int j) const { return 2.0 * kPi * j / n_phi; }

std::vector<GridBinding> FigureRecipe::bind_electron(const SystemSignature& signature,
                                                     int electron) {
  std::vector<GridBinding> out;
  for (Axis a : {Axis::x, Axis::y, Axis::z}) {
    out.push_back({signature.index_of(Factor::mode(a, electron)), a});
  }
  return out;
}

void FigureRecipe::validate(const SystemSignature& signature) const {
  if (grid.count < 2) throw std::invalid_argument("grid count must be >= 2");
  if (!(grid.extent > 0.0) || !std::isfinite(grid.extent)) {
    throw std::invalid_argument("grid extent must be positive and finite");
  }
  if (sphere.n_theta < 2 || sphere.n_phi < 2) throw std::invalid_argument("sphere sample counts must be >= 2");
  if (!(threshold >= 0.0 && threshold < 1.0)) throw std::invalid_argument("threshold must lie in [0, 1)");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  plan.validate(signature);
  if (plan.group_count() > 1) throw std::invalid_argument("figure plans use a single equal-angle group");
  for (const auto& b : bindings) {
    if (b.factor >= signature.size() || !signature[b.factor].is_mode()) {
      throw std::invalid_argument("grid binding must name a mode factor");
    }
  }
  if (arrows && open_spins(plan).size() != 1) {
    throw std::invalid_argument("arrows need exactly one displayed spin");
  }
}

Scene build_scene(const DensityOperator& rho, const FigureRecipe& recipe) {
  recipe.validate(rho.signature());

  const bool lattice = !recipe.bindings.empty();
  const int side = lattice ? recipe.grid.count : 1;
  const std::size_t points = static_cast<std::size_t>(side) * side;

  // Pass 1: conditional spin operator at every lattice point.
  std::vector<SpinConditional> conditionals(points);
  parallel_for(points, recipe.threads, [&](std::size_t idx) {
    const int iu = static_cast<int>(idx % side);
    const int iv = static_cast<int>(idx / side);
    ReductionPlan plan = recipe.plan;
    for (const auto& b : recipe.bindings) {
      plan[b.factor] = PositionMarginal{lattice_value(recipe.grid, b.axis, iu, iv)};
    }
    conditionals[idx] = conditional_spin_operator(rho, plan);
  });

  double w_max = 0.0;
  for (const auto& c : conditionals) w_max = std::max(w_max, c.trace());
  if (!(w_max > 0.0)) throw std::domain_error("position marginal vanishes on the whole grid");

  Scene scene;
  scene.plane_value = recipe.grid.plane_value;

  std::vector<std::size_t> kept;
  std::vector<double> alpha(points, 1.0);
  for (std::size_t idx = 0; idx < points; ++idx) {
    if (recipe.opacity == OpacityMode::marginal) {
      alpha[idx] = std::clamp(conditionals[idx].trace() / w_max, 0.0, 1.0);
    }
    if (alpha[idx] >= recipe.threshold) kept.push_back(idx);
  }

  // Kernel products for every texture direction, shared by all glyphs.
  const std::size_t n_open = open_spins(recipe.plan).size();
  const int nt = recipe.sphere.n_theta, np = recipe.sphere.n_phi;
  std::vector<Eigen::MatrixXcd> kernels(static_cast<std::size_t>(nt) * np);
  for (int i = 0; i < nt; ++i) {
    for (int j = 0; j < np; ++j) {
      const SpinAngle a{recipe.sphere.polar(i) / 2.0, recipe.sphere.azimuth(j) / 2.0};
      const std::vector<SpinAngle> angles(n_open, a);
      kernels[static_cast<std::size_t>(i * np + j)] = spin_kernel_product(angles);
    }
  }

  const double radius = lattice ? recipe.grid.spacing() / 2.0 : 1.0;
  scene.glyphs.resize(kept.size());
  parallel_for(kept.size(), recipe.threads, [&](std::size_t k) {
    const std::size_t idx = kept[k];
    const auto& c = conditionals[idx];
    SceneGlyph& g = scene.glyphs[k];
    if (lattice) {
      const int iu = static_cast<int>(idx % side), iv = static_cast<int>(idx / side);
      g.center = {recipe.grid.coordinate(iu), recipe.grid.plane_value, recipe.grid.coordinate(iv)};
    } else {
      g.center = {0.0, recipe.grid.plane_value, 0.0};
    }
    g.radius = radius;
    g.opacity = alpha[idx];
    g.texture = Eigen::MatrixXd::Zero(nt, np);
    const double weight = c.trace();
    if (weight > kRelativeUnderflow * w_max) {
      for (int i = 0; i < nt; ++i) {
        for (int j = 0; j < np; ++j) {
          g.texture(i, j) = contract(c, kernels[static_cast<std::size_t>(i * np + j)]) / weight;
        }
      }
    }
    if (recipe.arrows) {
      const BlochField b = bloch_vector(c);
      if (!b.underflow) g.arrow = b.vector;
    }
  });
  return scene;
}

Scene build_scene(const StateVector& psi, const FigureRecipe& recipe) {
  return build_scene(DensityOperator::pure(psi), recipe);
}

std::string scene_to_json(const Scene& scene) {
  json glyphs = json::array();
  for (const auto& g : scene.glyphs) {
    json values = json::array();
    for (Eigen::Index i = 0; i < g.texture.rows(); ++i) {
      for (Eigen::Index j = 0; j < g.texture.cols(); ++j) values.push_back(g.texture(i, j));
    }
    glyphs.push_back({
        {"center", vec3(g.center)},
        {"radius", g.radius},
        {"opacity", g.opacity},
        {"texture", {{"n_theta", g.texture.rows()}, {"n_phi", g.texture.cols()}, {"values", values}}},
        {"arrow", g.arrow ? vec3(*g.arrow) : json(nullptr)},
    });
  }
  const json doc = {
      {"version", Scene::kSchemaVersion},
      {"colormap", {{"name", scene.colormap}, {"range", {scene.range_min, scene.range_max}}}},
      {"plane", {{"axis", std::string(1, scene.plane_axis)}, {"value", scene.plane_value}}},
      {"glyphs", glyphs},
  };
  // max_digits10 round-trips doubles exactly.
  return doc.dump(1);
}

Scene scene_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("scene: malformed JSON: ") + e.what());
  }
  try {
    if (doc.at("version").get<int>() != Scene::kSchemaVersion) {
      throw std::runtime_error("scene: unsupported schema version");
    }
    Scene scene;
    scene.colormap = doc.at("colormap").at("name").get<std::string>();
    scene.range_min = doc.at("colormap").at("range").at(0).get<double>();
    scene.range_max = doc.at("colormap").at("range").at(1).get<double>();
    const auto axis = doc.at("plane").at("axis").get<std::string>();
    if (axis.size() != 1) throw std::runtime_error("scene: bad plane axis");
    scene.plane_axis = axis[0];
    scene.plane_value = doc.at("plane").at("value").get<double>();
    for (const auto& jg : doc.at("glyphs")) {
      SceneGlyph g;
      g.center = vec3(jg.at("center"));
      g.radius = jg.at("radius").get<double>();
      g.opacity = jg.at("opacity").get<double>();
      const auto& t = jg.at("texture");
      const auto rows = t.at("n_theta").get<Eigen::Index>();
      const auto cols = t.at("n_phi").get<Eigen::Index>();
      const auto& values = t.at("values");
      if (rows < 0 || cols < 0 || values.size() != static_cast<std::size_t>(rows * cols)) {
        throw std::runtime_error("scene: texture size mismatch");
      }
      g.texture.resize(rows, cols);
      for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
          g.texture(i, j) = values[static_cast<std::size_t>(i * cols + j)].get<double>();
        }
      }
      if (!jg.at("arrow").is_null()) g.arrow = vec3(jg.at("arrow"));
      scene.glyphs.push_back(std::move(g));
    }
    return scene;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("scene: ") + e.what());
  }
}

void export_scene(const Scene& scene, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << scene_to_json(scene) << '\n';
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Scene import_scene(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return scene_from_json(buf.str());
}

}  // namespace hetwig
