#include "hetwig/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"

#include "hetwig/engine.hpp"
#include "hetwig/figures.hpp"
#include "hetwig/render.hpp"
#include "hetwig/scene.hpp"

namespace hetwig::cli {
namespace {

namespace fs = std::filesystem;

/// Bad flag value detected after CLI11 parsing; maps to exit code 2.
struct FlagError : std::runtime_error {
  FlagError(const std::string& flag, const std::string& what) : std::runtime_error(flag + ": " + what) {}
};

struct CommonFlags {
  int grid = 61;
  double extent = 4.5;
  std::string sphere_samples = "24x12";
  std::string opacity_mode;  // empty: figure default
  double threshold = 0.1;
  std::string output;
  bool png = false;
  std::string scene_out;
  bool arrows = false;
  int threads = 1;
  int canvas = 800;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--grid", f.grid, "Lattice points per axis")->capture_default_str();
  sub->add_option("--extent", f.extent, "Lattice half-width; both axes span [-X, X]")->capture_default_str();
  sub->add_option("--sphere-samples", f.sphere_samples, "Texture samples per sphere, polar x azimuthal (TxP)")
      ->capture_default_str();
  sub->add_option("--opacity-mode", f.opacity_mode,
                  "marginal | constant (default: marginal; constant for lithium slices c and d)")
      ->check(CLI::IsMember({"marginal", "constant"}));
  sub->add_option("--threshold", f.threshold, "Drop glyphs with opacity below this value")->capture_default_str();
  sub->add_option("--output", f.output,
                  std::string("Image path (binary PPM; default: <figure>.ppm in $") + kOutputDirEnv +
                      " or the working directory)");
  sub->add_flag("--png", f.png, "Also write a PNG next to the PPM");
  sub->add_option("--scene-out", f.scene_out, "Write the scene as JSON to this path");
  sub->add_flag("--arrows", f.arrows, "Draw conditional Bloch vectors (single displayed spin only)");
  sub->add_option("--threads", f.threads, "Worker threads for grid evaluation and rendering")->capture_default_str();
  sub->add_option("--canvas", f.canvas, "Square canvas size in pixels")->capture_default_str();
}

FigureOptions resolve(const CommonFlags& f) {
  FigureOptions o;
  if (f.grid < 2) throw FlagError("--grid", "needs at least 2 points");
  if (!(f.extent > 0.0) || !std::isfinite(f.extent)) throw FlagError("--extent", "must be positive");
  o.grid.count = f.grid;
  o.grid.extent = f.extent;

  const auto x = f.sphere_samples.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument("missing x");
    std::size_t used = 0;
    o.sphere.n_theta = std::stoi(f.sphere_samples.substr(0, x), &used);
    if (used != x) throw std::invalid_argument("trailing characters");
    const std::string rest = f.sphere_samples.substr(x + 1);
    o.sphere.n_phi = std::stoi(rest, &used);
    if (used != rest.size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw FlagError("--sphere-samples", "expected TxP, e.g. 24x12");
  }
  if (o.sphere.n_theta < 2 || o.sphere.n_phi < 2) throw FlagError("--sphere-samples", "counts must be >= 2");

  if (f.opacity_mode == "marginal") o.opacity = OpacityMode::marginal;
  if (f.opacity_mode == "constant") o.opacity = OpacityMode::constant;
  if (!(f.threshold >= 0.0 && f.threshold < 1.0)) throw FlagError("--threshold", "must lie in [0, 1)");
  o.threshold = f.threshold;
  if (f.threads < 1) throw FlagError("--threads", "must be >= 1");
  o.threads = f.threads;
  o.arrows = f.arrows;
  if (f.canvas < 64) throw FlagError("--canvas", "must be at least 64");
  return o;
}

fs::path resolve_output(const CommonFlags& f, const std::string& stem) {
  fs::path path;
  if (!f.output.empty()) {
    path = f.output;
  } else {
    const char* dir = std::getenv(kOutputDirEnv);
    path = fs::path(dir && *dir ? dir : ".") / (stem + ".ppm");
  }
  const fs::path parent = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  std::error_code ec;
  if (!fs::is_directory(parent, ec)) {
    throw FlagError(f.output.empty() ? std::string("$") + kOutputDirEnv : "--output",
                    "directory " + parent.string() + " does not exist");
  }
  return path;
}

void check_scene_out(const CommonFlags& f) {
  if (f.scene_out.empty()) return;
  const fs::path parent = fs::path(f.scene_out).parent_path();
  std::error_code ec;
  if (!parent.empty() && !fs::is_directory(parent, ec)) {
    throw FlagError("--scene-out", "directory " + parent.string() + " does not exist");
  }
}

std::string read_file(const std::string& path, const std::string& flag) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FlagError(flag, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sphere-glyph Wigner function figures for model atoms and molecules", "hetwig"};
  app.require_subcommand(1);
  CommonFlags common;

  auto* reference = app.add_subcommand("reference", "Single-sphere reference spin states (a-h)");
  std::string panel;
  reference->add_option("--panel", panel, "Panel a..h")
      ->required()
      ->check(CLI::IsMember({"a", "b", "c", "d", "e", "f", "g", "h"}));

  auto* hydrogen = app.add_subcommand("hydrogen", "One electron: an orbital with a spin, or a |j, m> state");
  std::string orbital_label, spin_label = "up";
  std::vector<std::string> jm;
  auto* orbital_opt = hydrogen->add_option("--orbital", orbital_label, "1S, 2S, 2Px, 2Py, 2Pz, 3Dxz, 3Dyz, 3Dz2")
                          ->check(CLI::IsMember({"1S", "2S", "2Px", "2Py", "2Pz", "3Dxz", "3Dyz", "3Dz2"}));
  hydrogen->add_option("--spin", spin_label, "up | down")
      ->check(CLI::IsMember({"up", "down"}))
      ->capture_default_str();
  auto* jm_opt = hydrogen->add_option("--jm", jm, "Spin-orbit state of the d shell, e.g. --jm 5/2 1/2")
                     ->expected(2);
  jm_opt->excludes(orbital_opt);

  auto* helium = app.add_subcommand("helium", "Two electrons: ground, singlet1, triplet_m1, triplet_m0, triplet_m-1");
  std::string helium_label;
  helium->add_option("--state", helium_label, "Helium state")
      ->required()
      ->check(CLI::IsMember({"ground", "singlet1", "triplet_m1", "triplet_m0", "triplet_m-1"}));

  auto* lithium = app.add_subcommand("lithium", "Three-electron ground state, slices a-d");
  std::string slice;
  lithium->add_option("--slice", slice, "a: spins 1-3; b: spin 1; c: spins 1,2; d: spins 2,3")
      ->required()
      ->check(CLI::IsMember({"a", "b", "c", "d"}));

  auto* molecule = app.add_subcommand("molecule", "Pi bond between two displaced p_z centres");
  std::string bond;
  double separation = 1.5;
  molecule->add_option("--bond", bond, "single | double")->required()->check(CLI::IsMember({"single", "double"}));
  molecule->add_option("--separation", separation, "Centres at x = +-d")->capture_default_str();

  auto* custom = app.add_subcommand("custom", "State file plus a per-factor reduction plan");
  std::string state_file, plan_text;
  custom->add_option("--state-file", state_file, "JSON state (signature + terms)")->required();
  custom->add_option("--plan", plan_text,
                     "One token per factor: grid|trace|q=V|p=V|fixed=Q:P for modes, trace|eq|angle=T:P for spins")
      ->required();

  for (auto* sub : {reference, hydrogen, helium, lithium, molecule, custom}) add_common(sub, common);

  std::vector<const char*> argv{"hetwig"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  // Flag resolution and state construction; everything here is cheap and
  // every failure is attributable to a flag.
  Figure fig;
  fs::path image_path;
  try {
    const FigureOptions options = resolve(common);
    if (*reference) {
      fig = reference_figure(panel[0], options);
    } else if (*hydrogen) {
      if (!jm.empty()) {
        int two_j = 0, two_m = 0;
        try {
          two_j = parse_half_integer(jm[0]);
          two_m = parse_half_integer(jm[1]);
        } catch (const std::invalid_argument& e) {
          throw FlagError("--jm", e.what());
        }
        if ((two_j != 3 && two_j != 5) || std::abs(two_m) > two_j || (two_m % 2) == 0) {
          throw FlagError("--jm", "d-shell states need j in {3/2, 5/2} and half-integer |m| <= j");
        }
        fig = hydrogen_jm_figure(two_j, two_m, options);
      } else if (!orbital_label.empty()) {
        fig = hydrogen_orbital_figure(parse_orbital_label(orbital_label),
                                      spin_label == "up" ? Spin::up : Spin::down, options);
      } else {
        throw FlagError("--orbital", "hydrogen needs --orbital or --jm");
      }
    } else if (*helium) {
      fig = helium_figure(parse_helium_state(helium_label), options);
    } else if (*lithium) {
      fig = lithium_figure(slice[0], options);
    } else if (*molecule) {
      if (!(separation > 0.0) || !std::isfinite(separation)) throw FlagError("--separation", "must be positive");
      fig = molecule_figure(parse_bond_kind(bond), separation, options);
    } else {
      StateVector state;
      try {
        state = parse_state_json(read_file(state_file, "--state-file"));
      } catch (const std::invalid_argument& e) {
        throw FlagError("--state-file", e.what());
      }
      PlanSpec spec;
      try {
        spec = parse_plan_spec(plan_text, state.signature());
      } catch (const std::invalid_argument& e) {
        throw FlagError("--plan", e.what());
      }
      fig = custom_figure(state, spec.plan, spec.bindings, options);
    }
    try {
      fig.recipe.validate(fig.state.signature());
    } catch (const std::invalid_argument& e) {
      throw FlagError(common.arrows ? "--arrows" : "--plan", e.what());
    }
    image_path = resolve_output(common, fig.name);
    check_scene_out(common);
  } catch (const FlagError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    out << "state: " << fig.title << '\n';
    out << std::fixed << std::setprecision(6) << "norm: " << std::sqrt(fig.state.norm_squared()) << '\n';
    if (fig.entropy_cut) {
      out << std::setprecision(3) << "entanglement entropy: "
          << entanglement_entropy(fig.state, *fig.entropy_cut) << " bits\n";
    }
    const Scene scene = build_scene(fig.state, fig.recipe);
    out << "glyphs: " << scene.glyphs.size() << '\n';

    RenderOptions ro;
    ro.width = ro.height = common.canvas;
    ro.threads = common.threads;
    const Image image = render(scene, Camera::fit(scene, ro.width, ro.height), ro);
    write_ppm(image, image_path);
    out << "image: " << image_path.string() << '\n';
    if (common.png) {
      fs::path png = image_path;
      png.replace_extension(".png");
      write_png(image, png);
      out << "png: " << png.string() << '\n';
    }
    if (!common.scene_out.empty()) {
      export_scene(scene, common.scene_out);
      out << "scene: " << common.scene_out << '\n';
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace hetwig::cli
