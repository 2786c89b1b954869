#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Core>

#include "hetwig/scene.hpp"

namespace hetwig {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// 8-bit RGB raster, row-major from the top-left corner.
class Image {
 public:
  Image(int width, int height, Rgb fill = {});

  int width() const { return width_; }
  int height() const { return height_; }
  Rgb at(int x, int y) const;
  void set(int x, int y, Rgb c);
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  int width_, height_;
  std::vector<std::uint8_t> bytes_;
};

/// Diverging map over [-1, 1]: white at 0, blue for positive values, red for
/// negative ones. Inputs are clamped; v and -v give red/blue mirror pairs.
std::array<double, 3> colormap(double v);
Rgb colormap_rgb(double v);

/// Orthographic camera looking along +y onto the xz-plane. Image columns run
/// along +x, rows along -z.
struct Camera {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();  // (x, z)
  double half_width = 1.0;
  double half_height = 1.0;

  /// Frames every glyph with a small margin at the canvas aspect ratio.
  static Camera fit(const Scene& scene, int width, int height);
};

struct RenderOptions {
  int width = 800;
  int height = 800;
  Rgb background{170, 170, 170};
  Rgb arrow_color{20, 20, 20};
  int threads = 1;
};

/// Painter's compositing, farthest glyph (largest y) first and ties in scene
/// order. A sphere pixel with outward normal n shows the texture sample whose
/// spin-kernel direction is n, so colors and arrows share one frame.
/// Throws std::invalid_argument for canvases below 64x64 or a degenerate camera.
Image render(const Scene& scene, const Camera& camera, const RenderOptions& options = {});

/// Bilinear lookup in a glyph texture at polar Theta in [0, pi] and azimuth
/// Phi (periodic).
double sample_texture(const Eigen::MatrixXd& texture, double polar, double azimuth);

std::vector<std::uint8_t> encode_ppm(const Image& image);
std::vector<std::uint8_t> encode_png(const Image& image);

/// Throw std::runtime_error on I/O failure.
void write_ppm(const Image& image, const std::filesystem::path& path);
void write_png(const Image& image, const std::filesystem::path& path);

}  // namespace hetwig
