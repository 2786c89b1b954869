#include "hetwig/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

#include <zlib.h>

#include "hetwig/parallel.hpp"

namespace hetwig {
namespace {

// Positive branch anchors at |v| = 0, 0.5, 1.
constexpr std::array<std::array<double, 3>, 3> kBlueRamp{{
    {1.00, 1.00, 1.00},
    {0.60, 0.73, 1.00},
    {0.23, 0.30, 0.75},
}};

std::uint8_t to_byte(double c) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0));
}

struct PixelFrame {
  double x0, z0, dx, dz;  // world coordinates of pixel (0, 0) center and steps

  double x(int col) const { return x0 + col * dx; }
  double z(int row) const { return z0 - row * dz; }
  double col(double x) const { return (x - x0) / dx; }
  double row(double z) const { return (z0 - z) / dz; }
};

// Pixels covered by a 1-pixel-wide segment, as flat indices.
void rasterize_segment(double c0, double r0, double c1, double r1, int width, int height,
                       int thickness, std::vector<int>& out) {
  const double len = std::hypot(c1 - c0, r1 - r0);
  const int steps = std::max(1, static_cast<int>(std::ceil(len * 4.0)));
  for (int s = 0; s <= steps; ++s) {
    const double t = static_cast<double>(s) / steps;
    const int c = static_cast<int>(std::floor(c0 + t * (c1 - c0)));
    const int r = static_cast<int>(std::floor(r0 + t * (r1 - r0)));
    for (int dr = 0; dr < thickness; ++dr) {
      for (int dc = 0; dc < thickness; ++dc) {
        const int cc = c + dc - thickness / 2, rr = r + dr - thickness / 2;
        if (cc >= 0 && cc < width && rr >= 0 && rr < height) out.push_back(rr * width + cc);
      }
    }
  }
}

std::vector<int> arrow_pixels(const SceneGlyph& g, const PixelFrame& f, int width, int height) {
  std::vector<int> px;
  const Eigen::Vector2d a{g.arrow->x(), g.arrow->z()};  // projected onto the image plane
  const double len = 0.9 * g.radius * a.norm();
  if (len <= 0.0) return px;
  const Eigen::Vector2d dir = a.normalized();
  const Eigen::Vector2d c{g.center.x(), g.center.z()};
  const Eigen::Vector2d tip = c + len * dir;
  const int thickness = std::max(1, width / 400);
  auto seg = [&](const Eigen::Vector2d& p, const Eigen::Vector2d& q) {
    rasterize_segment(f.col(p.x()) + 0.5, f.row(p.y()) + 0.5, f.col(q.x()) + 0.5,
                      f.row(q.y()) + 0.5, width, height, thickness, px);
  };
  seg(c, tip);
  const double head = 0.35 * len, spread = 0.45;  // radians
  for (double s : {spread, -spread}) {
    const Eigen::Vector2d back{-(dir.x() * std::cos(s) - dir.y() * std::sin(s)),
                               -(dir.x() * std::sin(s) + dir.y() * std::cos(s))};
    seg(tip, tip + head * back);
  }
  std::sort(px.begin(), px.end());
  px.erase(std::unique(px.begin(), px.end()), px.end());
  return px;
}

void append_chunk(std::vector<std::uint8_t>& out, const char* type,
                  const std::vector<std::uint8_t>& data) {
  const auto n = static_cast<std::uint32_t>(data.size());
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(n >> s));
  const std::size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const auto crc = static_cast<std::uint32_t>(
      crc32(0L, out.data() + start, static_cast<uInt>(out.size() - start)));
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(crc >> s));
}

void write_bytes(const std::vector<std::uint8_t>& bytes, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

Image::Image(int width, int height, Rgb fill) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("image dimensions must be positive");
  bytes_.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < bytes_.size(); i += 3) {
    bytes_[i] = fill.r;
    bytes_[i + 1] = fill.g;
    bytes_[i + 2] = fill.b;
  }
}

Rgb Image::at(int x, int y) const {
  const auto i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  return {bytes_.at(i), bytes_.at(i + 1), bytes_.at(i + 2)};
}

void Image::set(int x, int y, Rgb c) {
  const auto i = (static_cast<std::size_t>(y) * width_ + x) * 3;
  bytes_.at(i) = c.r;
  bytes_.at(i + 1) = c.g;
  bytes_.at(i + 2) = c.b;
}

std::array<double, 3> colormap(double v) {
  if (std::isnan(v)) v = 0.0;
  const double t = std::min(std::abs(v), 1.0);
  const std::size_t k = t < 0.5 ? 0 : 1;
  const double u = (t - 0.5 * k) / 0.5;
  std::array<double, 3> c;
  for (std::size_t i = 0; i < 3; ++i) c[i] = kBlueRamp[k][i] + u * (kBlueRamp[k + 1][i] - kBlueRamp[k][i]);
  if (v < 0.0) std::swap(c[0], c[2]);
  return c;
}

Rgb colormap_rgb(double v) {
  const auto c = colormap(v);
  return {to_byte(c[0]), to_byte(c[1]), to_byte(c[2])};
}

Camera Camera::fit(const Scene& scene, int width, int height) {
  Camera cam;
  if (scene.glyphs.empty()) return cam;
  double x_lo = INFINITY, x_hi = -INFINITY, z_lo = INFINITY, z_hi = -INFINITY;
  for (const auto& g : scene.glyphs) {
    x_lo = std::min(x_lo, g.center.x() - g.radius);
    x_hi = std::max(x_hi, g.center.x() + g.radius);
    z_lo = std::min(z_lo, g.center.z() - g.radius);
    z_hi = std::max(z_hi, g.center.z() + g.radius);
  }
  cam.center = {0.5 * (x_lo + x_hi), 0.5 * (z_lo + z_hi)};
  double hw = 0.5 * (x_hi - x_lo) * 1.04, hh = 0.5 * (z_hi - z_lo) * 1.04;
  const double aspect = static_cast<double>(width) / height;
  if (hw / hh < aspect) {
    hw = hh * aspect;
  } else {
    hh = hw / aspect;
  }
  cam.half_width = hw;
  cam.half_height = hh;
  return cam;
}

double sample_texture(const Eigen::MatrixXd& texture, double polar, double azimuth) {
  const auto nt = texture.rows(), np = texture.cols();
  const double t = std::clamp(polar / kPi, 0.0, 1.0) * static_cast<double>(nt - 1);
  const auto i0 = std::min<Eigen::Index>(static_cast<Eigen::Index>(t), nt - 2);
  const double ft = t - static_cast<double>(i0);
  double a = azimuth / (2.0 * kPi);
  a -= std::floor(a);
  const double s = a * static_cast<double>(np);
  const auto j0 = std::min<Eigen::Index>(static_cast<Eigen::Index>(s), np - 1);
  const auto j1 = (j0 + 1) % np;
  const double fs = s - static_cast<double>(j0);
  const double top = (1.0 - fs) * texture(i0, j0) + fs * texture(i0, j1);
  const double bottom = (1.0 - fs) * texture(i0 + 1, j0) + fs * texture(i0 + 1, j1);
  return (1.0 - ft) * top + ft * bottom;
}

Image render(const Scene& scene, const Camera& camera, const RenderOptions& options) {
  const int w = options.width, h = options.height;
  if (w < 64 || h < 64) throw std::invalid_argument("canvas must be at least 64x64");
  if (!(camera.half_width > 0.0) || !(camera.half_height > 0.0) ||
      !std::isfinite(camera.half_width) || !std::isfinite(camera.half_height) ||
      !camera.center.allFinite()) {
    throw std::invalid_argument("degenerate camera");
  }
  for (const auto& g : scene.glyphs) {
    if (g.texture.rows() < 2 || g.texture.cols() < 1) throw std::invalid_argument("glyph texture too small");
  }

  const PixelFrame frame{camera.center.x() - camera.half_width + camera.half_width / w,
                         camera.center.y() + camera.half_height - camera.half_height / h,
                         2.0 * camera.half_width / w, 2.0 * camera.half_height / h};

  std::vector<std::size_t> order(scene.glyphs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scene.glyphs[a].center.y() > scene.glyphs[b].center.y();
  });

  std::vector<std::vector<int>> arrows(scene.glyphs.size());
  for (std::size_t k = 0; k < scene.glyphs.size(); ++k) {
    if (scene.glyphs[k].arrow) arrows[k] = arrow_pixels(scene.glyphs[k], frame, w, h);
  }

  const std::array<double, 3> bg{options.background.r / 255.0, options.background.g / 255.0,
                                 options.background.b / 255.0};
  const std::array<double, 3> ink{options.arrow_color.r / 255.0, options.arrow_color.g / 255.0,
                                  options.arrow_color.b / 255.0};
  std::vector<double> acc(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = bg[i % 3];

  auto blend = [&](int pixel, const std::array<double, 3>& c, double alpha) {
    double* p = &acc[static_cast<std::size_t>(pixel) * 3];
    for (int ch = 0; ch < 3; ++ch) p[ch] = (1.0 - alpha) * p[ch] + alpha * c[static_cast<std::size_t>(ch)];
  };

  // Rows are independent, so bands give identical bytes for any thread count.
  const int band = 16;
  const int bands = (h + band - 1) / band;
  parallel_for(static_cast<std::size_t>(bands), options.threads, [&](std::size_t b) {
    const int row_lo = static_cast<int>(b) * band, row_hi = std::min(h, row_lo + band);
    for (std::size_t k : order) {
      const SceneGlyph& g = scene.glyphs[k];
      const double alpha = std::clamp(g.opacity, 0.0, 1.0);
      const int r0 = std::max(row_lo, static_cast<int>(std::floor(frame.row(g.center.z() + g.radius))));
      const int r1 = std::min(row_hi - 1, static_cast<int>(std::ceil(frame.row(g.center.z() - g.radius))));
      const int c0 = std::max(0, static_cast<int>(std::floor(frame.col(g.center.x() - g.radius))));
      const int c1 = std::min(w - 1, static_cast<int>(std::ceil(frame.col(g.center.x() + g.radius))));
      for (int r = r0; r <= r1; ++r) {
        const double v = (frame.z(r) - g.center.z()) / g.radius;
        for (int c = c0; c <= c1; ++c) {
          const double u = (frame.x(c) - g.center.x()) / g.radius;
          const double rr = u * u + v * v;
          if (rr > 1.0) continue;
          // Visible hemisphere faces the camera at -y.
          const double ny = -std::sqrt(1.0 - rr);
          const double polar = std::acos(std::clamp(v, -1.0, 1.0));
          const double azimuth = std::atan2(ny, -u);
          blend(r * w + c, colormap(sample_texture(g.texture, polar, azimuth)), alpha);
        }
      }
      for (int pixel : arrows[k]) {
        const int r = pixel / w;
        if (r >= row_lo && r < row_hi) blend(pixel, ink, alpha);
      }
    }
  });

  Image img(w, h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double* p = &acc[(static_cast<std::size_t>(r) * w + c) * 3];
      img.set(c, r, {to_byte(p[0]), to_byte(p[1]), to_byte(p[2])});
    }
  }
  return img;
}

std::vector<std::uint8_t> encode_ppm(const Image& image) {
  const std::string header =
      "P6\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.bytes().begin(), image.bytes().end());
  return out;
}

std::vector<std::uint8_t> encode_png(const Image& image) {
  const auto w = static_cast<std::uint32_t>(image.width());
  const auto h = static_cast<std::uint32_t>(image.height());
  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>(h) * (w * 3 + 1));
  for (std::uint32_t r = 0; r < h; ++r) {
    raw.push_back(0);  // filter: none
    const auto row = image.bytes().begin() + static_cast<std::ptrdiff_t>(r) * w * 3;
    raw.insert(raw.end(), row, row + static_cast<std::ptrdiff_t>(w) * 3);
  }
  uLongf zsize = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> z(zsize);
  if (compress2(z.data(), &zsize, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK) {
    throw std::runtime_error("zlib compression failed");
  }
  z.resize(zsize);

  std::vector<std::uint8_t> out{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  std::vector<std::uint8_t> ihdr;
  for (std::uint32_t v : {w, h}) {
    for (int s = 24; s >= 0; s -= 8) ihdr.push_back(static_cast<std::uint8_t>(v >> s));
  }
  ihdr.insert(ihdr.end(), {8, 2, 0, 0, 0});  // 8-bit truecolor
  append_chunk(out, "IHDR", ihdr);
  append_chunk(out, "IDAT", z);
  append_chunk(out, "IEND", {});
  return out;
}

void write_ppm(const Image& image, const std::filesystem::path& path) {
  write_bytes(encode_ppm(image), path);
}

void write_png(const Image& image, const std::filesystem::path& path) {
  write_bytes(encode_png(image), path);
}

}  // namespace hetwig
