#include "lslp/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace lslp {

namespace {

struct Canvas {
  int w, h;
  std::vector<unsigned char> rgb;

  Canvas(int width, int height, unsigned char fill = 255)
      : w(width), h(height), rgb(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3, fill) {}

  void set(int x, int y, unsigned char r, unsigned char g, unsigned char b) {
    if (x < 0 || x >= w || y < 0 || y >= h) return;
    const std::size_t i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)) * 3;
    rgb[i] = r;
    rgb[i + 1] = g;
    rgb[i + 2] = b;
  }

  void write_ppm(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("render: cannot write " + path.string());
    out << "P6\n" << w << " " << h << "\n255\n";
    out.write(reinterpret_cast<const char*>(rgb.data()), static_cast<std::streamsize>(rgb.size()));
    if (!out) throw IoError("render: write failed " + path.string());
  }
};

}  // namespace

void render_cloud_ppm(const PointCloud& pc, const std::filesystem::path& path, int size) {
  if (pc.empty()) throw InvalidArgument("render_cloud_ppm: empty cloud");
  if (size < 16) throw InvalidArgument("render_cloud_ppm: image too small");
  Canvas img(size, size);

  double lo = 1e300, hi = -1e300;
  for (const auto& p : pc.points) {
    lo = std::min({lo, p.x(), p.y()});
    hi = std::max({hi, p.x(), p.y()});
  }
  const double span = std::max(hi - lo, 1e-9);
  const double margin = 0.05;
  const double scale = (1.0 - 2.0 * margin) * static_cast<double>(size) / span;

  double zlo = 1e300, zhi = -1e300;
  for (const auto& p : pc.points) {
    zlo = std::min(zlo, p.z());
    zhi = std::max(zhi, p.z());
  }
  const double zspan = std::max(zhi - zlo, 1e-9);

  for (const auto& p : pc.points) {
    const int x = static_cast<int>(margin * size + (p.x() - lo) * scale);
    const int y = size - 1 - static_cast<int>(margin * size + (p.y() - lo) * scale);
    const double depth = (p.z() - zlo) / zspan;
    const auto shade = static_cast<unsigned char>(40.0 + 160.0 * (1.0 - depth));
    for (int dy = 0; dy <= 1; ++dy)
      for (int dx = 0; dx <= 1; ++dx) img.set(x + dx, y + dy, shade, shade, 230);
  }
  img.write_ppm(path);
}

void render_curve_ppm(const std::vector<double>& values, const std::filesystem::path& path,
                      int width, int height) {
  if (values.empty()) throw InvalidArgument("render_curve_ppm: no values");
  if (width < 16 || height < 16) throw InvalidArgument("render_curve_ppm: image too small");
  Canvas img(width, height);

  double lo = *std::min_element(values.begin(), values.end());
  double hi = *std::max_element(values.begin(), values.end());
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }

  auto to_px = [&](std::size_t i, double v) {
    const int x = values.size() == 1
                      ? width / 2
                      : static_cast<int>(8 + (static_cast<double>(i) / static_cast<double>(values.size() - 1)) * (width - 16));
    const int y = static_cast<int>(8 + (1.0 - (v - lo) / (hi - lo)) * (height - 16));
    return std::pair<int, int>{x, y};
  };

  // axis baseline
  for (int x = 0; x < width; ++x) img.set(x, height - 8, 200, 200, 200);

  for (std::size_t i = 0; i + 1 < values.size() || i == 0; ++i) {
    const auto [x0, y0] = to_px(i, values[i]);
    const auto [x1, y1] = values.size() == 1 ? std::pair<int, int>{x0, y0} : to_px(i + 1, values[i + 1]);
    const int steps = std::max({std::abs(x1 - x0), std::abs(y1 - y0), 1});
    for (int s = 0; s <= steps; ++s) {
      const double t = static_cast<double>(s) / steps;
      img.set(static_cast<int>(std::lround(x0 + t * (x1 - x0))),
              static_cast<int>(std::lround(y0 + t * (y1 - y0))), 180, 40, 40);
    }
    if (values.size() == 1) break;
  }
  img.write_ppm(path);
}

}  // namespace lslp
