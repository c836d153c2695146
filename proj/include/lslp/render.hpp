#pragma once

#include <filesystem>
#include <vector>

#include "lslp/point_cloud.hpp"

namespace lslp {

/// Orthographic scatter render (XY view, depth-shaded) to a binary PPM.
void render_cloud_ppm(const PointCloud& pc, const std::filesystem::path& path, int size = 512);

/// Connected line plot of a value series (loss curves) to a binary PPM.
void render_curve_ppm(const std::vector<double>& values, const std::filesystem::path& path,
                      int width = 640, int height = 360);

}  // namespace lslp
