#pragma once

#include <filesystem>
#include <string>

#include "lslp/point_cloud.hpp"

namespace lslp {

// Two interchangeable cloud file formats:
//  - ASCII XYZ: one "x y z" line per point, '.' decimal separator, written
//    with enough digits that load(save(pc)) reproduces every coordinate.
//  - binary PCLD: 8-byte header (magic "PCLD" + uint32 LE count), then
//    count * 3 little-endian float32 values. save(load(file)) is bitwise
//    identical to file.

std::string to_xyz_string(const PointCloud& pc);
PointCloud from_xyz_string(const std::string& text);

std::string to_pcld_bytes(const PointCloud& pc);
PointCloud from_pcld_bytes(const std::string& bytes);

void save_cloud(const PointCloud& pc, const std::filesystem::path& path);  // format by extension
PointCloud load_cloud(const std::filesystem::path& path);

}  // namespace lslp
