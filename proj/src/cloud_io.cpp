#include "lslp/cloud_io.hpp"

#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace lslp {

namespace {

void append_double(std::string& out, double v) {
  char buf[32];
  // shortest representation that round-trips a double
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

}  // namespace

std::string to_xyz_string(const PointCloud& pc) {
  std::string out;
  out.reserve(static_cast<std::size_t>(pc.size()) * 24);
  for (const auto& p : pc.points) {
    append_double(out, p.x());
    out.push_back(' ');
    append_double(out, p.y());
    out.push_back(' ');
    append_double(out, p.z());
    out.push_back('\n');
  }
  return out;
}

PointCloud from_xyz_string(const std::string& text) {
  PointCloud pc;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    Vec3 p;
    if (!(ls >> p.x() >> p.y() >> p.z()))
      throw FormatError("xyz: malformed line " + std::to_string(line_no) + ": '" + line + "'");
    pc.points.push_back(p);
  }
  if (pc.empty()) throw FormatError("xyz: no points");
  return pc;
}

std::string to_pcld_bytes(const PointCloud& pc) {
  std::string out;
  out.reserve(8 + static_cast<std::size_t>(pc.size()) * 12);
  out.append("PCLD", 4);
  const std::uint32_t n = static_cast<std::uint32_t>(pc.size());
  char hdr[4];
  std::memcpy(hdr, &n, 4);
  out.append(hdr, 4);
  for (const auto& p : pc.points) {
    float xyz[3] = {static_cast<float>(p.x()), static_cast<float>(p.y()), static_cast<float>(p.z())};
    char raw[12];
    std::memcpy(raw, xyz, 12);
    out.append(raw, 12);
  }
  return out;
}

PointCloud from_pcld_bytes(const std::string& bytes) {
  if (bytes.size() < 8 || bytes.compare(0, 4, "PCLD") != 0)
    throw FormatError("pcld: bad magic");
  std::uint32_t n = 0;
  std::memcpy(&n, bytes.data() + 4, 4);
  if (bytes.size() != 8 + static_cast<std::size_t>(n) * 12)
    throw FormatError("pcld: payload size mismatch, header says " + std::to_string(n) + " points");
  if (n == 0) throw FormatError("pcld: no points");

  PointCloud pc;
  pc.points.reserve(n);
  const char* cur = bytes.data() + 8;
  for (std::uint32_t i = 0; i < n; ++i) {
    float xyz[3];
    std::memcpy(xyz, cur, 12);
    cur += 12;
    pc.points.emplace_back(static_cast<double>(xyz[0]), static_cast<double>(xyz[1]),
                           static_cast<double>(xyz[2]));
  }
  return pc;
}

void save_cloud(const PointCloud& pc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for write: " + path.string());
  const std::string data = path.extension() == ".xyz" ? to_xyz_string(pc) : to_pcld_bytes(pc);
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

PointCloud load_cloud(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string data = ss.str();
  if (path.extension() == ".xyz") return from_xyz_string(data);
  return from_pcld_bytes(data);
}

}  // namespace lslp
