#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>

namespace lslp {

using Vec3 = Eigen::Vector3d;

/// Base class for everything this library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad caller input: size mismatches, out-of-range counts, invalid params.
struct InvalidArgument : Error {
  using Error::Error;
};

/// Filesystem / stream failures.
struct IoError : Error {
  using Error::Error;
};

/// Malformed or corrupt serialized data (clouds, checkpoints, manifests).
struct FormatError : Error {
  using Error::Error;
};

/// Training aborted: divergence, non-finite loss.
struct TrainingError : Error {
  using Error::Error;
};

// Network parameters are kept exactly representable in float32 so that
// checkpoints (float32 payload) round-trip bitwise. Arithmetic stays in
// double; values are snapped back after init and after each optimizer step.
inline double round_f32(double x) { return static_cast<double>(static_cast<float>(x)); }

inline void round_f32_inplace(Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = round_f32(m.data()[i]);
}

inline void round_f32_inplace(Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = round_f32(v[i]);
}

// FNV-1a, used for artifact hashes in run manifests and checkpoint checksums.
inline std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string to_hex(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return s;
}

}  // namespace lslp
