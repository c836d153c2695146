#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "lslp/point_cloud.hpp"

namespace lslp {

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;

  bool empty() const { return faces.empty(); }
};

/// OBJ subset: `v x y z` and `f i j k ...` lines (1-based indices, optional
/// /vt/vn suffixes ignored, polygons fan-triangulated). Zero-area faces are
/// dropped. Throws FormatError on anything unreadable.
TriangleMesh load_obj(const std::filesystem::path& path);
TriangleMesh parse_obj(const std::string& text);

/// n points sampled area-uniformly: face picked with probability
/// proportional to area, position by uniform barycentric coordinates.
PointCloud sample_mesh_surface(const TriangleMesh& mesh, int n, std::uint64_t seed);

enum class ShapeKind { sphere, torus, box, cylinder };

std::string to_string(ShapeKind k);
ShapeKind shape_kind_from_string(const std::string& s);

/// Parametric surface description. Meaning of (a, b, c) per kind:
///   sphere:   a = radius
///   torus:    a = major radius, b = tube radius
///   box:      a, b, c = half-extents
///   cylinder: a = radius, b = height
struct ShapeSpec {
  ShapeKind kind = ShapeKind::sphere;
  double a = 1.0;
  double b = 0.3;
  double c = 1.0;

  void validate() const;
};

/// n points area-uniform on the parametric surface, deterministic given seed.
PointCloud synthetic_shape(const ShapeSpec& spec, int n, std::uint64_t seed);

/// One shape sampled consistently at every ladder resolution. With nested
/// sampling (the default) lower levels are exact subsets of higher ones
/// (farthest-point prefixes); independent sampling draws each level
/// separately. All levels share the normalization transform computed at the
/// finest level either way.
struct LadderedShape {
  std::string id;
  std::string shape_class;
  std::uint64_t seed = 0;
  std::vector<PointCloud> clouds;  // X_0 .. X_K
};

enum class LadderSampling { nested, independent };

LadderedShape build_ladder(const PointCloud& source, const ResolutionLadder& ladder,
                           std::uint64_t seed, LadderSampling sampling = LadderSampling::nested);
LadderedShape build_ladder(const TriangleMesh& mesh, const ResolutionLadder& ladder,
                           std::uint64_t seed, LadderSampling sampling = LadderSampling::nested);

/// Class-labelled mixture of jittered parametric shapes, a desk-scale
/// stand-in for mesh datasets. Classes cycle through the first
/// `classes` shape kinds.
struct SyntheticDatasetSpec {
  int count = 200;
  int classes = 4;  // 1..4
  double jitter = 0.25;

  void validate() const;
};

std::vector<LadderedShape> make_synthetic_dataset(const SyntheticDatasetSpec& spec,
                                                  const ResolutionLadder& ladder,
                                                  std::uint64_t seed);

/// On-disk dataset: one directory per shape with the ladder's cloud files and
/// a shape manifest, plus a top-level manifest with the ladder config and a
/// deterministic train/test split.
struct Dataset {
  ResolutionLadder ladder;
  std::vector<LadderedShape> shapes;
  std::vector<int> train_indices;
  std::vector<int> test_indices;

  std::vector<PointCloud> clouds_at(int level, const std::vector<int>& indices) const;
};

void write_dataset(const Dataset& ds, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

/// Shuffles deterministically and splits off `test_fraction` of the shapes.
void assign_split(Dataset& ds, double test_fraction, std::uint64_t seed);

}  // namespace lslp
