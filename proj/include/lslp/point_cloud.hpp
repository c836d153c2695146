#pragma once

#include <cstdint>
#include <vector>

#include "lslp/common.hpp"

namespace lslp {

/// An ordered list of 3D points. Order carries no semantics; every metric in
/// this library is permutation-invariant. Coordinates are dimensionless after
/// normalize_unit_sphere.
struct PointCloud {
  std::vector<Vec3> points;

  PointCloud() = default;
  explicit PointCloud(std::vector<Vec3> pts) : points(std::move(pts)) {}
  PointCloud(std::initializer_list<Vec3> pts) : points(pts) {}

  int size() const { return static_cast<int>(points.size()); }
  bool empty() const { return points.empty(); }
  const Vec3& operator[](int i) const { return points[static_cast<std::size_t>(i)]; }
  Vec3& operator[](int i) { return points[static_cast<std::size_t>(i)]; }

  bool all_finite() const;
};

/// The series of resolutions n_k = 2^k * n0, k = 0..refinements, plus the
/// latent dimension of each level.
struct ResolutionLadder {
  int n0 = 0;
  int refinements = 0;              // number of doubling steps above the base level
  std::vector<int> latent_dims;     // size refinements + 1

  int stages() const { return refinements + 1; }
  int resolution_at(int level) const { return n0 << level; }
  int latent_dim_at(int level) const { return latent_dims[static_cast<std::size_t>(level)]; }

  /// Throws InvalidArgument unless n0 >= 2, refinements >= 1, and every
  /// latent dim is positive.
  void validate() const;
};

/// Recenters to the origin and scales so the farthest point sits on the unit
/// sphere. Throws InvalidArgument on an empty or degenerate (all points
/// coincident) cloud.
PointCloud normalize_unit_sphere(const PointCloud& pc);

/// Transform captured at one resolution so a whole ladder can share it.
struct NormalizeTransform {
  Vec3 center = Vec3::Zero();
  double inv_scale = 1.0;

  Vec3 apply(const Vec3& p) const { return (p - center) * inv_scale; }
  PointCloud apply(const PointCloud& pc) const;
};

NormalizeTransform unit_sphere_transform(const PointCloud& pc);

/// Indices of the m nearest points to `query`, sorted by nondecreasing
/// Euclidean distance, ties broken by lower index. Throws when m is outside
/// [1, n].
std::vector<int> knn(const PointCloud& pc, const Vec3& query, int m);

/// The non-learned doubling operator: for each point x, appends the mean of
/// the m nearest neighbours of x (NN includes x itself). m is clamped to the
/// cloud size, so small clouds are legal. Output is the n originals followed
/// by the n new points.
PointCloud knn_upsample(const PointCloud& pc, int m = 7);

/// Greedy farthest-point subsampling. The first index is seed % n; every
/// following pick maximizes the min distance to the selected set (ties by
/// lower index). Deterministic given (pc, n_target, seed).
PointCloud farthest_point_subsample(const PointCloud& pc, int n_target, std::uint64_t seed);

/// Same selection, but returning the chosen indices in pick order. The prefix
/// property makes nested ladders: the first n points of one ordering are the
/// FPS subset of size n.
std::vector<int> farthest_point_order(const PointCloud& pc, int n_target, std::uint64_t seed);

}  // namespace lslp
