#include "lslp/point_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lslp {

bool PointCloud::all_finite() const {
  for (const auto& p : points) {
    if (!p.allFinite()) return false;
  }
  return true;
}

void ResolutionLadder::validate() const {
  if (n0 < 2) throw InvalidArgument("ResolutionLadder: n0 must be >= 2, got " + std::to_string(n0));
  if (refinements < 1)
    throw InvalidArgument("ResolutionLadder: refinements must be >= 1, got " + std::to_string(refinements));
  if (static_cast<int>(latent_dims.size()) != refinements + 1)
    throw InvalidArgument("ResolutionLadder: expected " + std::to_string(refinements + 1) +
                          " latent dims, got " + std::to_string(latent_dims.size()));
  for (int d : latent_dims) {
    if (d < 1) throw InvalidArgument("ResolutionLadder: latent dims must be positive");
  }
}

PointCloud NormalizeTransform::apply(const PointCloud& pc) const {
  PointCloud out;
  out.points.reserve(pc.points.size());
  for (const auto& p : pc.points) out.points.push_back(apply(p));
  return out;
}

NormalizeTransform unit_sphere_transform(const PointCloud& pc) {
  if (pc.empty()) throw InvalidArgument("normalize_unit_sphere: empty cloud");
  Vec3 centroid = Vec3::Zero();
  for (const auto& p : pc.points) centroid += p;
  centroid /= static_cast<double>(pc.size());

  double max_norm = 0.0;
  for (const auto& p : pc.points) max_norm = std::max(max_norm, (p - centroid).norm());
  if (max_norm < 1e-12)
    throw InvalidArgument("normalize_unit_sphere: degenerate cloud, all points coincident");

  return NormalizeTransform{centroid, 1.0 / max_norm};
}

PointCloud normalize_unit_sphere(const PointCloud& pc) {
  return unit_sphere_transform(pc).apply(pc);
}

std::vector<int> knn(const PointCloud& pc, const Vec3& query, int m) {
  const int n = pc.size();
  if (m < 1 || m > n)
    throw InvalidArgument("knn: m must be in [1, n], got m=" + std::to_string(m) +
                          " n=" + std::to_string(n));

  std::vector<std::pair<double, int>> dist(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    dist[static_cast<std::size_t>(i)] = {(pc[i] - query).squaredNorm(), i};
  }
  // (distance, index) pairs; index as tie-breaker keeps the result deterministic
  std::partial_sort(dist.begin(), dist.begin() + m, dist.end());

  std::vector<int> idx(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) idx[static_cast<std::size_t>(i)] = dist[static_cast<std::size_t>(i)].second;
  return idx;
}

PointCloud knn_upsample(const PointCloud& pc, int m) {
  const int n = pc.size();
  if (n < 1) throw InvalidArgument("knn_upsample: empty cloud");
  if (m < 1) throw InvalidArgument("knn_upsample: m must be positive");
  const int m_eff = std::min(m, n);

  PointCloud out;
  out.points.reserve(static_cast<std::size_t>(2 * n));
  out.points = pc.points;
  for (int i = 0; i < n; ++i) {
    const auto nbrs = knn(pc, pc[i], m_eff);
    Vec3 mean = Vec3::Zero();
    for (int j : nbrs) mean += pc[j];
    out.points.push_back(mean / static_cast<double>(m_eff));
  }
  return out;
}

std::vector<int> farthest_point_order(const PointCloud& pc, int n_target, std::uint64_t seed) {
  const int n = pc.size();
  if (n < 1) throw InvalidArgument("farthest_point_order: empty cloud");
  if (n_target < 1 || n_target > n)
    throw InvalidArgument("farthest_point_order: n_target must be in [1, n], got n_target=" +
                          std::to_string(n_target) + " n=" + std::to_string(n));

  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n_target));
  std::vector<double> min_dist(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  std::vector<char> selected(static_cast<std::size_t>(n), 0);

  int current = static_cast<int>(seed % static_cast<std::uint64_t>(n));
  order.push_back(current);
  selected[static_cast<std::size_t>(current)] = 1;
  for (int picked = 1; picked < n_target; ++picked) {
    int best = -1;
    double best_dist = -1.0;
    for (int i = 0; i < n; ++i) {
      auto& md = min_dist[static_cast<std::size_t>(i)];
      md = std::min(md, (pc[i] - pc[current]).squaredNorm());
      // duplicated points make md == 0 for unselected indices, so the
      // selected flag (not the distance) must exclude prior picks
      if (!selected[static_cast<std::size_t>(i)] && md > best_dist) {
        best_dist = md;
        best = i;
      }
    }
    current = best;
    order.push_back(current);
    selected[static_cast<std::size_t>(current)] = 1;
  }
  return order;
}

PointCloud farthest_point_subsample(const PointCloud& pc, int n_target, std::uint64_t seed) {
  const auto order = farthest_point_order(pc, n_target, seed);
  PointCloud out;
  out.points.reserve(order.size());
  for (int i : order) out.points.push_back(pc[i]);
  return out;
}

}  // namespace lslp
