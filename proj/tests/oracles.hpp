#pragma once

// Independent brute-force references the tests check the library against.
// Everything here is written for clarity over speed and stays deliberately
// separate from the implementations in src/.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <vector>

#include "lslp/point_cloud.hpp"
#include "lslp/rng.hpp"

namespace oracle {

inline std::vector<int> knn(const lslp::PointCloud& pc, const lslp::Vec3& query, int m) {
  std::vector<std::pair<double, int>> d;
  for (int i = 0; i < pc.size(); ++i) d.emplace_back((pc[i] - query).norm(), i);
  std::sort(d.begin(), d.end());
  std::vector<int> idx;
  for (int i = 0; i < m; ++i) idx.push_back(d[static_cast<std::size_t>(i)].second);
  return idx;
}

inline double chamfer(const lslp::PointCloud& x, const lslp::PointCloud& y) {
  double total = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    double best = 1e300;
    for (int j = 0; j < y.size(); ++j) best = std::min(best, (x[i] - y[j]).squaredNorm());
    total += best;
  }
  for (int j = 0; j < y.size(); ++j) {
    double best = 1e300;
    for (int i = 0; i < x.size(); ++i) best = std::min(best, (x[i] - y[j]).squaredNorm());
    total += best;
  }
  return total;
}

/// Minimum over all bijections of the summed distances. Factorial cost; keep
/// n <= 8.
inline double emd_permutations(const lslp::PointCloud& x, const lslp::PointCloud& y) {
  std::vector<int> perm(static_cast<std::size_t>(y.size()));
  std::iota(perm.begin(), perm.end(), 0);
  double best = 1e300;
  do {
    double cost = 0.0;
    for (int i = 0; i < x.size(); ++i) cost += (x[i] - y[perm[static_cast<std::size_t>(i)]]).norm();
    best = std::min(best, cost);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

inline std::vector<double> voxel_hist(const std::vector<lslp::PointCloud>& set, int res) {
  std::vector<double> h(static_cast<std::size_t>(res * res * res), 0.0);
  double total = 0.0;
  for (const auto& pc : set) {
    for (const auto& p : pc.points) {
      auto cell = [&](double c) {
        int i = static_cast<int>(std::floor((c + 1.0) / 2.0 * res));
        return std::clamp(i, 0, res - 1);
      };
      h[static_cast<std::size_t>((cell(p.x()) * res + cell(p.y())) * res + cell(p.z()))] += 1.0;
      total += 1.0;
    }
  }
  for (auto& v : h) v /= total;
  return h;
}

inline double jsd(const std::vector<lslp::PointCloud>& a, const std::vector<lslp::PointCloud>& b,
                  int res) {
  const auto p = voxel_hist(a, res);
  const auto q = voxel_hist(b, res);
  auto kl = [](const std::vector<double>& s, const std::vector<double>& t) {
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (s[i] > 0.0) acc += s[i] * std::log(s[i] / t[i]);
    return acc;
  };
  std::vector<double> m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m[i] = 0.5 * (p[i] + q[i]);
  return 0.5 * kl(p, m) + 0.5 * kl(q, m);
}

using CloudDistFn = std::function<double(const lslp::PointCloud&, const lslp::PointCloud&)>;

inline double coverage(const std::vector<lslp::PointCloud>& a, const std::vector<lslp::PointCloud>& b,
                       const CloudDistFn& dist) {
  std::vector<bool> marked(b.size(), false);
  for (const auto& x : a) {
    std::size_t best = 0;
    double best_d = 1e300;
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double d = dist(x, b[j]);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    marked[best] = true;
  }
  int count = 0;
  for (bool m : marked) count += m ? 1 : 0;
  return static_cast<double>(count) / static_cast<double>(b.size());
}

inline double mmd(const std::vector<lslp::PointCloud>& a, const std::vector<lslp::PointCloud>& b,
                  const CloudDistFn& dist) {
  double acc = 0.0;
  for (const auto& y : b) {
    double best = 1e300;
    for (const auto& x : a) best = std::min(best, dist(x, y));
    acc += best;
  }
  return acc / static_cast<double>(b.size());
}

// --- shared fixture helpers ---

inline lslp::PointCloud random_cloud(int n, lslp::Rng& rng, double scale = 1.0) {
  lslp::PointCloud pc;
  pc.points.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    pc.points.emplace_back(scale * (2.0 * rng.uniform() - 1.0), scale * (2.0 * rng.uniform() - 1.0),
                           scale * (2.0 * rng.uniform() - 1.0));
  return pc;
}

inline lslp::PointCloud permuted(const lslp::PointCloud& pc, lslp::Rng& rng) {
  std::vector<int> order(static_cast<std::size_t>(pc.size()));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  lslp::PointCloud out;
  for (int i : order) out.points.push_back(pc[i]);
  return out;
}

}  // namespace oracle
