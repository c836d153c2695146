#pragma once

#include <map>
#include <string>
#include <vector>

#include "lslp/point_cloud.hpp"

namespace lslp {

/// Which cloud-to-cloud distance set-level metrics use.
enum class CloudDist { chamfer, emd };

std::string to_string(CloudDist d);
CloudDist cloud_dist_from_string(const std::string& s);

/// Sum of squared nearest-neighbour distances in both directions.
/// Symmetric; zero iff the two point sets are equal as sets.
double chamfer(const PointCloud& x, const PointCloud& y);

/// Chamfer normalized by total point count, comparable across resolutions.
double chamfer_mean(const PointCloud& x, const PointCloud& y);

/// Exact earth mover's distance between equal-size clouds: the minimum over
/// bijections of the summed Euclidean (not squared) distances, solved with an
/// O(n^3) assignment algorithm. Limited to n <= 512; larger inputs are
/// redirected to emd_approx.
double emd_exact(const PointCloud& x, const PointCloud& y);

struct EmdResult {
  double cost = 0.0;
  std::vector<int> match;  // match[i] = index in y assigned to x[i]
};

EmdResult emd_exact_match(const PointCloud& x, const PointCloud& y);

/// Approximate EMD via an auction assignment with epsilon scaling. The value
/// is the cost of a feasible bijection, so it never undershoots emd_exact;
/// scaling stops once the certified optimality gap n*eps is below
/// tol * (cost - n*eps), which bounds the relative excess over the optimum
/// by tol. With tol = 0.05 the result is within 5% of emd_exact.
double emd_approx(const PointCloud& x, const PointCloud& y, double tol = 0.05);

EmdResult emd_approx_match(const PointCloud& x, const PointCloud& y, double tol = 0.05);

/// EMD normalized per point (mean matching distance).
double emd_mean(const PointCloud& x, const PointCloud& y, double tol = 0.05);

/// Jensen-Shannon divergence between the voxel-occupancy histograms of two
/// sets of clouds, natural log, over a grid_res^3 grid spanning [-1,1]^3.
/// Points outside the cube are clamped into the boundary voxels. Result lies
/// in [0, ln 2].
double jsd(const std::vector<PointCloud>& a, const std::vector<PointCloud>& b, int grid_res = 28);

/// Fraction of clouds in b that are the nearest neighbour of at least one
/// cloud in a. In [0, 1].
double coverage(const std::vector<PointCloud>& a, const std::vector<PointCloud>& b,
                CloudDist dist = CloudDist::chamfer, int threads = 1);

/// Mean over b of the distance to its closest cloud in a.
double mmd(const std::vector<PointCloud>& a, const std::vector<PointCloud>& b,
           CloudDist dist = CloudDist::chamfer, int threads = 1);

/// One named scalar result plus the configuration that produced it.
/// Serialized one record per line: `metric=<name> value=<decimal> k=v ...`
struct MetricReport {
  std::string name;
  double value = 0.0;
  std::map<std::string, std::string> config;

  std::string to_record() const;
  static MetricReport from_record(const std::string& line);
};

}  // namespace lslp
