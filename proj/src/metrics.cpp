#include "lslp/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace lslp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_pair_nonempty(const PointCloud& x, const PointCloud& y, const char* who) {
  if (x.empty() || y.empty()) throw InvalidArgument(std::string(who) + ": empty cloud");
}

Eigen::MatrixXd distance_matrix(const PointCloud& x, const PointCloud& y) {
  Eigen::MatrixXd d(x.size(), y.size());
  for (int i = 0; i < x.size(); ++i)
    for (int j = 0; j < y.size(); ++j) d(i, j) = (x[i] - y[j]).norm();
  return d;
}

// Assignment by shortest augmenting paths with potentials, O(n^3).
// Returns match[i] = column assigned to row i.
std::vector<int> hungarian(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0), v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0), way(static_cast<std::size_t>(n) + 1, 0);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, kInf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      int j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> match(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) match[static_cast<std::size_t>(p[static_cast<std::size_t>(j)]) - 1] = j - 1;
  return match;
}

// One forward-auction phase at fixed eps. Prices persist across phases,
// assignments do not. Bidding order is FIFO, so the result is deterministic.
void auction_phase(const Eigen::MatrixXd& value, double eps, std::vector<double>& price,
                   std::vector<int>& owner_of, std::vector<int>& object_of) {
  const int n = static_cast<int>(value.rows());
  std::fill(owner_of.begin(), owner_of.end(), -1);
  std::fill(object_of.begin(), object_of.end(), -1);

  std::vector<int> queue(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) queue[static_cast<std::size_t>(i)] = i;
  std::size_t head = 0;

  while (head < queue.size()) {
    const int person = queue[head++];
    // best and second-best net value over objects
    int best_j = 0;
    double best_v = -kInf, second_v = -kInf;
    for (int j = 0; j < n; ++j) {
      const double net = value(person, j) - price[static_cast<std::size_t>(j)];
      if (net > best_v) {
        second_v = best_v;
        best_v = net;
        best_j = j;
      } else if (net > second_v) {
        second_v = net;
      }
    }
    const double bid = (second_v == -kInf) ? eps : (best_v - second_v + eps);
    price[static_cast<std::size_t>(best_j)] += bid;

    const int prev = owner_of[static_cast<std::size_t>(best_j)];
    if (prev >= 0) {
      object_of[static_cast<std::size_t>(prev)] = -1;
      queue.push_back(prev);
    }
    owner_of[static_cast<std::size_t>(best_j)] = person;
    object_of[static_cast<std::size_t>(person)] = best_j;
  }
}

EmdResult emd_auction(const PointCloud& x, const PointCloud& y, double tol) {
  const int n = x.size();
  const Eigen::MatrixXd cost = distance_matrix(x, y);
  if (n == 1) return {cost(0, 0), {0}};

  const double max_c = cost.maxCoeff();
  if (!std::isfinite(max_c)) throw InvalidArgument("emd_approx: non-finite coordinates");
  if (max_c == 0.0) {
    std::vector<int> ident(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ident[static_cast<std::size_t>(i)] = i;
    return {0.0, ident};
  }

  const Eigen::MatrixXd value = -cost;
  const double eps_floor = 1e-12 * max_c;
  double eps = std::max(max_c / 4.0, eps_floor);

  std::vector<double> price(static_cast<std::size_t>(n), 0.0);
  std::vector<int> owner_of(static_cast<std::size_t>(n), -1), object_of(static_cast<std::size_t>(n), -1);

  EmdResult result;
  while (true) {
    auction_phase(value, eps, price, owner_of, object_of);
    double c = 0.0;
    for (int i = 0; i < n; ++i) c += cost(i, object_of[static_cast<std::size_t>(i)]);
    result.cost = c;
    result.match = object_of;

    const double gap = static_cast<double>(n) * eps;  // cost <= optimum + gap
    const double certified_lower = c - gap;
    if (gap <= tol * certified_lower) break;
    if (c <= gap && c <= 1e-9 * max_c * n) break;  // near-zero optimum, gap certificate is vacuous
    if (eps <= eps_floor) break;
    eps = std::max(eps / 5.0, eps_floor);
  }
  return result;
}

int voxel_index(double coord, int res) {
  int i = static_cast<int>(std::floor((coord + 1.0) * 0.5 * static_cast<double>(res)));
  return std::clamp(i, 0, res - 1);
}

std::vector<double> voxel_histogram(const std::vector<PointCloud>& set, int res) {
  std::vector<double> h(static_cast<std::size_t>(res) * static_cast<std::size_t>(res) * static_cast<std::size_t>(res), 0.0);
  double total = 0.0;
  for (const auto& pc : set) {
    for (const auto& p : pc.points) {
      const int ix = voxel_index(p.x(), res);
      const int iy = voxel_index(p.y(), res);
      const int iz = voxel_index(p.z(), res);
      h[static_cast<std::size_t>((ix * res + iy) * res + iz)] += 1.0;
      total += 1.0;
    }
  }
  for (double& v : h) v /= total;
  return h;
}

double cloud_distance(const PointCloud& a, const PointCloud& b, CloudDist dist) {
  if (dist == CloudDist::chamfer) return chamfer(a, b);
  if (a.size() == b.size() && a.size() <= 512) return emd_exact(a, b);
  return emd_approx(a, b);
}

// Pairwise table D(i,j) = dist(a[i], b[j]); rows split across threads,
// each entry written once, so the result is identical for any thread count.
Eigen::MatrixXd set_distance_table(const std::vector<PointCloud>& a, const std::vector<PointCloud>& b,
                                   CloudDist dist, int threads) {
  const int na = static_cast<int>(a.size());
  const int nb = static_cast<int>(b.size());
  Eigen::MatrixXd d(na, nb);
  const int nthreads = std::clamp(threads, 1, na);
  if (nthreads == 1) {
    for (int i = 0; i < na; ++i)
      for (int j = 0; j < nb; ++j) d(i, j) = cloud_distance(a[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(j)], dist);
    return d;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nthreads));
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t] {
      for (int i = t; i < na; i += nthreads)
        for (int j = 0; j < nb; ++j) d(i, j) = cloud_distance(a[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(j)], dist);
    });
  }
  for (auto& th : pool) th.join();
  return d;
}

void append_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

}  // namespace

std::string to_string(CloudDist d) { return d == CloudDist::chamfer ? "cd" : "emd"; }

CloudDist cloud_dist_from_string(const std::string& s) {
  if (s == "cd" || s == "chamfer") return CloudDist::chamfer;
  if (s == "emd") return CloudDist::emd;
  throw InvalidArgument("unknown cloud distance: " + s);
}

double chamfer(const PointCloud& x, const PointCloud& y) {
  check_pair_nonempty(x, y, "chamfer");
  double total = 0.0;
  for (const auto& p : x.points) {
    double best = kInf;
    for (const auto& q : y.points) best = std::min(best, (p - q).squaredNorm());
    total += best;
  }
  for (const auto& q : y.points) {
    double best = kInf;
    for (const auto& p : x.points) best = std::min(best, (p - q).squaredNorm());
    total += best;
  }
  return total;
}

double chamfer_mean(const PointCloud& x, const PointCloud& y) {
  return chamfer(x, y) / static_cast<double>(x.size() + y.size());
}

EmdResult emd_exact_match(const PointCloud& x, const PointCloud& y) {
  check_pair_nonempty(x, y, "emd_exact");
  if (x.size() != y.size())
    throw InvalidArgument("emd_exact: size mismatch, " + std::to_string(x.size()) + " vs " +
                          std::to_string(y.size()));
  if (x.size() > 512)
    throw InvalidArgument("emd_exact: " + std::to_string(x.size()) +
                          " points exceeds the exact solver bound of 512; use emd_approx");

  const Eigen::MatrixXd cost = distance_matrix(x, y);
  EmdResult r;
  r.match = hungarian(cost);
  for (int i = 0; i < x.size(); ++i) r.cost += cost(i, r.match[static_cast<std::size_t>(i)]);
  return r;
}

double emd_exact(const PointCloud& x, const PointCloud& y) { return emd_exact_match(x, y).cost; }

EmdResult emd_approx_match(const PointCloud& x, const PointCloud& y, double tol) {
  check_pair_nonempty(x, y, "emd_approx");
  if (x.size() != y.size())
    throw InvalidArgument("emd_approx: size mismatch, " + std::to_string(x.size()) + " vs " +
                          std::to_string(y.size()));
  if (tol <= 0.0) throw InvalidArgument("emd_approx: tol must be positive");
  return emd_auction(x, y, tol);
}

double emd_approx(const PointCloud& x, const PointCloud& y, double tol) {
  return emd_approx_match(x, y, tol).cost;
}

double emd_mean(const PointCloud& x, const PointCloud& y, double tol) {
  return emd_approx(x, y, tol) / static_cast<double>(x.size());
}

double jsd(const std::vector<PointCloud>& a, const std::vector<PointCloud>& b, int grid_res) {
  if (a.empty() || b.empty()) throw InvalidArgument("jsd: empty set");
  if (grid_res < 1) throw InvalidArgument("jsd: grid_res must be positive");

  const auto p = voxel_histogram(a, grid_res);
  const auto q = voxel_histogram(b, grid_res);

  // JSD(P||Q) = 0.5 KL(P||M) + 0.5 KL(Q||M), M = (P+Q)/2, natural log;
  // voxels with zero mass in a measure contribute nothing to its KL term.
  double acc = 0.0;
  for (std::size_t v = 0; v < p.size(); ++v) {
    const double m = 0.5 * (p[v] + q[v]);
    if (p[v] > 0.0) acc += 0.5 * p[v] * std::log(p[v] / m);
    if (q[v] > 0.0) acc += 0.5 * q[v] * std::log(q[v] / m);
  }
  return acc;
}

double coverage(const std::vector<PointCloud>& a, const std::vector<PointCloud>& b, CloudDist dist,
                int threads) {
  if (a.empty() || b.empty()) throw InvalidArgument("coverage: empty set");
  const Eigen::MatrixXd d = set_distance_table(a, b, dist, threads);
  std::vector<char> marked(b.size(), 0);
  for (int i = 0; i < d.rows(); ++i) {
    int best = 0;
    for (int j = 1; j < d.cols(); ++j)
      if (d(i, j) < d(i, best)) best = j;
    marked[static_cast<std::size_t>(best)] = 1;
  }
  int count = 0;
  for (char m : marked) count += m;
  return static_cast<double>(count) / static_cast<double>(b.size());
}

double mmd(const std::vector<PointCloud>& a, const std::vector<PointCloud>& b, CloudDist dist,
           int threads) {
  if (a.empty() || b.empty()) throw InvalidArgument("mmd: empty set");
  const Eigen::MatrixXd d = set_distance_table(a, b, dist, threads);
  double acc = 0.0;
  for (int j = 0; j < d.cols(); ++j) {
    double best = kInf;
    for (int i = 0; i < d.rows(); ++i) best = std::min(best, d(i, j));
    acc += best;
  }
  return acc / static_cast<double>(b.size());
}

std::string MetricReport::to_record() const {
  std::string out = "metric=" + name + " value=";
  append_double(out, value);
  for (const auto& [k, v] : config) {
    out.push_back(' ');
    out += k + "=" + v;
  }
  return out;
}

MetricReport MetricReport::from_record(const std::string& line) {
  MetricReport r;
  bool have_metric = false, have_value = false;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw FormatError("metric record: token without '=': " + tok);
    const std::string k = tok.substr(0, eq);
    const std::string v = tok.substr(eq + 1);
    if (k == "metric") {
      r.name = v;
      have_metric = true;
    } else if (k == "value") {
      const auto res = std::from_chars(v.data(), v.data() + v.size(), r.value);
      if (res.ec != std::errc{}) throw FormatError("metric record: bad value: " + v);
      have_value = true;
    } else {
      r.config[k] = v;
    }
  }
  if (!have_metric || !have_value) throw FormatError("metric record: missing metric= or value=");
  return r;
}

}  // namespace lslp
