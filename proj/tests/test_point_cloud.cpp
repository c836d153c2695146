#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lslp/point_cloud.hpp"
#include "oracles.hpp"

using namespace lslp;

TEST_CASE("normalize_unit_sphere: symmetric pair lands on the unit sphere") {
  PointCloud pc{Vec3(2, 0, 0), Vec3(4, 0, 0)};
  const PointCloud out = normalize_unit_sphere(pc);
  CHECK(out[0].isApprox(Vec3(-1, 0, 0), 1e-12));
  CHECK(out[1].isApprox(Vec3(1, 0, 0), 1e-12));
}

TEST_CASE("normalize_unit_sphere: postconditions on a random cloud") {
  Rng rng(7);
  const PointCloud pc = oracle::random_cloud(64, rng, 3.0);
  const PointCloud out = normalize_unit_sphere(pc);

  Vec3 centroid = Vec3::Zero();
  double max_norm = 0.0;
  for (const auto& p : out.points) {
    centroid += p;
    max_norm = std::max(max_norm, p.norm());
  }
  centroid /= out.size();
  CHECK(centroid.norm() < 1e-6);
  CHECK(max_norm == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("normalize_unit_sphere: idempotent") {
  Rng rng(11);
  const PointCloud once = normalize_unit_sphere(oracle::random_cloud(32, rng));
  const PointCloud twice = normalize_unit_sphere(once);
  for (int i = 0; i < once.size(); ++i) CHECK((once[i] - twice[i]).norm() < 1e-6);
}

TEST_CASE("normalize_unit_sphere: degenerate clouds rejected") {
  CHECK_THROWS_AS(normalize_unit_sphere(PointCloud{}), InvalidArgument);
  PointCloud same{Vec3(1, 2, 3), Vec3(1, 2, 3), Vec3(1, 2, 3)};
  CHECK_THROWS_AS(normalize_unit_sphere(same), InvalidArgument);
}

TEST_CASE("knn: basic ordering and bounds") {
  PointCloud pc{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(5, 0, 0)};
  CHECK(knn(pc, Vec3(0, 0, 0), 2) == std::vector<int>{0, 1});
  CHECK(knn(pc, Vec3(0, 0, 0), 3) == std::vector<int>{0, 1, 2});
  CHECK_THROWS_AS(knn(pc, Vec3(0, 0, 0), 4), InvalidArgument);
  CHECK_THROWS_AS(knn(pc, Vec3(0, 0, 0), 0), InvalidArgument);
}

TEST_CASE("knn: ties broken by lower index") {
  PointCloud pc{Vec3(1, 0, 0), Vec3(-1, 0, 0), Vec3(0, 1, 0)};
  CHECK(knn(pc, Vec3(0, 0, 0), 3) == std::vector<int>{0, 1, 2});
}

TEST_CASE("knn: matches brute-force sort on random clouds") {
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const PointCloud pc = oracle::random_cloud(32, rng);
    const Vec3 query(rng.uniform(), rng.uniform(), rng.uniform());
    CHECK(knn(pc, query, 5) == oracle::knn(pc, query, 5));
  }
}

TEST_CASE("knn_upsample: single point duplicates itself") {
  PointCloud pc{Vec3(0, 0, 0)};
  const PointCloud out = knn_upsample(pc);  // m clamped to 1
  REQUIRE(out.size() == 2);
  CHECK(out[0] == Vec3(0, 0, 0));
  CHECK(out[1] == Vec3(0, 0, 0));
}

TEST_CASE("knn_upsample: pair midpoints") {
  PointCloud pc{Vec3(0, 0, 0), Vec3(2, 0, 0)};
  const PointCloud out = knn_upsample(pc, 2);
  REQUIRE(out.size() == 4);
  CHECK(out[0] == Vec3(0, 0, 0));
  CHECK(out[1] == Vec3(2, 0, 0));
  CHECK(out[2] == Vec3(1, 0, 0));
  CHECK(out[3] == Vec3(1, 0, 0));
}

TEST_CASE("knn_upsample: new sphere points stay near the surface") {
  Rng rng(19);
  PointCloud pc;
  for (int i = 0; i < 100; ++i) {
    Vec3 p(rng.normal(), rng.normal(), rng.normal());
    pc.points.push_back(p.normalized());
  }
  const PointCloud out = knn_upsample(pc, 7);
  for (int i = 100; i < 200; ++i) CHECK(std::abs(out[i].norm() - 1.0) < 0.2);
}

TEST_CASE("knn_upsample: doubles any cloud and keeps originals as a prefix") {
  Rng rng(23);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 1 + static_cast<int>(rng.uniform_int(512));
    const PointCloud pc = oracle::random_cloud(n, rng);
    const PointCloud out = knn_upsample(pc);
    REQUIRE(out.size() == 2 * n);
    for (int i = 0; i < n; ++i) CHECK(out[i] == pc[i]);
  }
}

TEST_CASE("farthest_point_subsample: n_target = n returns a permutation") {
  Rng rng(31);
  const PointCloud pc = oracle::random_cloud(20, rng);
  const PointCloud out = farthest_point_subsample(pc, 20, 5);
  REQUIRE(out.size() == 20);
  // every original point appears exactly once
  std::vector<bool> seen(20, false);
  for (const auto& q : out.points) {
    bool found = false;
    for (int i = 0; i < 20; ++i) {
      if (!seen[static_cast<std::size_t>(i)] && q == pc[i]) {
        seen[static_cast<std::size_t>(i)] = true;
        found = true;
        break;
      }
    }
    CHECK(found);
  }
}

TEST_CASE("farthest_point_subsample: collinear points pick the far end") {
  PointCloud pc;
  for (int i = 0; i <= 8; ++i) pc.points.emplace_back(static_cast<double>(i), 0.0, 0.0);
  const PointCloud out = farthest_point_subsample(pc, 2, 0);  // seed 0 starts at index 0
  REQUIRE(out.size() == 2);
  CHECK(out[0] == Vec3(0, 0, 0));
  CHECK(out[1] == Vec3(8, 0, 0));
}

TEST_CASE("farthest_point_subsample: deterministic and validates bounds") {
  Rng rng(37);
  const PointCloud pc = oracle::random_cloud(50, rng);
  const PointCloud a = farthest_point_subsample(pc, 10, 42);
  const PointCloud b = farthest_point_subsample(pc, 10, 42);
  for (int i = 0; i < 10; ++i) CHECK(a[i] == b[i]);
  CHECK_THROWS_AS(farthest_point_subsample(pc, 51, 0), InvalidArgument);
}

TEST_CASE("farthest_point_subsample: spreads better than random subsets") {
  Rng rng(41);
  const PointCloud pc = oracle::random_cloud(256, rng);
  auto min_pairwise = [](const PointCloud& c) {
    double best = 1e300;
    for (int i = 0; i < c.size(); ++i)
      for (int j = i + 1; j < c.size(); ++j) best = std::min(best, (c[i] - c[j]).norm());
    return best;
  };
  const double fps_spread = min_pairwise(farthest_point_subsample(pc, 32, 0));
  for (int trial = 0; trial < 20; ++trial) {
    PointCloud subset;
    std::vector<int> ids(256);
    std::iota(ids.begin(), ids.end(), 0);
    rng.shuffle(ids);
    for (int i = 0; i < 32; ++i) subset.points.push_back(pc[ids[static_cast<std::size_t>(i)]]);
    CHECK(fps_spread >= min_pairwise(subset));
  }
}

TEST_CASE("ResolutionLadder: derived resolutions and validation") {
  ResolutionLadder ladder{16, 2, {8, 8, 8}};
  ladder.validate();
  CHECK(ladder.resolution_at(0) == 16);
  CHECK(ladder.resolution_at(1) == 32);
  CHECK(ladder.resolution_at(2) == 64);
  CHECK(ladder.stages() == 3);

  CHECK_THROWS_AS((ResolutionLadder{1, 2, {8, 8, 8}}).validate(), InvalidArgument);
  CHECK_THROWS_AS((ResolutionLadder{16, 0, {8}}).validate(), InvalidArgument);
  CHECK_THROWS_AS((ResolutionLadder{16, 2, {8, 8}}).validate(), InvalidArgument);
  CHECK_THROWS_AS((ResolutionLadder{16, 2, {8, 0, 8}}).validate(), InvalidArgument);
}
