#include "lslp/data_ingest.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lslp/cloud_io.hpp"
#include "lslp/rng.hpp"

namespace lslp {

namespace {

using nlohmann::json;

constexpr double kTwoPi = 6.283185307179586476925286766559;

double face_area(const TriangleMesh& mesh, const std::array<int, 3>& f) {
  const Vec3& a = mesh.vertices[static_cast<std::size_t>(f[0])];
  const Vec3& b = mesh.vertices[static_cast<std::size_t>(f[1])];
  const Vec3& c = mesh.vertices[static_cast<std::size_t>(f[2])];
  return 0.5 * (b - a).cross(c - a).norm();
}

int parse_obj_index(const std::string& token, std::size_t n_vertices, int line_no) {
  // "7", "7/2", "7/2/3", "7//3" all reference vertex 7
  const auto slash = token.find('/');
  const std::string head = slash == std::string::npos ? token : token.substr(0, slash);
  int idx = 0;
  try {
    idx = std::stoi(head);
  } catch (const std::exception&) {
    throw FormatError("obj: bad face index '" + token + "' at line " + std::to_string(line_no));
  }
  if (idx < 0) idx = static_cast<int>(n_vertices) + 1 + idx;  // negative = relative
  if (idx < 1 || idx > static_cast<int>(n_vertices))
    throw FormatError("obj: face index " + std::to_string(idx) + " out of range at line " +
                      std::to_string(line_no));
  return idx - 1;
}

}  // namespace

TriangleMesh parse_obj(const std::string& text) {
  TriangleMesh mesh;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x() >> p.y() >> p.z()))
        throw FormatError("obj: bad vertex at line " + std::to_string(line_no));
      mesh.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ls >> tok) idx.push_back(parse_obj_index(tok, mesh.vertices.size(), line_no));
      if (idx.size() < 3) throw FormatError("obj: face with <3 vertices at line " + std::to_string(line_no));
      for (std::size_t i = 1; i + 1 < idx.size(); ++i)
        mesh.faces.push_back({idx[0], idx[i], idx[i + 1]});
    }
    // every other tag (vn, vt, o, g, usemtl, #, ...) is ignored
  }

  // drop degenerate faces
  std::erase_if(mesh.faces, [&](const auto& f) { return face_area(mesh, f) <= 1e-14; });
  return mesh;
}

TriangleMesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("obj: cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_obj(ss.str());
}

PointCloud sample_mesh_surface(const TriangleMesh& mesh, int n, std::uint64_t seed) {
  if (mesh.empty()) throw InvalidArgument("sample_mesh_surface: mesh has no usable faces");
  if (n < 1) throw InvalidArgument("sample_mesh_surface: n must be positive");

  std::vector<double> cumulative(mesh.faces.size());
  double total = 0.0;
  for (std::size_t i = 0; i < mesh.faces.size(); ++i) {
    total += face_area(mesh, mesh.faces[i]);
    cumulative[i] = total;
  }
  if (total <= 0.0) throw InvalidArgument("sample_mesh_surface: mesh has zero total area");

  Rng rng(seed);
  PointCloud pc;
  pc.points.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double r = rng.uniform() * total;
    const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), r);
    const auto& f = mesh.faces[static_cast<std::size_t>(it - cumulative.begin())];
    const Vec3& a = mesh.vertices[static_cast<std::size_t>(f[0])];
    const Vec3& b = mesh.vertices[static_cast<std::size_t>(f[1])];
    const Vec3& c = mesh.vertices[static_cast<std::size_t>(f[2])];
    // sqrt trick: uniform over the triangle
    const double s = std::sqrt(rng.uniform());
    const double t = rng.uniform();
    pc.points.push_back((1.0 - s) * a + s * (1.0 - t) * b + s * t * c);
  }
  return pc;
}

std::string to_string(ShapeKind k) {
  switch (k) {
    case ShapeKind::sphere: return "sphere";
    case ShapeKind::torus: return "torus";
    case ShapeKind::box: return "box";
    default: return "cylinder";
  }
}

ShapeKind shape_kind_from_string(const std::string& s) {
  if (s == "sphere") return ShapeKind::sphere;
  if (s == "torus") return ShapeKind::torus;
  if (s == "box") return ShapeKind::box;
  if (s == "cylinder") return ShapeKind::cylinder;
  throw InvalidArgument("unknown shape kind: " + s);
}

void ShapeSpec::validate() const {
  switch (kind) {
    case ShapeKind::sphere:
      if (!(a > 0.0)) throw InvalidArgument("sphere: radius must be positive");
      break;
    case ShapeKind::torus:
      if (!(a > 0.0) || !(b > 0.0)) throw InvalidArgument("torus: radii must be positive");
      if (b >= a) throw InvalidArgument("torus: tube radius must be smaller than major radius");
      break;
    case ShapeKind::box:
      if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0))
        throw InvalidArgument("box: half-extents must be positive");
      break;
    case ShapeKind::cylinder:
      if (!(a > 0.0) || !(b > 0.0)) throw InvalidArgument("cylinder: radius and height must be positive");
      break;
  }
}

namespace {

Vec3 sphere_point(double radius, Rng& rng) {
  // Archimedes: z uniform, angle uniform
  const double z = radius * (2.0 * rng.uniform() - 1.0);
  const double rho = std::sqrt(std::max(0.0, radius * radius - z * z));
  const double phi = kTwoPi * rng.uniform();
  return {rho * std::cos(phi), rho * std::sin(phi), z};
}

Vec3 torus_point(double major, double tube, Rng& rng) {
  // area element scales with (major + tube*cos(theta)); rejection on theta
  double theta;
  for (;;) {
    theta = kTwoPi * rng.uniform();
    const double accept = (major + tube * std::cos(theta)) / (major + tube);
    if (rng.uniform() <= accept) break;
  }
  const double phi = kTwoPi * rng.uniform();
  const double ring = major + tube * std::cos(theta);
  return {ring * std::cos(phi), ring * std::sin(phi), tube * std::sin(theta)};
}

Vec3 box_point(double hx, double hy, double hz, Rng& rng) {
  const double area_x = hy * hz, area_y = hx * hz, area_z = hx * hy;  // per face pair, /4
  const double total = 2.0 * (area_x + area_y + area_z);
  double r = rng.uniform() * total;
  const double u = 2.0 * rng.uniform() - 1.0;
  const double v = 2.0 * rng.uniform() - 1.0;
  for (int axis = 0; axis < 3; ++axis) {
    const double area = axis == 0 ? area_x : axis == 1 ? area_y : area_z;
    for (double sign : {-1.0, 1.0}) {
      r -= area;
      if (r <= 0.0) {
        switch (axis) {
          case 0: return {sign * hx, u * hy, v * hz};
          case 1: return {u * hx, sign * hy, v * hz};
          default: return {u * hx, v * hy, sign * hz};
        }
      }
    }
  }
  return {hx, u * hy, v * hz};  // numerical edge, r == total
}

Vec3 cylinder_point(double radius, double height, Rng& rng) {
  const double lateral = kTwoPi * radius * height;
  const double cap = 3.14159265358979323846 * radius * radius;
  const double r = rng.uniform() * (lateral + 2.0 * cap);
  const double phi = kTwoPi * rng.uniform();
  if (r < lateral) {
    const double z = height * (rng.uniform() - 0.5);
    return {radius * std::cos(phi), radius * std::sin(phi), z};
  }
  const double rho = radius * std::sqrt(rng.uniform());
  const double z = (r < lateral + cap) ? -0.5 * height : 0.5 * height;
  return {rho * std::cos(phi), rho * std::sin(phi), z};
}

}  // namespace

PointCloud synthetic_shape(const ShapeSpec& spec, int n, std::uint64_t seed) {
  spec.validate();
  if (n < 1) throw InvalidArgument("synthetic_shape: n must be positive");
  Rng rng(seed);
  PointCloud pc;
  pc.points.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    switch (spec.kind) {
      case ShapeKind::sphere: pc.points.push_back(sphere_point(spec.a, rng)); break;
      case ShapeKind::torus: pc.points.push_back(torus_point(spec.a, spec.b, rng)); break;
      case ShapeKind::box: pc.points.push_back(box_point(spec.a, spec.b, spec.c, rng)); break;
      case ShapeKind::cylinder: pc.points.push_back(cylinder_point(spec.a, spec.b, rng)); break;
    }
  }
  return pc;
}

LadderedShape build_ladder(const PointCloud& source, const ResolutionLadder& ladder,
                           std::uint64_t seed, LadderSampling sampling) {
  ladder.validate();
  const int n_finest = ladder.resolution_at(ladder.refinements);
  if (source.size() < n_finest)
    throw InvalidArgument("build_ladder: source has " + std::to_string(source.size()) +
                          " points, finest level needs " + std::to_string(n_finest));

  PointCloud finest = source.size() == n_finest ? source : farthest_point_subsample(source, n_finest, seed);
  // one shared transform so every level is metrically comparable
  const NormalizeTransform transform = unit_sphere_transform(finest);
  finest = transform.apply(finest);

  LadderedShape shape;
  shape.seed = seed;
  if (sampling == LadderSampling::nested) {
    // a single FPS ordering: its prefixes are the FPS subsets at every lower
    // level, which gives X_0 c X_1 c ... c X_K for free
    const auto order =
        farthest_point_order(finest, ladder.resolution_at(ladder.refinements - 1), seed);
    for (int k = 0; k < ladder.refinements; ++k) {
      PointCloud level;
      const int nk = ladder.resolution_at(k);
      level.points.reserve(static_cast<std::size_t>(nk));
      for (int i = 0; i < nk; ++i) level.points.push_back(finest[order[static_cast<std::size_t>(i)]]);
      shape.clouds.push_back(std::move(level));
    }
  } else {
    const PointCloud normalized_source = transform.apply(source);
    Rng level_seeds(seed);
    for (int k = 0; k < ladder.refinements; ++k)
      shape.clouds.push_back(
          farthest_point_subsample(normalized_source, ladder.resolution_at(k), level_seeds.fork()));
  }
  shape.clouds.push_back(std::move(finest));
  return shape;
}

LadderedShape build_ladder(const TriangleMesh& mesh, const ResolutionLadder& ladder,
                           std::uint64_t seed, LadderSampling sampling) {
  ladder.validate();
  if (sampling == LadderSampling::nested)
    return build_ladder(sample_mesh_surface(mesh, ladder.resolution_at(ladder.refinements), seed),
                        ladder, seed, sampling);
  // independent mode: draw fresh surface samples per level, then share the
  // finest level's normalization
  Rng level_seeds(seed);
  std::vector<PointCloud> raw;
  for (int k = 0; k <= ladder.refinements; ++k)
    raw.push_back(sample_mesh_surface(mesh, ladder.resolution_at(k), level_seeds.fork()));
  const NormalizeTransform transform = unit_sphere_transform(raw.back());

  LadderedShape shape;
  shape.seed = seed;
  for (auto& cloud : raw) shape.clouds.push_back(transform.apply(cloud));
  return shape;
}

void SyntheticDatasetSpec::validate() const {
  if (count < 1) throw InvalidArgument("SyntheticDatasetSpec: count must be positive");
  if (classes < 1 || classes > 4) throw InvalidArgument("SyntheticDatasetSpec: classes must be 1..4");
  if (jitter < 0.0 || jitter >= 1.0) throw InvalidArgument("SyntheticDatasetSpec: jitter must be in [0, 1)");
}

std::vector<LadderedShape> make_synthetic_dataset(const SyntheticDatasetSpec& spec,
                                                  const ResolutionLadder& ladder,
                                                  std::uint64_t seed) {
  spec.validate();
  ladder.validate();
  static const ShapeKind kinds[4] = {ShapeKind::sphere, ShapeKind::torus, ShapeKind::box,
                                     ShapeKind::cylinder};
  Rng rng(seed);
  std::vector<LadderedShape> shapes;
  shapes.reserve(static_cast<std::size_t>(spec.count));
  for (int i = 0; i < spec.count; ++i) {
    const ShapeKind kind = kinds[i % spec.classes];
    const std::uint64_t shape_seed = rng.fork();
    Rng jrng(shape_seed);
    auto jittered = [&](double base) { return base * (1.0 + spec.jitter * (2.0 * jrng.uniform() - 1.0)); };

    ShapeSpec ss;
    ss.kind = kind;
    switch (kind) {
      case ShapeKind::sphere: ss.a = jittered(1.0); break;
      case ShapeKind::torus:
        ss.a = jittered(1.0);
        ss.b = std::min(jittered(0.35), 0.8 * ss.a);
        break;
      case ShapeKind::box:
        ss.a = jittered(1.0);
        ss.b = jittered(0.7);
        ss.c = jittered(0.5);
        break;
      case ShapeKind::cylinder:
        ss.a = jittered(0.6);
        ss.b = jittered(1.6);
        break;
    }

    const PointCloud dense =
        synthetic_shape(ss, ladder.resolution_at(ladder.refinements), jrng.fork());
    LadderedShape shape = build_ladder(dense, ladder, jrng.fork());
    char id[24];
    std::snprintf(id, sizeof id, "shape_%04d", i);
    shape.id = id;
    shape.shape_class = to_string(kind);
    shape.seed = shape_seed;
    shapes.push_back(std::move(shape));
  }
  return shapes;
}

std::vector<PointCloud> Dataset::clouds_at(int level, const std::vector<int>& indices) const {
  std::vector<PointCloud> out;
  out.reserve(indices.size());
  for (int i : indices)
    out.push_back(shapes[static_cast<std::size_t>(i)].clouds[static_cast<std::size_t>(level)]);
  return out;
}

void assign_split(Dataset& ds, double test_fraction, std::uint64_t seed) {
  if (test_fraction < 0.0 || test_fraction >= 1.0)
    throw InvalidArgument("assign_split: test_fraction must be in [0, 1)");
  std::vector<int> ids(ds.shapes.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i);
  Rng rng(seed);
  rng.shuffle(ids);
  const int n_test = static_cast<int>(std::floor(test_fraction * static_cast<double>(ids.size())));
  ds.test_indices.assign(ids.begin(), ids.begin() + n_test);
  ds.train_indices.assign(ids.begin() + n_test, ids.end());
  std::sort(ds.test_indices.begin(), ds.test_indices.end());
  std::sort(ds.train_indices.begin(), ds.train_indices.end());
}

void write_dataset(const Dataset& ds, const std::filesystem::path& dir) {
  ds.ladder.validate();
  std::filesystem::create_directories(dir / "shapes");

  json manifest;
  manifest["format"] = "lslp-dataset";
  manifest["version"] = 1;
  manifest["ladder"] = {{"n0", ds.ladder.n0},
                        {"refinements", ds.ladder.refinements},
                        {"latent_dims", ds.ladder.latent_dims}};
  manifest["split"] = {{"train", ds.train_indices}, {"test", ds.test_indices}};

  json shape_list = json::array();
  for (const auto& shape : ds.shapes) {
    const auto shape_dir = dir / "shapes" / shape.id;
    std::filesystem::create_directories(shape_dir);
    for (std::size_t k = 0; k < shape.clouds.size(); ++k)
      save_cloud(shape.clouds[k], shape_dir / ("level_" + std::to_string(k) + ".pcld"));

    json sm;
    sm["id"] = shape.id;
    sm["class"] = shape.shape_class;
    sm["seed"] = shape.seed;
    sm["ladder"] = manifest["ladder"];
    std::ofstream sout(shape_dir / "manifest.json");
    sout << sm.dump(2) << "\n";

    shape_list.push_back({{"id", shape.id}, {"class", shape.shape_class}, {"seed", shape.seed}});
  }
  manifest["shapes"] = std::move(shape_list);

  std::ofstream out(dir / "manifest.json");
  if (!out) throw IoError("write_dataset: cannot write manifest in " + dir.string());
  out << manifest.dump(2) << "\n";
}

Dataset load_dataset(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw IoError("load_dataset: cannot open manifest in " + dir.string());
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw FormatError("load_dataset: unparseable manifest: " + std::string(e.what()));
  }
  if (manifest.value("format", "") != "lslp-dataset")
    throw FormatError("load_dataset: not a dataset manifest: " + dir.string());

  Dataset ds;
  ds.ladder.n0 = manifest.at("ladder").at("n0").get<int>();
  ds.ladder.refinements = manifest.at("ladder").at("refinements").get<int>();
  ds.ladder.latent_dims = manifest.at("ladder").at("latent_dims").get<std::vector<int>>();
  ds.train_indices = manifest.at("split").at("train").get<std::vector<int>>();
  ds.test_indices = manifest.at("split").at("test").get<std::vector<int>>();

  for (const auto& js : manifest.at("shapes")) {
    LadderedShape shape;
    shape.id = js.at("id").get<std::string>();
    shape.shape_class = js.at("class").get<std::string>();
    shape.seed = js.at("seed").get<std::uint64_t>();
    for (int k = 0; k <= ds.ladder.refinements; ++k) {
      const auto path = dir / "shapes" / shape.id / ("level_" + std::to_string(k) + ".pcld");
      shape.clouds.push_back(load_cloud(path));
      if (shape.clouds.back().size() != ds.ladder.resolution_at(k))
        throw FormatError("load_dataset: " + path.string() + " has " +
                          std::to_string(shape.clouds.back().size()) + " points, ladder wants " +
                          std::to_string(ds.ladder.resolution_at(k)));
    }
    ds.shapes.push_back(std::move(shape));
  }
  return ds;
}

}  // namespace lslp
