// lslp - latent-space Laplacian pyramid models for 3D point clouds.
//
// Subcommands: ingest, train, synthesize, upsample, evaluate, render.
// Every command that produces artifacts writes a run_manifest.json next to
// them recording the command, config snapshot, seeds, inputs and content
// hashes of everything produced.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "lslp/checkpoint.hpp"
#include "lslp/cloud_io.hpp"
#include "lslp/config.hpp"
#include "lslp/data_ingest.hpp"
#include "lslp/metrics.hpp"
#include "lslp/pyramid.hpp"
#include "lslp/render.hpp"
#include "lslp/training.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lslp;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 0;
  std::string preset = "desk";
  std::string config_path;
  std::string out_dir;
  int threads = 1;
};

RunConfig resolve_config(const GlobalOpts& g) {
  if (!g.config_path.empty()) return load_run_config(g.config_path);
  return preset_by_name(g.preset);
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::uint64_t hash_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot hash missing file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string data = ss.str();
  return fnv1a(data.data(), data.size());
}

class ManifestWriter {
 public:
  ManifestWriter(std::string command, const fs::path& out_dir, const GlobalOpts& g,
                 const RunConfig& cfg)
      : out_dir_(out_dir) {
    manifest_["command"] = std::move(command);
    manifest_["timestamp"] = timestamp_utc();
    manifest_["seed"] = g.seed;
    manifest_["threads"] = g.threads;
    manifest_["config"] = json::parse(run_config_to_json(cfg));
    manifest_["inputs"] = json::object();
    manifest_["artifacts"] = json::array();
  }

  void input(const std::string& key, const std::string& value) { manifest_["inputs"][key] = value; }

  void artifact(const fs::path& path) {
    manifest_["artifacts"].push_back(
        {{"path", fs::relative(path, out_dir_).string()}, {"fnv1a", to_hex(hash_file(path))}});
  }

  void extra(const std::string& key, const json& value) { manifest_[key] = value; }

  void write() {
    std::ofstream out(out_dir_ / "run_manifest.json");
    if (!out) throw IoError("cannot write run manifest in " + out_dir_.string());
    out << manifest_.dump(2) << "\n";
  }

 private:
  fs::path out_dir_;
  json manifest_;
};

fs::path require_out(const GlobalOpts& g) {
  if (g.out_dir.empty()) throw InvalidArgument("--out is required for this command");
  fs::path dir(g.out_dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<fs::path> collect_cloud_files(const fs::path& dir, int level) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  const std::string level_tag = "level_" + std::to_string(level);
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension();
    if (ext != ".pcld" && ext != ".xyz") continue;
    if (level >= 0 && entry.path().filename().string().find(level_tag) == std::string::npos) continue;
    files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  return files;
}

// provenance record for single-file outputs (reports, images)
void write_sibling_manifest(const fs::path& artifact, const std::string& command,
                            const GlobalOpts& g, const std::map<std::string, std::string>& inputs) {
  json m;
  m["command"] = command;
  m["timestamp"] = timestamp_utc();
  m["seed"] = g.seed;
  m["inputs"] = inputs;
  m["artifacts"] = json::array(
      {{{"path", artifact.filename().string()}, {"fnv1a", to_hex(hash_file(artifact))}}});
  std::ofstream out(artifact.string() + ".manifest.json");
  if (!out) throw IoError("cannot write manifest for " + artifact.string());
  out << m.dump(2) << "\n";
}

std::vector<PointCloud> load_cloud_set(const fs::path& dir, int level) {
  std::vector<PointCloud> set;
  for (const auto& f : collect_cloud_files(dir, level)) set.push_back(load_cloud(f));
  if (set.empty()) throw InvalidArgument("no cloud files found under " + dir.string());
  return set;
}

// ---------------------------------------------------------------------------

int cmd_ingest(const GlobalOpts& g, int synthetic_count, const std::string& mesh_dir) {
  RunConfig cfg = resolve_config(g);
  const fs::path out = require_out(g);

  Dataset ds;
  ds.ladder = cfg.ladder;
  std::string source_desc;

  if (!mesh_dir.empty()) {
    std::vector<fs::path> objs;
    for (const auto& entry : fs::recursive_directory_iterator(mesh_dir))
      if (entry.is_regular_file() && entry.path().extension() == ".obj") objs.push_back(entry.path());
    std::sort(objs.begin(), objs.end());
    if (objs.empty()) throw InvalidArgument("no .obj meshes under " + mesh_dir);

    Rng rng(g.seed);
    int i = 0;
    for (const auto& path : objs) {
      try {
        const TriangleMesh mesh = load_obj(path);
        if (mesh.empty()) throw FormatError("mesh has no usable faces");
        LadderedShape shape = build_ladder(mesh, ds.ladder, rng.fork());
        char id[24];
        std::snprintf(id, sizeof id, "shape_%04d", i++);
        shape.id = id;
        shape.shape_class = path.parent_path().filename().string();
        ds.shapes.push_back(std::move(shape));
      } catch (const Error& e) {
        throw FormatError(path.string() + ": " + e.what());
      }
    }
    source_desc = mesh_dir;
  } else {
    if (synthetic_count > 0) cfg.dataset.count = synthetic_count;
    ds.shapes = make_synthetic_dataset(cfg.dataset, ds.ladder, g.seed);
    source_desc = "synthetic:" + std::to_string(cfg.dataset.count) + "x" +
                  std::to_string(cfg.dataset.classes);
  }

  assign_split(ds, cfg.test_fraction, g.seed);
  write_dataset(ds, out);

  ManifestWriter mw("ingest", out, g, cfg);
  mw.input("source", source_desc);
  mw.artifact(out / "manifest.json");
  for (const auto& shape : ds.shapes)
    for (std::size_t k = 0; k < shape.clouds.size(); ++k)
      mw.artifact(out / "shapes" / shape.id / ("level_" + std::to_string(k) + ".pcld"));
  mw.write();

  std::cout << "ingested " << ds.shapes.size() << " shapes (" << ds.train_indices.size()
            << " train / " << ds.test_indices.size() << " test) into " << out << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

struct StageSelector {
  bool all = false;
  bool ae = false;  // vs gan
  int level = -1;
};

StageSelector parse_stage(const std::string& s) {
  if (s == "all") return {true, false, -1};
  if (s.rfind("ae-", 0) == 0) return {false, true, std::stoi(s.substr(3))};
  if (s.rfind("gan-", 0) == 0) return {false, false, std::stoi(s.substr(4))};
  throw InvalidArgument("bad --stage '" + s + "' (want all, ae-<k> or gan-<k>)");
}

void train_ae_stage(const Dataset& ds, const RunConfig& cfg, int level, const fs::path& out,
                    std::uint64_t seed) {
  AeArchitecture arch;
  arch.level = level;
  arch.n_points = ds.ladder.resolution_at(level);
  arch.latent_dim = ds.ladder.latent_dim_at(level);
  arch.encoder_hidden = cfg.arch.encoder_hidden;
  arch.decoder_hidden = cfg.arch.decoder_hidden;

  TrainConfig tc = cfg.ae_train;
  tc.seed = seed;

  fs::create_directories(out / "logs");
  std::ofstream log(out / "logs" / ("ae_" + std::to_string(level) + ".log"));
  std::cout << "training autoencoder level " << level << " (" << arch.n_points << " points, "
            << tc.epochs << " epochs)...\n";
  const AeTrainResult r = train_autoencoder(ds.clouds_at(level, ds.train_indices), arch, tc, &log);

  CheckpointMeta meta{tc.epochs, tc.seed, "preset=" + cfg.preset};
  save_checkpoint(AnyParams{r.encoder}, meta, out / ("encoder_" + std::to_string(level) + ".ckpt"));
  save_checkpoint(AnyParams{r.decoder}, meta, out / ("decoder_" + std::to_string(level) + ".ckpt"));
  std::cout << "  final train EMD " << r.loss_history.back() << " (audit " << r.audit_history.back()
            << ")\n";
}

void train_gan_stage(const Dataset& ds, const RunConfig& cfg, int level, const fs::path& out,
                     std::uint64_t seed) {
  auto require_stage = [&](int k) {
    const fs::path p = out / ("encoder_" + std::to_string(k) + ".ckpt");
    if (!fs::exists(p))
      throw InvalidArgument("gan-" + std::to_string(level) + " requires the ae-" +
                            std::to_string(k) + " checkpoints; train that stage first");
  };
  require_stage(level);
  const nets::EncoderParams enc =
      load_encoder_checkpoint(out / ("encoder_" + std::to_string(level) + ".ckpt"));

  const auto fine = ds.clouds_at(level, ds.train_indices);
  std::vector<PointCloud> rough =
      level > 0 ? ds.clouds_at(level - 1, ds.train_indices) : std::vector<PointCloud>{};
  if (level > 0 && cfg.rough_from_decoded) {
    require_stage(level - 1);
    const std::string prev = std::to_string(level - 1);
    rough = ae_roundtrip(load_encoder_checkpoint(out / ("encoder_" + prev + ".ckpt")),
                         load_decoder_checkpoint(out / ("decoder_" + prev + ".ckpt")), rough);
  }
  const LatentDataset latents = extract_latents(enc, fine, rough);

  GanArchitecture arch;
  arch.level = level;
  arch.latent_dim = ds.ladder.latent_dim_at(level);
  arch.noise_dim = cfg.arch.noise_dim;
  arch.hidden = cfg.arch.gan_hidden;
  arch.condition_discriminator = cfg.arch.condition_discriminator;

  TrainConfig tc = cfg.gan_train;
  tc.seed = seed;

  fs::create_directories(out / "logs");
  std::ofstream log(out / "logs" / ("gan_" + std::to_string(level) + ".log"));
  std::cout << "training latent GAN level " << level << " (" << latents.entries.size()
            << " codes, " << tc.epochs << " epochs)...\n";
  const GanTrainResult r = train_latent_gan(latents, arch, tc, /*conditional=*/level > 0, &log);

  CheckpointMeta meta{tc.epochs, tc.seed, "preset=" + cfg.preset};
  save_checkpoint(AnyParams{r.generator}, meta, out / ("generator_" + std::to_string(level) + ".ckpt"));
  save_checkpoint(AnyParams{r.discriminator}, meta,
                  out / ("discriminator_" + std::to_string(level) + ".ckpt"));
  std::cout << "  final D loss " << r.d_loss_history.back() << ", G loss "
            << r.g_loss_history.back() << ", D accuracy " << r.d_accuracy_history.back() << "\n";
}

bool try_assemble_pyramid(const Dataset& ds, const fs::path& out) {
  Pyramid pyr = make_pyramid_shell(ds.ladder);
  for (int k = 0; k < ds.ladder.stages(); ++k) {
    const std::string tag = std::to_string(k);
    const fs::path enc = out / ("encoder_" + tag + ".ckpt");
    const fs::path dec = out / ("decoder_" + tag + ".ckpt");
    const fs::path gen = out / ("generator_" + tag + ".ckpt");
    const fs::path disc = out / ("discriminator_" + tag + ".ckpt");
    if (!fs::exists(enc) || !fs::exists(dec) || !fs::exists(gen)) return false;
    pyr.stage(k).encoder = load_encoder_checkpoint(enc);
    pyr.stage(k).decoder = load_decoder_checkpoint(dec);
    pyr.stage(k).generator = load_generator_checkpoint(gen);
    if (fs::exists(disc)) pyr.stage(k).discriminator = load_discriminator_checkpoint(disc);
  }
  save_pyramid(pyr, out / "pyramid.json");
  return true;
}

int cmd_train(const GlobalOpts& g, const std::string& dataset_dir, const std::string& stage_str) {
  const RunConfig cfg = resolve_config(g);
  const fs::path out = require_out(g);
  const Dataset ds = load_dataset(dataset_dir);
  const StageSelector stage = parse_stage(stage_str);

  if (stage.level >= ds.ladder.stages())
    throw InvalidArgument("stage level " + std::to_string(stage.level) + " out of range, ladder has " +
                          std::to_string(ds.ladder.stages()) + " stages");

  Rng rng(g.seed);
  std::vector<std::uint64_t> stage_seeds;
  for (int k = 0; k < 2 * ds.ladder.stages(); ++k) stage_seeds.push_back(rng.fork());

  if (stage.all) {
    // bottom-up: every autoencoder first, then the GANs level by level
    for (int k = 0; k < ds.ladder.stages(); ++k)
      train_ae_stage(ds, cfg, k, out, stage_seeds[static_cast<std::size_t>(k)]);
    for (int k = 0; k < ds.ladder.stages(); ++k)
      train_gan_stage(ds, cfg, k, out, stage_seeds[static_cast<std::size_t>(ds.ladder.stages() + k)]);
  } else if (stage.ae) {
    train_ae_stage(ds, cfg, stage.level, out, stage_seeds[static_cast<std::size_t>(stage.level)]);
  } else {
    train_gan_stage(ds, cfg, stage.level, out,
                    stage_seeds[static_cast<std::size_t>(ds.ladder.stages() + stage.level)]);
  }

  const bool assembled = try_assemble_pyramid(ds, out);

  ManifestWriter mw("train", out, g, cfg);
  mw.input("dataset", dataset_dir);
  mw.input("stage", stage_str);
  for (const auto& entry : fs::directory_iterator(out))
    if (entry.path().extension() == ".ckpt") mw.artifact(entry.path());
  if (assembled) mw.artifact(out / "pyramid.json");
  mw.write();

  if (assembled) std::cout << "pyramid manifest written to " << (out / "pyramid.json") << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_synthesize(const GlobalOpts& g, const std::string& pyramid_path, int count) {
  const RunConfig cfg = resolve_config(g);
  const fs::path out = require_out(g);
  const Pyramid pyr = load_pyramid(pyramid_path);

  Rng rng(g.seed);
  ManifestWriter mw("synthesize", out, g, cfg);
  mw.input("pyramid", pyramid_path);
  mw.extra("count", count);

  for (int i = 0; i < count; ++i) {
    std::vector<std::uint64_t> seeds;
    for (int k = 0; k < pyr.ladder.stages(); ++k) seeds.push_back(rng.fork());
    const auto clouds = synthesize(pyr, seeds);
    for (std::size_t k = 0; k < clouds.size(); ++k) {
      char name[48];
      std::snprintf(name, sizeof name, "sample_%04d_level_%zu.pcld", i, k);
      save_cloud(clouds[k], out / name);
      mw.artifact(out / name);
    }
  }
  mw.write();
  std::cout << "wrote " << count * pyr.ladder.stages() << " cloud files to " << out << "\n";
  return 0;
}

int cmd_upsample(const GlobalOpts& g, const std::string& pyramid_path, const std::string& input) {
  const RunConfig cfg = resolve_config(g);
  const fs::path out = require_out(g);
  const Pyramid pyr = load_pyramid(pyramid_path);
  const PointCloud x0 = load_cloud(input);

  Rng rng(g.seed);
  std::vector<std::uint64_t> seeds;
  for (int k = 0; k < pyr.ladder.refinements; ++k) seeds.push_back(rng.fork());
  const auto clouds = upsample_shape(pyr, x0, seeds);

  ManifestWriter mw("upsample", out, g, cfg);
  mw.input("pyramid", pyramid_path);
  mw.input("cloud", input);
  for (std::size_t k = 0; k < clouds.size(); ++k) {
    const std::string name = "upsampled_level_" + std::to_string(k + 1) + ".pcld";
    save_cloud(clouds[k], out / name);
    mw.artifact(out / name);
  }
  mw.write();
  std::cout << "upsampled " << x0.size() << " -> " << clouds.back().size() << " points in " << out
            << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_evaluate(const GlobalOpts& g, const std::string& dir_a, const std::string& dir_b,
                 const std::string& metrics_csv, int grid_res, const std::string& dist_str,
                 int level, const std::string& report_path, const std::string& plots_dir) {
  const CloudDist dist = cloud_dist_from_string(dist_str);
  const auto set_a = load_cloud_set(dir_a, level);
  const auto set_b = load_cloud_set(dir_b, level);

  if (!plots_dir.empty()) {
    fs::create_directories(plots_dir);
    const int preview = 4;
    for (int i = 0; i < std::min<int>(preview, static_cast<int>(set_a.size())); ++i)
      render_cloud_ppm(set_a[static_cast<std::size_t>(i)],
                       fs::path(plots_dir) / ("set_a_" + std::to_string(i) + ".ppm"));
    for (int i = 0; i < std::min<int>(preview, static_cast<int>(set_b.size())); ++i)
      render_cloud_ppm(set_b[static_cast<std::size_t>(i)],
                       fs::path(plots_dir) / ("set_b_" + std::to_string(i) + ".ppm"));
  }

  std::vector<std::string> names;
  std::stringstream csv(metrics_csv);
  std::string tok;
  while (std::getline(csv, tok, ',')) names.push_back(tok);

  std::vector<MetricReport> reports;
  for (const auto& name : names) {
    MetricReport r;
    r.name = name;
    r.config["set_a"] = std::to_string(set_a.size());
    r.config["set_b"] = std::to_string(set_b.size());
    if (name == "jsd") {
      r.value = jsd(set_a, set_b, grid_res);
      r.config["grid_res"] = std::to_string(grid_res);
    } else if (name == "cov" || name == "cov-cd" || name == "cov-emd") {
      const CloudDist d = name == "cov-emd" ? CloudDist::emd : name == "cov-cd" ? CloudDist::chamfer : dist;
      r.value = coverage(set_a, set_b, d, g.threads);
      r.config["dist"] = to_string(d);
    } else if (name == "mmd" || name == "mmd-cd" || name == "mmd-emd") {
      const CloudDist d = name == "mmd-emd" ? CloudDist::emd : name == "mmd-cd" ? CloudDist::chamfer : dist;
      r.value = mmd(set_a, set_b, d, g.threads);
      r.config["dist"] = to_string(d);
    } else {
      throw InvalidArgument("unknown metric '" + name + "' (want jsd, cov[-cd|-emd], mmd[-cd|-emd])");
    }
    reports.push_back(std::move(r));
  }

  std::ostringstream records;
  for (const auto& r : reports) records << r.to_record() << "\n";
  std::cout << records.str();
  if (!report_path.empty()) {
    {
      std::ofstream out(report_path);
      if (!out) throw IoError("cannot write report: " + report_path);
      out << records.str();
    }
    write_sibling_manifest(report_path, "evaluate", g,
                           {{"set_a", dir_a}, {"set_b", dir_b}, {"metrics", metrics_csv}});
  }
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_render(const GlobalOpts& g, const std::string& cloud_path, const std::string& log_path,
               const std::string& metric_name, const std::string& out_path) {
  (void)g;
  if (out_path.empty()) throw InvalidArgument("render: --out image path required");
  if (!cloud_path.empty()) {
    render_cloud_ppm(load_cloud(cloud_path), out_path);
    write_sibling_manifest(out_path, "render", g, {{"cloud", cloud_path}});
    std::cout << "rendered " << cloud_path << " -> " << out_path << "\n";
    return 0;
  }
  if (log_path.empty() || metric_name.empty())
    throw InvalidArgument("render: need --cloud, or --log with --metric");

  std::ifstream in(log_path);
  if (!in) throw IoError("cannot open log: " + log_path);
  std::vector<std::pair<int, double>> series;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const MetricReport r = MetricReport::from_record(line);
    if (r.name != metric_name) continue;
    const auto it = r.config.find("epoch");
    const int epoch = it == r.config.end() ? static_cast<int>(series.size()) : std::stoi(it->second);
    series.emplace_back(epoch, r.value);
  }
  if (series.empty()) throw InvalidArgument("no '" + metric_name + "' records in " + log_path);
  std::sort(series.begin(), series.end());
  std::vector<double> values;
  values.reserve(series.size());
  for (const auto& [e, v] : series) values.push_back(v);
  render_curve_ppm(values, out_path);
  write_sibling_manifest(out_path, "render", g, {{"log", log_path}, {"metric", metric_name}});
  std::cout << "rendered " << values.size() << " '" << metric_name << "' records -> " << out_path
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"latent-space Laplacian pyramid point-cloud models"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may appear after the subcommand

  GlobalOpts g;
  app.add_option("--seed", g.seed, "master random seed")->capture_default_str();
  app.add_option("--preset", g.preset, "named config preset (paper|desk)")->capture_default_str();
  app.add_option("--config", g.config_path, "JSON config file overriding the preset");
  app.add_option("--out", g.out_dir, "output directory");
  app.add_option("--threads", g.threads, "worker threads for set-level metrics")
      ->capture_default_str();

  auto* ingest = app.add_subcommand("ingest", "build a multi-resolution dataset");
  int synthetic_count = 0;
  std::string mesh_dir;
  ingest->add_option("--synthetic", synthetic_count, "number of synthetic shapes (0 = preset count)");
  ingest->add_option("--mesh-dir", mesh_dir, "directory of .obj meshes to sample instead");

  auto* train = app.add_subcommand("train", "train autoencoders and latent GANs");
  std::string dataset_dir, stage = "all";
  train->add_option("--dataset", dataset_dir, "dataset directory from ingest")->required();
  train->add_option("--stage", stage, "all, ae-<k> or gan-<k>")->capture_default_str();

  auto* synth = app.add_subcommand("synthesize", "sample new shapes at every resolution");
  std::string pyramid_path;
  int count = 1;
  synth->add_option("--pyramid", pyramid_path, "pyramid manifest from train")->required();
  synth->add_option("--count", count, "number of shapes to sample")->capture_default_str();

  auto* upsample = app.add_subcommand("upsample", "refine a low-resolution cloud through the pyramid");
  std::string up_pyramid, up_input;
  upsample->add_option("--pyramid", up_pyramid, "pyramid manifest from train")->required();
  upsample->add_option("--input", up_input, "input cloud (.pcld or .xyz) at base resolution")
      ->required();

  auto* evaluate = app.add_subcommand("evaluate", "compare two sets of clouds");
  std::string dir_a, dir_b, metrics_csv = "jsd,cov-cd,mmd-cd", dist_str = "cd", report_path,
      plots_dir;
  int grid_res = 28, level = -1;
  evaluate->add_option("--set-a", dir_a, "directory of generated/candidate clouds")->required();
  evaluate->add_option("--set-b", dir_b, "directory of reference clouds")->required();
  evaluate->add_option("--metrics", metrics_csv, "comma list: jsd,cov-cd,mmd-cd,cov-emd,mmd-emd")
      ->capture_default_str();
  evaluate->add_option("--grid-res", grid_res, "voxel grid resolution for jsd")->capture_default_str();
  evaluate->add_option("--dist", dist_str, "distance for bare cov/mmd names (cd|emd)")
      ->capture_default_str();
  evaluate->add_option("--level", level, "only files named level_<k> (-1 = all)")
      ->capture_default_str();
  evaluate->add_option("--report", report_path, "also write records to this file");
  evaluate->add_option("--plots", plots_dir, "render preview images of both sets into this directory");

  auto* render = app.add_subcommand("render", "export scatter or loss-curve images (PPM)");
  std::string render_cloud, render_log, render_metric;
  render->add_option("--cloud", render_cloud, "cloud file to scatter-render");
  render->add_option("--log", render_log, "metric log file to plot");
  render->add_option("--metric", render_metric, "metric name to extract from the log");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ingest) return cmd_ingest(g, synthetic_count, mesh_dir);
    if (*train) return cmd_train(g, dataset_dir, stage);
    if (*synth) return cmd_synthesize(g, pyramid_path, count);
    if (*upsample) return cmd_upsample(g, up_pyramid, up_input);
    if (*evaluate)
      return cmd_evaluate(g, dir_a, dir_b, metrics_csv, grid_res, dist_str, level, report_path,
                          plots_dir);
    if (*render) return cmd_render(g, render_cloud, render_log, render_metric, g.out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
