#include "lslp/pyramid.hpp"

#include <fstream>

#include <json.hpp>

#include "lslp/checkpoint.hpp"

namespace lslp {

namespace {

using nlohmann::json;

[[noreturn]] void structure_error(int level, const std::string& what) {
  throw InvalidArgument("pyramid: stage " + std::to_string(level) + ": " + what);
}

}  // namespace

void Pyramid::validate_structure() const {
  ladder.validate();
  if (static_cast<int>(stages.size()) != ladder.stages())
    throw InvalidArgument("pyramid: ladder wants " + std::to_string(ladder.stages()) +
                          " stages, found " + std::to_string(stages.size()));
  for (int k = 0; k < ladder.stages(); ++k) {
    const auto& s = stage(k);
    if (s.level != k) structure_error(k, "level field says " + std::to_string(s.level));
    if (s.resolution != ladder.resolution_at(k))
      structure_error(k, "resolution " + std::to_string(s.resolution) + " != ladder " +
                             std::to_string(ladder.resolution_at(k)));
    if (s.latent_dim != ladder.latent_dim_at(k)) structure_error(k, "latent dim mismatch vs ladder");

    if (s.encoder) {
      if (s.encoder->level != k) structure_error(k, "encoder checkpoint is for level " + std::to_string(s.encoder->level));
      if (s.encoder->n_points != s.resolution) structure_error(k, "encoder resolution mismatch");
      if (s.encoder->latent_dim != s.latent_dim) structure_error(k, "encoder latent dim mismatch");
    }
    if (s.decoder) {
      if (s.decoder->level != k) structure_error(k, "decoder checkpoint is for level " + std::to_string(s.decoder->level));
      if (s.decoder->n_points != s.resolution) structure_error(k, "decoder resolution mismatch");
      if (s.decoder->latent_dim != s.latent_dim) structure_error(k, "decoder latent dim mismatch");
    }
    if (s.generator) {
      if (s.generator->level != k) structure_error(k, "generator checkpoint is for level " + std::to_string(s.generator->level));
      if (s.generator->latent_dim != s.latent_dim) structure_error(k, "generator latent dim mismatch");
      if (s.generator->conditional != (k > 0))
        structure_error(k, k > 0 ? "generator must be conditional above level 0"
                                 : "level-0 generator must be unconditional");
    }
    if (s.discriminator) {
      if (s.discriminator->level != k) structure_error(k, "discriminator checkpoint is for level " + std::to_string(s.discriminator->level));
      if (s.discriminator->latent_dim != s.latent_dim) structure_error(k, "discriminator latent dim mismatch");
    }
  }
}

Pyramid make_pyramid_shell(const ResolutionLadder& ladder) {
  ladder.validate();
  Pyramid pyr;
  pyr.ladder = ladder;
  for (int k = 0; k < ladder.stages(); ++k) {
    PyramidStage s;
    s.level = k;
    s.resolution = ladder.resolution_at(k);
    s.latent_dim = ladder.latent_dim_at(k);
    pyr.stages.push_back(std::move(s));
  }
  return pyr;
}

Pyramid make_random_pyramid(const ResolutionLadder& ladder, const PyramidArch& arch,
                            std::uint64_t seed) {
  Pyramid pyr = make_pyramid_shell(ladder);
  Rng rng(seed);
  for (auto& s : pyr.stages) {
    const bool conditional = s.level > 0;
    Rng child(rng.fork());
    s.encoder = nets::make_encoder(s.level, s.resolution, s.latent_dim, arch.encoder_hidden, child);
    s.decoder = nets::make_decoder(s.level, s.resolution, s.latent_dim, arch.decoder_hidden, child);
    s.generator = nets::make_generator(s.level, s.latent_dim, arch.noise_dim, conditional,
                                       arch.gan_hidden, child);
    s.discriminator = nets::make_discriminator(
        s.level, s.latent_dim, conditional && arch.condition_discriminator, arch.gan_hidden, child);
  }
  pyr.validate_structure();
  return pyr;
}

RefineResult refine_step(const PyramidStage& stage, const PointCloud& x_prev, const NoiseVector& z,
                         bool use_residual) {
  if (!stage.encoder || !stage.decoder || !stage.generator)
    throw InvalidArgument("refine_step: stage " + std::to_string(stage.level) +
                          " is missing encoder, decoder or generator params");
  if (2 * x_prev.size() != stage.resolution)
    throw InvalidArgument("refine_step: input has " + std::to_string(x_prev.size()) +
                          " points, stage " + std::to_string(stage.level) + " expects " +
                          std::to_string(stage.resolution / 2));

  const PointCloud rough_cloud = knn_upsample(x_prev);
  LatentCode code = nets::encode(*stage.encoder, rough_cloud);
  if (use_residual) {
    const LatentCode residual = nets::generate(*stage.generator, code, z);
    code.values += residual.values;
  }
  return {nets::decode(*stage.decoder, code), std::move(code)};
}

std::vector<PointCloud> synthesize(const Pyramid& pyr, const std::vector<std::uint64_t>& seeds,
                                   bool use_residual) {
  pyr.validate_structure();
  if (static_cast<int>(seeds.size()) != pyr.ladder.stages())
    throw InvalidArgument("synthesize: need " + std::to_string(pyr.ladder.stages()) +
                          " seeds, got " + std::to_string(seeds.size()));
  const auto& base = pyr.stage(0);
  if (!base.generator || !base.decoder)
    throw InvalidArgument("synthesize: stage 0 is missing generator or decoder params");

  const NoiseVector z0 = make_noise(base.generator->noise_dim, seeds[0]);
  const LatentCode h0 = nets::generate(*base.generator, std::nullopt, z0);
  std::vector<PointCloud> out;
  out.push_back(nets::decode(*base.decoder, h0));

  for (int k = 1; k < pyr.ladder.stages(); ++k) {
    const auto& s = pyr.stage(k);
    if (!s.generator)
      throw InvalidArgument("synthesize: stage " + std::to_string(k) + " is missing generator params");
    const NoiseVector z = make_noise(s.generator->noise_dim, seeds[static_cast<std::size_t>(k)]);
    out.push_back(refine_step(s, out.back(), z, use_residual).cloud);
  }
  return out;
}

std::vector<PointCloud> upsample_shape(const Pyramid& pyr, const PointCloud& x0,
                                       const std::vector<std::uint64_t>& seeds, bool use_residual) {
  pyr.validate_structure();
  if (x0.size() != pyr.ladder.n0)
    throw InvalidArgument("upsample_shape: input has " + std::to_string(x0.size()) +
                          " points, ladder base is " + std::to_string(pyr.ladder.n0));
  if (static_cast<int>(seeds.size()) != pyr.ladder.refinements)
    throw InvalidArgument("upsample_shape: need " + std::to_string(pyr.ladder.refinements) +
                          " seeds, got " + std::to_string(seeds.size()));

  std::vector<PointCloud> out;
  const PointCloud* prev = &x0;
  for (int k = 1; k < pyr.ladder.stages(); ++k) {
    const auto& s = pyr.stage(k);
    if (!s.generator)
      throw InvalidArgument("upsample_shape: stage " + std::to_string(k) + " is missing generator params");
    const NoiseVector z = make_noise(s.generator->noise_dim, seeds[static_cast<std::size_t>(k - 1)]);
    out.push_back(refine_step(s, *prev, z, use_residual).cloud);
    prev = &out.back();
  }
  return out;
}

void save_pyramid(const Pyramid& pyr, const std::filesystem::path& manifest_path) {
  pyr.validate_structure();
  const auto dir = manifest_path.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);

  json manifest;
  manifest["format"] = "lslp-pyramid";
  manifest["version"] = 1;
  manifest["ladder"] = {{"n0", pyr.ladder.n0},
                        {"refinements", pyr.ladder.refinements},
                        {"latent_dims", pyr.ladder.latent_dims}};
  json stages = json::array();
  for (const auto& s : pyr.stages) {
    json js;
    js["level"] = s.level;
    const std::string tag = std::to_string(s.level);
    auto emit = [&](const char* key, const auto& opt, const std::string& filename) {
      if (!opt) return;
      save_checkpoint(AnyParams{*opt}, CheckpointMeta{}, dir / filename);
      js[key] = filename;
    };
    emit("encoder", s.encoder, "encoder_" + tag + ".ckpt");
    emit("decoder", s.decoder, "decoder_" + tag + ".ckpt");
    emit("generator", s.generator, "generator_" + tag + ".ckpt");
    emit("discriminator", s.discriminator, "discriminator_" + tag + ".ckpt");
    stages.push_back(std::move(js));
  }
  manifest["stages"] = std::move(stages);

  std::ofstream out(manifest_path);
  if (!out) throw IoError("pyramid: cannot write manifest: " + manifest_path.string());
  out << manifest.dump(2) << "\n";
}

Pyramid load_pyramid(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw IoError("pyramid: cannot open manifest: " + manifest_path.string());
  json manifest;
  try {
    in >> manifest;
  } catch (const json::exception& e) {
    throw FormatError("pyramid: unparseable manifest: " + std::string(e.what()));
  }
  if (manifest.value("format", "") != "lslp-pyramid")
    throw FormatError("pyramid: not a pyramid manifest: " + manifest_path.string());

  ResolutionLadder ladder;
  ladder.n0 = manifest.at("ladder").at("n0").get<int>();
  ladder.refinements = manifest.at("ladder").at("refinements").get<int>();
  ladder.latent_dims = manifest.at("ladder").at("latent_dims").get<std::vector<int>>();

  Pyramid pyr = make_pyramid_shell(ladder);
  const auto dir = manifest_path.parent_path();
  const auto& stages = manifest.at("stages");
  if (static_cast<int>(stages.size()) != ladder.stages())
    throw FormatError("pyramid: manifest lists " + std::to_string(stages.size()) + " stages, ladder wants " +
                      std::to_string(ladder.stages()));

  for (const auto& js : stages) {
    const int level = js.at("level").get<int>();
    if (level < 0 || level >= ladder.stages())
      throw FormatError("pyramid: manifest stage level " + std::to_string(level) + " out of range");
    auto& s = pyr.stage(level);
    if (js.contains("encoder")) s.encoder = load_encoder_checkpoint(dir / js.at("encoder").get<std::string>());
    if (js.contains("decoder")) s.decoder = load_decoder_checkpoint(dir / js.at("decoder").get<std::string>());
    if (js.contains("generator")) s.generator = load_generator_checkpoint(dir / js.at("generator").get<std::string>());
    if (js.contains("discriminator"))
      s.discriminator = load_discriminator_checkpoint(dir / js.at("discriminator").get<std::string>());
  }
  pyr.validate_structure();
  return pyr;
}

}  // namespace lslp
