#include "lslp/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lslp {

namespace {

using nlohmann::json;

json train_to_json(const TrainConfig& t) {
  return {{"epochs", t.epochs},
          {"learning_rate", t.learning_rate},
          {"beta1", t.beta1},
          {"beta2", t.beta2},
          {"adam_eps", t.adam_eps},
          {"batch_size", t.batch_size},
          {"seed", t.seed},
          {"optimizer", t.optimizer},
          {"emd_tol", t.emd_tol},
          {"lr_decay", t.lr_decay}};
}

void train_from_json(const json& j, TrainConfig& t) {
  t.epochs = j.value("epochs", t.epochs);
  t.learning_rate = j.value("learning_rate", t.learning_rate);
  t.beta1 = j.value("beta1", t.beta1);
  t.beta2 = j.value("beta2", t.beta2);
  t.adam_eps = j.value("adam_eps", t.adam_eps);
  t.batch_size = j.value("batch_size", t.batch_size);
  t.seed = j.value("seed", t.seed);
  t.optimizer = j.value("optimizer", t.optimizer);
  t.emd_tol = j.value("emd_tol", t.emd_tol);
  t.lr_decay = j.value("lr_decay", t.lr_decay);
}

}  // namespace

void RunConfig::validate() const {
  ladder.validate();
  ae_train.validate();
  gan_train.validate();
  dataset.validate();
  if (test_fraction < 0.0 || test_fraction >= 1.0)
    throw InvalidArgument("RunConfig: test_fraction must be in [0, 1)");
  if (arch.noise_dim < 1) throw InvalidArgument("RunConfig: noise_dim must be positive");
}

RunConfig paper_preset() {
  RunConfig cfg;
  cfg.preset = "paper";
  cfg.ladder = {512, 2, {128, 128, 128}};
  cfg.arch.encoder_hidden = {64, 128, 128, 256};
  cfg.arch.decoder_hidden = {256, 256};
  cfg.arch.gan_hidden = {256, 256};
  cfg.arch.noise_dim = 32;
  cfg.arch.condition_discriminator = true;

  cfg.ae_train.epochs = 500;
  cfg.ae_train.learning_rate = 5e-4;
  cfg.ae_train.beta1 = 0.9;
  cfg.ae_train.batch_size = 50;

  cfg.gan_train.epochs = 200;
  cfg.gan_train.learning_rate = 1e-4;
  cfg.gan_train.beta1 = 0.9;
  cfg.gan_train.batch_size = 50;

  // single-class training sets at this scale run to thousands of shapes
  // (airplane 3046 ... multi-class 9000); supply meshes to reach them
  cfg.dataset.count = 200;
  cfg.dataset.classes = 4;
  return cfg;
}

RunConfig desk_preset() {
  RunConfig cfg;
  cfg.preset = "desk";
  cfg.ladder = {64, 2, {32, 32, 32}};
  cfg.arch.encoder_hidden = {32, 64, 64, 128};
  cfg.arch.decoder_hidden = {128, 128};
  cfg.arch.gan_hidden = {128, 128};
  cfg.arch.noise_dim = 32;
  cfg.arch.condition_discriminator = true;

  cfg.ae_train.epochs = 100;
  cfg.ae_train.learning_rate = 1e-3;
  cfg.ae_train.beta1 = 0.9;
  cfg.ae_train.batch_size = 25;
  cfg.ae_train.emd_tol = 0.1;

  cfg.gan_train.epochs = 300;
  cfg.gan_train.learning_rate = 2e-4;
  cfg.gan_train.beta1 = 0.9;
  cfg.gan_train.batch_size = 25;

  cfg.dataset.count = 200;
  cfg.dataset.classes = 4;
  cfg.test_fraction = 0.25;  // 50 held-out shapes at the default 200
  return cfg;
}

RunConfig preset_by_name(const std::string& name) {
  if (name == "paper") return paper_preset();
  if (name == "desk") return desk_preset();
  throw InvalidArgument("unknown preset '" + name + "' (want paper or desk)");
}

std::string run_config_to_json(const RunConfig& cfg) {
  json j;
  j["preset"] = cfg.preset;
  j["ladder"] = {{"n0", cfg.ladder.n0},
                 {"refinements", cfg.ladder.refinements},
                 {"latent_dims", cfg.ladder.latent_dims}};
  j["arch"] = {{"encoder_hidden", cfg.arch.encoder_hidden},
               {"decoder_hidden", cfg.arch.decoder_hidden},
               {"gan_hidden", cfg.arch.gan_hidden},
               {"noise_dim", cfg.arch.noise_dim},
               {"condition_discriminator", cfg.arch.condition_discriminator}};
  j["ae_train"] = train_to_json(cfg.ae_train);
  j["gan_train"] = train_to_json(cfg.gan_train);
  j["dataset"] = {{"count", cfg.dataset.count},
                  {"classes", cfg.dataset.classes},
                  {"jitter", cfg.dataset.jitter}};
  j["test_fraction"] = cfg.test_fraction;
  j["rough_from_decoded"] = cfg.rough_from_decoded;
  return j.dump(2);
}

RunConfig run_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError("config: unparseable JSON: " + std::string(e.what()));
  }

  // fields default from the named preset, then override
  RunConfig cfg = preset_by_name(j.value("preset", "desk"));
  if (j.contains("ladder")) {
    const auto& l = j["ladder"];
    cfg.ladder.n0 = l.value("n0", cfg.ladder.n0);
    cfg.ladder.refinements = l.value("refinements", cfg.ladder.refinements);
    if (l.contains("latent_dims")) cfg.ladder.latent_dims = l["latent_dims"].get<std::vector<int>>();
    if (static_cast<int>(cfg.ladder.latent_dims.size()) != cfg.ladder.refinements + 1)
      cfg.ladder.latent_dims.assign(static_cast<std::size_t>(cfg.ladder.refinements) + 1,
                                    cfg.ladder.latent_dims.empty() ? 128 : cfg.ladder.latent_dims[0]);
  }
  if (j.contains("arch")) {
    const auto& a = j["arch"];
    if (a.contains("encoder_hidden")) cfg.arch.encoder_hidden = a["encoder_hidden"].get<std::vector<int>>();
    if (a.contains("decoder_hidden")) cfg.arch.decoder_hidden = a["decoder_hidden"].get<std::vector<int>>();
    if (a.contains("gan_hidden")) cfg.arch.gan_hidden = a["gan_hidden"].get<std::vector<int>>();
    cfg.arch.noise_dim = a.value("noise_dim", cfg.arch.noise_dim);
    cfg.arch.condition_discriminator =
        a.value("condition_discriminator", cfg.arch.condition_discriminator);
  }
  if (j.contains("ae_train")) train_from_json(j["ae_train"], cfg.ae_train);
  if (j.contains("gan_train")) train_from_json(j["gan_train"], cfg.gan_train);
  if (j.contains("dataset")) {
    const auto& d = j["dataset"];
    cfg.dataset.count = d.value("count", cfg.dataset.count);
    cfg.dataset.classes = d.value("classes", cfg.dataset.classes);
    cfg.dataset.jitter = d.value("jitter", cfg.dataset.jitter);
  }
  cfg.test_fraction = j.value("test_fraction", cfg.test_fraction);
  cfg.rough_from_decoded = j.value("rough_from_decoded", cfg.rough_from_decoded);
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return run_config_from_json(ss.str());
}

void save_run_config(const RunConfig& cfg, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("config: cannot write: " + path.string());
  out << run_config_to_json(cfg) << "\n";
}

}  // namespace lslp
