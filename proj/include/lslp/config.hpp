#pragma once

#include <filesystem>
#include <string>

#include "lslp/data_ingest.hpp"
#include "lslp/pyramid.hpp"
#include "lslp/training.hpp"

namespace lslp {

/// Everything one run needs: ladder, network sizes, training hyperparameters
/// and dataset generation knobs. Two named presets ship built in; a JSON
/// config file can override any field.
struct RunConfig {
  std::string preset = "desk";
  ResolutionLadder ladder;
  PyramidArch arch;
  TrainConfig ae_train;
  TrainConfig gan_train;
  SyntheticDatasetSpec dataset;
  double test_fraction = 0.2;
  // Rough codes for GAN training come from AE-roundtripped coarser clouds
  // (matching inference) rather than raw ground-truth samplings.
  bool rough_from_decoded = true;

  void validate() const;
};

/// Published hyperparameters: n0 = 512, two refinements, Adam with lr 5e-4
/// (500 epochs) for autoencoders and 1e-4 (200 epochs) for GANs, batch 50.
RunConfig paper_preset();

/// Laptop-scale: n0 = 64, two refinements, small widths, 100-epoch
/// autoencoders on a 200-shape synthetic mixture.
RunConfig desk_preset();

RunConfig preset_by_name(const std::string& name);

std::string run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const std::string& text);

RunConfig load_run_config(const std::filesystem::path& path);
void save_run_config(const RunConfig& cfg, const std::filesystem::path& path);

}  // namespace lslp
