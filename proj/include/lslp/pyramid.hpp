#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "lslp/nets.hpp"
#include "lslp/point_cloud.hpp"

namespace lslp {

/// Everything one pyramid level owns. Stage 0 synthesis needs decoder and
/// (unconditional) generator; stages above need encoder, decoder and
/// conditional generator. Encoders at every level and discriminators exist
/// during training.
struct PyramidStage {
  int level = 0;
  int resolution = 0;
  int latent_dim = 0;
  std::optional<nets::EncoderParams> encoder;
  std::optional<nets::DecoderParams> decoder;
  std::optional<nets::GeneratorParams> generator;
  std::optional<nets::DiscriminatorParams> discriminator;
};

struct Pyramid {
  ResolutionLadder ladder;
  std::vector<PyramidStage> stages;

  const PyramidStage& stage(int level) const { return stages[static_cast<std::size_t>(level)]; }
  PyramidStage& stage(int level) { return stages[static_cast<std::size_t>(level)]; }

  /// Cross-stage invariants: stage count, doubling resolutions, latent dims,
  /// and per-net descriptor consistency for every net that is present.
  void validate_structure() const;
};

/// Skeleton with the right resolutions and dims but no parameters.
Pyramid make_pyramid_shell(const ResolutionLadder& ladder);

/// Randomly initialized, fully loaded pyramid (used by structural tests and
/// as the state before training).
struct PyramidArch {
  std::vector<int> encoder_hidden{64, 128, 128, 256};
  std::vector<int> decoder_hidden{256, 256};
  std::vector<int> gan_hidden{256, 256};
  int noise_dim = 32;
  bool condition_discriminator = true;
};

Pyramid make_random_pyramid(const ResolutionLadder& ladder, const PyramidArch& arch,
                            std::uint64_t seed);

struct RefineResult {
  PointCloud cloud;    // X_k, exactly n_k points
  LatentCode code;     // corrected latent h_k
};

/// One coarse-to-fine step: upsample x_prev with the geometric operator,
/// encode the rough cloud, add the generated latent residual, decode.
/// With use_residual = false the correction is skipped and the step is
/// exactly decode(encode(upsample(x_prev))).
RefineResult refine_step(const PyramidStage& stage, const PointCloud& x_prev,
                         const NoiseVector& z, bool use_residual = true);

/// Generative mode: X_0 = g_0(G_0(z_0)), then chained refine steps.
/// seeds has one entry per stage; returns X_0..X_K.
std::vector<PointCloud> synthesize(const Pyramid& pyr, const std::vector<std::uint64_t>& seeds,
                                   bool use_residual = true);

/// Upsampling mode: starts from a supplied cloud of n_0 points; seeds has
/// one entry per refinement level; returns X_1..X_K.
std::vector<PointCloud> upsample_shape(const Pyramid& pyr, const PointCloud& x0,
                                       const std::vector<std::uint64_t>& seeds,
                                       bool use_residual = true);

/// Writes per-stage checkpoints next to the manifest plus a JSON manifest
/// listing the ladder and checkpoint paths.
void save_pyramid(const Pyramid& pyr, const std::filesystem::path& manifest_path);

/// Loads the manifest and all referenced checkpoints, then validates the
/// cross-stage invariants before returning.
Pyramid load_pyramid(const std::filesystem::path& manifest_path);

}  // namespace lslp
