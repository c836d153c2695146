#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "lslp/nets.hpp"
#include "lslp/point_cloud.hpp"

namespace lslp {

struct TrainConfig {
  int epochs = 1;
  double learning_rate = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int batch_size = 50;
  std::uint64_t seed = 0;
  std::string optimizer = "adam";
  double emd_tol = 0.05;  // tolerance handed to the approximate EMD used as the loss
  // per-epoch multiplicative factor on the learning rate; 1 = constant
  double lr_decay = 1.0;

  void validate() const;
};

/// Adam over an externally owned set of tensors. Step snaps parameters back
/// to float32-representable values (the checkpoint invariant).
class AdamOptimizer {
 public:
  AdamOptimizer(std::vector<nets::TensorRef> params, const TrainConfig& cfg);

  /// grads must be aligned one-to-one with the params passed at construction.
  void step(const std::vector<nets::TensorRef>& grads);

  void set_learning_rate(double lr) { lr_ = lr; }
  double learning_rate() const { return lr_; }
  int steps_taken() const { return t_; }

 private:
  std::vector<nets::TensorRef> params_;
  std::vector<std::vector<double>> m_, v_;
  double lr_, beta1_, beta2_, eps_;
  int t_ = 0;
};

// ---------------------------------------------------------------------------
// Autoencoder training (per level, EMD loss).

struct AeArchitecture {
  int level = 0;
  int n_points = 0;
  int latent_dim = 0;
  std::vector<int> encoder_hidden{64, 128, 128, 256};
  std::vector<int> decoder_hidden{256, 256};
};

struct AeTrainResult {
  nets::EncoderParams encoder;
  nets::DecoderParams decoder;
  std::vector<double> loss_history;   // per-epoch mean per-point EMD (training, approximate)
  std::vector<double> audit_history;  // per-epoch exact EMD on a fixed mini-batch
};

/// Minimizes the mean per-point EMD between inputs and reconstructions with
/// Adam. The loss uses the approximate matcher; an exact-EMD audit on a fixed
/// mini-batch is recorded every epoch. Aborts with TrainingError carrying
/// (epoch, batch, parameter norm) if the loss goes non-finite.
AeTrainResult train_autoencoder(const std::vector<PointCloud>& dataset, const AeArchitecture& arch,
                                const TrainConfig& cfg, std::ostream* log = nullptr);

// ---------------------------------------------------------------------------
// Latent datasets.

struct LatentPair {
  LatentCode real;                  // f_k(X_k)
  std::optional<LatentCode> rough;  // f_k(U(X_{k-1})), absent at level 0
};

struct LatentDataset {
  int level = 0;
  std::vector<LatentPair> entries;
};

/// Runs the frozen encoder over the dataset (and over the geometrically
/// upsampled rough sources when given). rough_sources must be empty (level 0)
/// or aligned one-to-one with dataset.
LatentDataset extract_latents(const nets::EncoderParams& enc,
                              const std::vector<PointCloud>& dataset,
                              const std::vector<PointCloud>& rough_sources);

/// Encode-decode every cloud through a frozen autoencoder. Feeding the
/// refinement GANs rough codes built from these (instead of raw samplings)
/// matches what the pyramid actually sees at inference, where every level
/// consumes the previous decoder's output.
std::vector<PointCloud> ae_roundtrip(const nets::EncoderParams& enc,
                                     const nets::DecoderParams& dec,
                                     const std::vector<PointCloud>& clouds);

// ---------------------------------------------------------------------------
// Latent GAN training.

struct GanArchitecture {
  int level = 0;
  int latent_dim = 0;
  int noise_dim = 32;
  std::vector<int> hidden{256, 256};
  bool condition_discriminator = true;
};

struct GanTrainResult {
  nets::GeneratorParams generator;
  nets::DiscriminatorParams discriminator;
  std::vector<double> d_loss_history;
  std::vector<double> g_loss_history;
  std::vector<double> d_accuracy_history;
};

/// Alternating one-discriminator-step / one-generator-step training with the
/// non-saturating cross-entropy objective. Conditional mode trains the
/// residual generator of Eq-style corrections: fake codes are rough + G(rough, z).
/// Aborts with TrainingError if a loss exceeds 1e3 or goes non-finite.
GanTrainResult train_latent_gan(const LatentDataset& data, const GanArchitecture& arch,
                                const TrainConfig& cfg, bool conditional,
                                std::ostream* log = nullptr);

}  // namespace lslp
