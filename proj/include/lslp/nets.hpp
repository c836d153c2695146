#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lslp/common.hpp"
#include "lslp/point_cloud.hpp"
#include "lslp/rng.hpp"

namespace lslp {

/// d_k-dimensional latent representation of a shape at one pyramid level.
struct LatentCode {
  Eigen::VectorXd values;
  int level = 0;

  int dim() const { return static_cast<int>(values.size()); }
};

/// Standard-normal noise with seed provenance.
struct NoiseVector {
  Eigen::VectorXd values;
  std::uint64_t seed = 0;
};

NoiseVector make_noise(int dim, std::uint64_t seed);

namespace nets {

struct Linear {
  Eigen::MatrixXd W;  // out x in
  Eigen::VectorXd b;  // out
};

/// Flat view of one parameter tensor, used by the optimizer, checkpointing
/// and gradient checks.
struct TensorRef {
  std::string name;
  std::vector<long> shape;
  double* data = nullptr;
  long size = 0;
};

std::vector<TensorRef> tensor_refs(std::vector<Linear>& layers, const std::string& prefix = "");

/// Multilayer perceptron, ReLU on hidden layers, linear output.
/// Columns of the input matrix are independent samples.
struct Mlp {
  std::vector<Linear> layers;

  int input_dim() const { return static_cast<int>(layers.front().W.cols()); }
  int output_dim() const { return static_cast<int>(layers.back().W.rows()); }
  std::vector<int> widths() const;

  Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;

  struct Cache {
    std::vector<Eigen::MatrixXd> acts;  // acts[0] = input, acts[l] = post-activation of layer l
    std::vector<Eigen::MatrixXd> pre;   // pre-activation of layer l
  };
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Cache& cache) const;

  struct Grads {
    std::vector<Linear> layer;
    Eigen::MatrixXd input;  // dL/dinput, same shape as the forward input
  };
  Grads backward(const Cache& cache, const Eigen::MatrixXd& dout) const;

  std::vector<TensorRef> tensors() { return tensor_refs(layers); }
  bool all_finite() const;
};

/// Fan-in-scaled uniform init, biases zero, values snapped to float32.
Mlp make_mlp(const std::vector<int>& widths, Rng& rng);

// ---------------------------------------------------------------------------
// The four per-level networks.

/// PointNet-style encoder: a shared per-point MLP (3 -> hidden... -> d_k)
/// followed by an elementwise max over points. The max makes the output
/// exactly invariant to point order.
struct EncoderParams {
  int level = 0;
  int n_points = 0;
  int latent_dim = 0;
  Mlp point_mlp;
};

/// Fully-connected decoder: d_k -> hidden... -> 3*n_k, reshaped to points.
struct DecoderParams {
  int level = 0;
  int n_points = 0;
  int latent_dim = 0;
  Mlp mlp;
};

/// Latent generator. Unconditional at level 0 (z -> full code); conditional
/// above (concat(cond, z) -> residual, which the caller adds to the rough
/// code).
struct GeneratorParams {
  int level = 0;
  int latent_dim = 0;
  int noise_dim = 0;
  bool conditional = false;
  Mlp mlp;
};

/// Latent discriminator producing a pre-sigmoid logit. Optionally conditioned
/// on the rough code (concat(h, cond)).
struct DiscriminatorParams {
  int level = 0;
  int latent_dim = 0;
  bool conditional = false;
  Mlp mlp;
};

EncoderParams make_encoder(int level, int n_points, int latent_dim,
                           const std::vector<int>& hidden, Rng& rng);
DecoderParams make_decoder(int level, int n_points, int latent_dim,
                           const std::vector<int>& hidden, Rng& rng);
GeneratorParams make_generator(int level, int latent_dim, int noise_dim, bool conditional,
                               const std::vector<int>& hidden, Rng& rng);
DiscriminatorParams make_discriminator(int level, int latent_dim, bool conditional,
                                       const std::vector<int>& hidden, Rng& rng);

// ---------------------------------------------------------------------------
// Forward contracts.

LatentCode encode(const EncoderParams& enc, const PointCloud& pc);
PointCloud decode(const DecoderParams& dec, const LatentCode& h);
LatentCode generate(const GeneratorParams& gen, const std::optional<LatentCode>& cond,
                    const NoiseVector& z);
double discriminate(const DiscriminatorParams& disc, const LatentCode& h,
                    const std::optional<LatentCode>& cond);

// ---------------------------------------------------------------------------
// Cached forwards and backwards, for training.

struct EncodeCache {
  Mlp::Cache mlp;
  std::vector<int> argmax;  // winning point per latent dimension (lowest index on ties)
};

LatentCode encode(const EncoderParams& enc, const PointCloud& pc, EncodeCache& cache);
Mlp::Grads encode_backward(const EncoderParams& enc, const EncodeCache& cache,
                           const Eigen::VectorXd& dcode);

PointCloud decode(const DecoderParams& dec, const LatentCode& h, Mlp::Cache& cache);
Mlp::Grads decode_backward(const DecoderParams& dec, const Mlp::Cache& cache,
                           const Eigen::VectorXd& dpoints_flat);

LatentCode generate(const GeneratorParams& gen, const std::optional<LatentCode>& cond,
                    const NoiseVector& z, Mlp::Cache& cache);
Mlp::Grads generate_backward(const GeneratorParams& gen, const Mlp::Cache& cache,
                             const Eigen::VectorXd& dout);

double discriminate(const DiscriminatorParams& disc, const LatentCode& h,
                    const std::optional<LatentCode>& cond, Mlp::Cache& cache);
Mlp::Grads discriminate_backward(const DiscriminatorParams& disc, const Mlp::Cache& cache,
                                 double dlogit);

// ---------------------------------------------------------------------------
// Gradient verification.

/// Scalar loss on a network's output vector, with its own gradient.
struct VectorLoss {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad;
};

/// Max over parameters of |analytic - central difference| /
/// max(|analytic|, |numeric|, 1e-8), with step 1e-5. Throws on non-finite
/// gradients. Intended for small nets (<= ~1e4 parameters).
double gradient_check_encoder(const EncoderParams& enc, const PointCloud& input,
                              const VectorLoss& loss);
double gradient_check_decoder(const DecoderParams& dec, const LatentCode& input,
                              const VectorLoss& loss);
double gradient_check_generator(const GeneratorParams& gen, const std::optional<LatentCode>& cond,
                                const NoiseVector& z, const VectorLoss& loss);
double gradient_check_discriminator(const DiscriminatorParams& disc, const LatentCode& h,
                                    const std::optional<LatentCode>& cond, const VectorLoss& loss);

}  // namespace nets
}  // namespace lslp
