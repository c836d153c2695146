#include "lslp/nets.hpp"

#include <cmath>

namespace lslp {

NoiseVector make_noise(int dim, std::uint64_t seed) {
  if (dim < 1) throw InvalidArgument("make_noise: dim must be positive");
  Rng rng(seed);
  NoiseVector z;
  z.seed = seed;
  z.values.resize(dim);
  for (int i = 0; i < dim; ++i) z.values[i] = rng.normal();
  return z;
}

namespace nets {

namespace {

Eigen::MatrixXd cloud_as_columns(const PointCloud& pc) {
  Eigen::MatrixXd m(3, pc.size());
  for (int i = 0; i < pc.size(); ++i) m.col(i) = pc[i];
  return m;
}

Eigen::VectorXd concat(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd out(a.size() + b.size());
  out.head(a.size()) = a;
  out.tail(b.size()) = b;
  return out;
}

void check_cond(bool conditional, bool has_cond, int level, const char* who) {
  if (conditional && !has_cond)
    throw InvalidArgument(std::string(who) + ": level " + std::to_string(level) +
                          " is conditional but no conditioning code was given");
  if (!conditional && has_cond)
    throw InvalidArgument(std::string(who) + ": level " + std::to_string(level) +
                          " is unconditional but a conditioning code was given");
}

void check_dim(const Eigen::VectorXd& v, int expected, const char* who, const char* what) {
  if (static_cast<int>(v.size()) != expected)
    throw InvalidArgument(std::string(who) + ": " + what + " has dimension " +
                          std::to_string(v.size()) + ", expected " + std::to_string(expected));
}

Eigen::VectorXd gen_input(const GeneratorParams& gen, const std::optional<LatentCode>& cond,
                          const NoiseVector& z) {
  check_cond(gen.conditional, cond.has_value(), gen.level, "generate");
  check_dim(z.values, gen.noise_dim, "generate", "noise");
  if (cond) {
    check_dim(cond->values, gen.latent_dim, "generate", "conditioning code");
    return concat(cond->values, z.values);
  }
  return z.values;
}

Eigen::VectorXd disc_input(const DiscriminatorParams& disc, const LatentCode& h,
                           const std::optional<LatentCode>& cond) {
  check_cond(disc.conditional, cond.has_value(), disc.level, "discriminate");
  check_dim(h.values, disc.latent_dim, "discriminate", "latent code");
  if (cond) {
    check_dim(cond->values, disc.latent_dim, "discriminate", "conditioning code");
    return concat(h.values, cond->values);
  }
  return h.values;
}

}  // namespace

std::vector<TensorRef> tensor_refs(std::vector<Linear>& layers, const std::string& prefix) {
  std::vector<TensorRef> refs;
  refs.reserve(layers.size() * 2);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto& lin = layers[l];
    const std::string base = prefix + "layer" + std::to_string(l);
    refs.push_back({base + ".weight", {lin.W.rows(), lin.W.cols()}, lin.W.data(), lin.W.size()});
    refs.push_back({base + ".bias", {lin.b.size()}, lin.b.data(), lin.b.size()});
  }
  return refs;
}

std::vector<int> Mlp::widths() const {
  std::vector<int> w;
  w.push_back(input_dim());
  for (const auto& l : layers) w.push_back(static_cast<int>(l.W.rows()));
  return w;
}

bool Mlp::all_finite() const {
  for (const auto& l : layers) {
    if (!l.W.allFinite() || !l.b.allFinite()) return false;
  }
  return true;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd a = x;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Eigen::MatrixXd z = (layers[l].W * a).colwise() + layers[l].b;
    if (l + 1 < layers.size()) z = z.cwiseMax(0.0);
    a = std::move(z);
  }
  return a;
}

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x) const {
  return forward(Eigen::MatrixXd(x)).col(0);
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Cache& cache) const {
  cache.acts.clear();
  cache.pre.clear();
  cache.acts.push_back(x);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Eigen::MatrixXd z = (layers[l].W * cache.acts.back()).colwise() + layers[l].b;
    cache.pre.push_back(z);
    if (l + 1 < layers.size()) z = z.cwiseMax(0.0);
    cache.acts.push_back(std::move(z));
  }
  return cache.acts.back();
}

Mlp::Grads Mlp::backward(const Cache& cache, const Eigen::MatrixXd& dout) const {
  const std::size_t n_layers = layers.size();
  Grads g;
  g.layer.resize(n_layers);

  Eigen::MatrixXd dz = dout;  // output layer is linear
  for (std::size_t l = n_layers; l-- > 0;) {
    g.layer[l].W = dz * cache.acts[l].transpose();
    g.layer[l].b = dz.rowwise().sum();
    Eigen::MatrixXd da = layers[l].W.transpose() * dz;
    if (l > 0) {
      // ReLU mask from the previous layer's pre-activation
      dz = da.cwiseProduct((cache.pre[l - 1].array() > 0.0).cast<double>().matrix());
    } else {
      g.input = std::move(da);
    }
  }
  return g;
}

Mlp make_mlp(const std::vector<int>& widths, Rng& rng) {
  if (widths.size() < 2) throw InvalidArgument("make_mlp: need at least input and output widths");
  Mlp net;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const int in = widths[l], out = widths[l + 1];
    if (in < 1 || out < 1) throw InvalidArgument("make_mlp: widths must be positive");
    Linear lin;
    lin.W.resize(out, in);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    for (Eigen::Index i = 0; i < lin.W.size(); ++i)
      lin.W.data()[i] = round_f32(rng.uniform(-bound, bound));
    lin.b = Eigen::VectorXd::Zero(out);
    net.layers.push_back(std::move(lin));
  }
  return net;
}

EncoderParams make_encoder(int level, int n_points, int latent_dim,
                           const std::vector<int>& hidden, Rng& rng) {
  std::vector<int> widths{3};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(latent_dim);
  return EncoderParams{level, n_points, latent_dim, make_mlp(widths, rng)};
}

DecoderParams make_decoder(int level, int n_points, int latent_dim,
                           const std::vector<int>& hidden, Rng& rng) {
  std::vector<int> widths{latent_dim};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(3 * n_points);
  return DecoderParams{level, n_points, latent_dim, make_mlp(widths, rng)};
}

GeneratorParams make_generator(int level, int latent_dim, int noise_dim, bool conditional,
                               const std::vector<int>& hidden, Rng& rng) {
  std::vector<int> widths{(conditional ? latent_dim : 0) + noise_dim};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(latent_dim);
  GeneratorParams gen{level, latent_dim, noise_dim, conditional, make_mlp(widths, rng)};
  if (conditional) {
    // residual branch starts at the identity correction (r = 0); training
    // grows it from there
    gen.mlp.layers.back().W.setZero();
    gen.mlp.layers.back().b.setZero();
  }
  return gen;
}

DiscriminatorParams make_discriminator(int level, int latent_dim, bool conditional,
                                       const std::vector<int>& hidden, Rng& rng) {
  std::vector<int> widths{latent_dim * (conditional ? 2 : 1)};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(1);
  return DiscriminatorParams{level, latent_dim, conditional, make_mlp(widths, rng)};
}

LatentCode encode(const EncoderParams& enc, const PointCloud& pc, EncodeCache& cache) {
  if (pc.size() != enc.n_points)
    throw InvalidArgument("encode: cloud has " + std::to_string(pc.size()) + " points, level " +
                          std::to_string(enc.level) + " expects " + std::to_string(enc.n_points));

  const Eigen::MatrixXd per_point = enc.point_mlp.forward(cloud_as_columns(pc), cache.mlp);

  LatentCode h;
  h.level = enc.level;
  h.values.resize(enc.latent_dim);
  cache.argmax.assign(static_cast<std::size_t>(enc.latent_dim), 0);
  for (int d = 0; d < enc.latent_dim; ++d) {
    int best = 0;
    for (int i = 1; i < pc.size(); ++i)
      if (per_point(d, i) > per_point(d, best)) best = i;
    cache.argmax[static_cast<std::size_t>(d)] = best;
    h.values[d] = per_point(d, best);
  }
  return h;
}

LatentCode encode(const EncoderParams& enc, const PointCloud& pc) {
  EncodeCache cache;
  return encode(enc, pc, cache);
}

Mlp::Grads encode_backward(const EncoderParams& enc, const EncodeCache& cache,
                           const Eigen::VectorXd& dcode) {
  // route each latent dimension's gradient to its winning point
  Eigen::MatrixXd dper_point = Eigen::MatrixXd::Zero(enc.latent_dim, cache.mlp.acts[0].cols());
  for (int d = 0; d < enc.latent_dim; ++d)
    dper_point(d, cache.argmax[static_cast<std::size_t>(d)]) = dcode[d];
  return enc.point_mlp.backward(cache.mlp, dper_point);
}

PointCloud decode(const DecoderParams& dec, const LatentCode& h, Mlp::Cache& cache) {
  check_dim(h.values, dec.latent_dim, "decode", "latent code");
  const Eigen::VectorXd flat = dec.mlp.forward(Eigen::MatrixXd(h.values), cache).col(0);
  PointCloud pc;
  pc.points.reserve(static_cast<std::size_t>(dec.n_points));
  for (int i = 0; i < dec.n_points; ++i)
    pc.points.emplace_back(flat[3 * i], flat[3 * i + 1], flat[3 * i + 2]);
  return pc;
}

PointCloud decode(const DecoderParams& dec, const LatentCode& h) {
  Mlp::Cache cache;
  return decode(dec, h, cache);
}

Mlp::Grads decode_backward(const DecoderParams& dec, const Mlp::Cache& cache,
                           const Eigen::VectorXd& dpoints_flat) {
  return dec.mlp.backward(cache, Eigen::MatrixXd(dpoints_flat));
}

LatentCode generate(const GeneratorParams& gen, const std::optional<LatentCode>& cond,
                    const NoiseVector& z, Mlp::Cache& cache) {
  const Eigen::VectorXd in = gen_input(gen, cond, z);
  LatentCode out;
  out.level = gen.level;
  out.values = gen.mlp.forward(Eigen::MatrixXd(in), cache).col(0);
  return out;
}

LatentCode generate(const GeneratorParams& gen, const std::optional<LatentCode>& cond,
                    const NoiseVector& z) {
  Mlp::Cache cache;
  return generate(gen, cond, z, cache);
}

Mlp::Grads generate_backward(const GeneratorParams& gen, const Mlp::Cache& cache,
                             const Eigen::VectorXd& dout) {
  return gen.mlp.backward(cache, Eigen::MatrixXd(dout));
}

double discriminate(const DiscriminatorParams& disc, const LatentCode& h,
                    const std::optional<LatentCode>& cond, Mlp::Cache& cache) {
  const Eigen::VectorXd in = disc_input(disc, h, cond);
  return disc.mlp.forward(Eigen::MatrixXd(in), cache)(0, 0);
}

double discriminate(const DiscriminatorParams& disc, const LatentCode& h,
                    const std::optional<LatentCode>& cond) {
  Mlp::Cache cache;
  return discriminate(disc, h, cond, cache);
}

Mlp::Grads discriminate_backward(const DiscriminatorParams& disc, const Mlp::Cache& cache,
                                 double dlogit) {
  Eigen::MatrixXd dout(1, 1);
  dout(0, 0) = dlogit;
  return disc.mlp.backward(cache, dout);
}

namespace {

double max_rel_error(std::vector<TensorRef> params, std::vector<TensorRef> analytic,
                     const std::function<double()>& loss_fn) {
  constexpr double step = 1e-5;
  double worst = 0.0;
  for (std::size_t t = 0; t < params.size(); ++t) {
    for (long i = 0; i < params[t].size; ++i) {
      const double a = analytic[t].data[i];
      if (!std::isfinite(a))
        throw Error("gradient_check: non-finite analytic gradient in " + params[t].name);
      double& p = params[t].data[i];
      const double saved = p;
      p = saved + step;
      const double lp = loss_fn();
      p = saved - step;
      const double lm = loss_fn();
      p = saved;
      const double numeric = (lp - lm) / (2.0 * step);
      if (!std::isfinite(numeric))
        throw Error("gradient_check: non-finite numeric gradient in " + params[t].name);
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      worst = std::max(worst, std::abs(a - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace

double gradient_check_encoder(const EncoderParams& enc, const PointCloud& input,
                              const VectorLoss& loss) {
  EncoderParams work = enc;
  EncodeCache cache;
  const LatentCode h = encode(work, input, cache);
  const Mlp::Grads analytic = encode_backward(work, cache, loss.grad(h.values));

  auto grads = analytic;  // mutable copy for tensor_refs
  return max_rel_error(work.point_mlp.tensors(), tensor_refs(grads.layer),
                       [&] { return loss.value(encode(work, input).values); });
}

double gradient_check_decoder(const DecoderParams& dec, const LatentCode& input,
                              const VectorLoss& loss) {
  DecoderParams work = dec;
  Mlp::Cache cache;
  const PointCloud out = decode(work, input, cache);
  Eigen::VectorXd flat(3 * out.size());
  for (int i = 0; i < out.size(); ++i) flat.segment<3>(3 * i) = out[i];
  const Mlp::Grads analytic = decode_backward(work, cache, loss.grad(flat));

  auto grads = analytic;
  return max_rel_error(work.mlp.tensors(), tensor_refs(grads.layer), [&] {
    const PointCloud pc = decode(work, input);
    Eigen::VectorXd f(3 * pc.size());
    for (int i = 0; i < pc.size(); ++i) f.segment<3>(3 * i) = pc[i];
    return loss.value(f);
  });
}

double gradient_check_generator(const GeneratorParams& gen, const std::optional<LatentCode>& cond,
                                const NoiseVector& z, const VectorLoss& loss) {
  GeneratorParams work = gen;
  Mlp::Cache cache;
  const LatentCode out = generate(work, cond, z, cache);
  const Mlp::Grads analytic = generate_backward(work, cache, loss.grad(out.values));

  auto grads = analytic;
  return max_rel_error(work.mlp.tensors(), tensor_refs(grads.layer),
                       [&] { return loss.value(generate(work, cond, z).values); });
}

double gradient_check_discriminator(const DiscriminatorParams& disc, const LatentCode& h,
                                    const std::optional<LatentCode>& cond, const VectorLoss& loss) {
  DiscriminatorParams work = disc;
  Mlp::Cache cache;
  const double logit = discriminate(work, h, cond, cache);
  Eigen::VectorXd logit_vec(1);
  logit_vec[0] = logit;
  const Mlp::Grads analytic = discriminate_backward(work, cache, loss.grad(logit_vec)[0]);

  auto grads = analytic;
  return max_rel_error(work.mlp.tensors(), tensor_refs(grads.layer), [&] {
    Eigen::VectorXd v(1);
    v[0] = discriminate(work, h, cond);
    return loss.value(v);
  });
}

}  // namespace nets
}  // namespace lslp
