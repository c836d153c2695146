#include "lslp/training.hpp"

#include <cmath>

#include "lslp/metrics.hpp"

namespace lslp {

namespace {

double softplus(double x) {
  // stable log(1 + e^x)
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double tensor_norm(std::vector<nets::TensorRef> refs) {
  double acc = 0.0;
  for (const auto& t : refs)
    for (long i = 0; i < t.size; ++i) acc += t.data[i] * t.data[i];
  return std::sqrt(acc);
}

struct GradAccum {
  std::vector<nets::Linear> sum;
  int count = 0;

  void add(const nets::Mlp::Grads& g) {
    if (sum.empty()) {
      sum.resize(g.layer.size());
      for (std::size_t l = 0; l < g.layer.size(); ++l) {
        sum[l].W = Eigen::MatrixXd::Zero(g.layer[l].W.rows(), g.layer[l].W.cols());
        sum[l].b = Eigen::VectorXd::Zero(g.layer[l].b.size());
      }
    }
    for (std::size_t l = 0; l < g.layer.size(); ++l) {
      sum[l].W += g.layer[l].W;
      sum[l].b += g.layer[l].b;
    }
    ++count;
  }

  // mean gradient over the batch
  std::vector<nets::TensorRef> refs() {
    if (count > 1) {
      const double inv = 1.0 / static_cast<double>(count);
      for (auto& l : sum) {
        l.W *= inv;
        l.b *= inv;
      }
      count = 1;
    }
    return nets::tensor_refs(sum);
  }

  void reset() {
    for (auto& l : sum) {
      l.W.setZero();
      l.b.setZero();
    }
    count = 0;
  }
};

std::vector<std::vector<int>> make_batches(int n, int batch_size, Rng& rng) {
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  rng.shuffle(order);
  std::vector<std::vector<int>> batches;
  for (int start = 0; start < n; start += batch_size) {
    const int end = std::min(n, start + batch_size);
    batches.emplace_back(order.begin() + start, order.begin() + end);
  }
  return batches;
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw InvalidArgument("TrainConfig: epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw InvalidArgument("TrainConfig: learning_rate must be positive");
  if (beta1 < 0.0 || beta1 >= 1.0) throw InvalidArgument("TrainConfig: beta1 must be in [0, 1)");
  if (beta2 < 0.0 || beta2 >= 1.0) throw InvalidArgument("TrainConfig: beta2 must be in [0, 1)");
  if (batch_size < 1) throw InvalidArgument("TrainConfig: batch_size must be >= 1");
  if (!(emd_tol > 0.0)) throw InvalidArgument("TrainConfig: emd_tol must be positive");
  if (!(lr_decay > 0.0) || lr_decay > 1.0)
    throw InvalidArgument("TrainConfig: lr_decay must be in (0, 1]");
  if (optimizer != "adam") throw InvalidArgument("TrainConfig: unknown optimizer '" + optimizer + "'");
}

AdamOptimizer::AdamOptimizer(std::vector<nets::TensorRef> params, const TrainConfig& cfg)
    : params_(std::move(params)),
      lr_(cfg.learning_rate),
      beta1_(cfg.beta1),
      beta2_(cfg.beta2),
      eps_(cfg.adam_eps) {
  m_.reserve(params_.size());
  v_.reserve(params_.size());
  for (const auto& t : params_) {
    m_.emplace_back(static_cast<std::size_t>(t.size), 0.0);
    v_.emplace_back(static_cast<std::size_t>(t.size), 0.0);
  }
}

void AdamOptimizer::step(const std::vector<nets::TensorRef>& grads) {
  if (grads.size() != params_.size())
    throw InvalidArgument("AdamOptimizer: gradient tensor count mismatch");
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, t_);
  const double bc2 = 1.0 - std::pow(beta2_, t_);
  for (std::size_t k = 0; k < params_.size(); ++k) {
    if (grads[k].size != params_[k].size)
      throw InvalidArgument("AdamOptimizer: gradient shape mismatch for " + params_[k].name);
    double* p = params_[k].data;
    const double* g = grads[k].data;
    auto& m = m_[k];
    auto& v = v_[k];
    for (long i = 0; i < params_[k].size; ++i) {
      m[static_cast<std::size_t>(i)] = beta1_ * m[static_cast<std::size_t>(i)] + (1.0 - beta1_) * g[i];
      v[static_cast<std::size_t>(i)] = beta2_ * v[static_cast<std::size_t>(i)] + (1.0 - beta2_) * g[i] * g[i];
      const double mhat = m[static_cast<std::size_t>(i)] / bc1;
      const double vhat = v[static_cast<std::size_t>(i)] / bc2;
      p[i] = round_f32(p[i] - lr_ * mhat / (std::sqrt(vhat) + eps_));
    }
  }
}

AeTrainResult train_autoencoder(const std::vector<PointCloud>& dataset, const AeArchitecture& arch,
                                const TrainConfig& cfg, std::ostream* log) {
  cfg.validate();
  if (dataset.empty()) throw InvalidArgument("train_autoencoder: empty dataset");
  for (const auto& pc : dataset)
    if (pc.size() != arch.n_points)
      throw InvalidArgument("train_autoencoder: dataset cloud has " + std::to_string(pc.size()) +
                            " points, expected " + std::to_string(arch.n_points));

  Rng rng(cfg.seed);
  Rng enc_rng(rng.fork());
  Rng dec_rng(rng.fork());
  AeTrainResult result{
      nets::make_encoder(arch.level, arch.n_points, arch.latent_dim, arch.encoder_hidden, enc_rng),
      nets::make_decoder(arch.level, arch.n_points, arch.latent_dim, arch.decoder_hidden, dec_rng),
      {},
      {}};

  std::vector<nets::TensorRef> params = result.encoder.point_mlp.tensors();
  {
    auto dec_refs = result.decoder.mlp.tensors();
    params.insert(params.end(), dec_refs.begin(), dec_refs.end());
  }
  AdamOptimizer opt(params, cfg);

  // fixed mini-batch for the per-epoch exact-EMD audit
  const int audit_count = std::min<int>(4, static_cast<int>(dataset.size()));
  const double inv_n = 1.0 / static_cast<double>(arch.n_points);

  GradAccum enc_accum, dec_accum;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (epoch > 0) opt.set_learning_rate(opt.learning_rate() * cfg.lr_decay);
    const auto batches = make_batches(static_cast<int>(dataset.size()), cfg.batch_size, rng);
    double epoch_loss = 0.0;
    int epoch_shapes = 0;

    for (std::size_t b = 0; b < batches.size(); ++b) {
      enc_accum.reset();
      dec_accum.reset();
      double batch_loss = 0.0;

      for (int idx : batches[b]) {
        const PointCloud& target = dataset[static_cast<std::size_t>(idx)];
        nets::EncodeCache enc_cache;
        const LatentCode h = nets::encode(result.encoder, target, enc_cache);
        nets::Mlp::Cache dec_cache;
        const PointCloud decoded = nets::decode(result.decoder, h, dec_cache);
        if (!decoded.all_finite() || !h.values.allFinite())
          throw TrainingError("train_autoencoder: non-finite reconstruction at epoch " +
                              std::to_string(epoch) + " batch " + std::to_string(b) +
                              " param_norm=" + std::to_string(tensor_norm(params)));

        // match target points onto decoded points, then differentiate the
        // summed distances w.r.t. the decoded side (the matching is treated
        // as locally constant)
        const EmdResult match = emd_approx_match(target, decoded, cfg.emd_tol);
        batch_loss += match.cost * inv_n;

        Eigen::VectorXd dflat = Eigen::VectorXd::Zero(3 * arch.n_points);
        for (int i = 0; i < target.size(); ++i) {
          const int j = match.match[static_cast<std::size_t>(i)];
          const Vec3 diff = decoded[j] - target[i];
          const double dist = diff.norm();
          if (dist > 1e-12) dflat.segment<3>(3 * j) = diff / dist * inv_n;
        }

        const nets::Mlp::Grads dec_grads = nets::decode_backward(result.decoder, dec_cache, dflat);
        const Eigen::VectorXd dcode = dec_grads.input.col(0);
        const nets::Mlp::Grads enc_grads = nets::encode_backward(result.encoder, enc_cache, dcode);
        enc_accum.add(enc_grads);
        dec_accum.add(dec_grads);
      }

      const double mean_loss = batch_loss / static_cast<double>(batches[b].size());
      if (!std::isfinite(mean_loss))
        throw TrainingError("train_autoencoder: non-finite loss at epoch " + std::to_string(epoch) +
                            " batch " + std::to_string(b) +
                            " param_norm=" + std::to_string(tensor_norm(params)));
      epoch_loss += batch_loss;
      epoch_shapes += static_cast<int>(batches[b].size());

      auto enc_refs = enc_accum.refs();
      auto dec_refs = dec_accum.refs();
      enc_refs.insert(enc_refs.end(), dec_refs.begin(), dec_refs.end());
      opt.step(enc_refs);
    }

    result.loss_history.push_back(epoch_loss / static_cast<double>(epoch_shapes));

    double audit = 0.0;
    for (int i = 0; i < audit_count; ++i) {
      const PointCloud decoded =
          nets::decode(result.decoder, nets::encode(result.encoder, dataset[static_cast<std::size_t>(i)]));
      // exact solver above its 512-point bound falls back to a tight approximation
      const double d = arch.n_points <= 512
                           ? emd_exact(dataset[static_cast<std::size_t>(i)], decoded)
                           : emd_approx(dataset[static_cast<std::size_t>(i)], decoded, 0.01);
      audit += d * inv_n;
    }
    result.audit_history.push_back(audit / audit_count);

    if (log) {
      *log << "metric=ae_train_emd value=" << result.loss_history.back()
           << " level=" << arch.level << " epoch=" << epoch << "\n"
           << "metric=ae_audit_emd value=" << result.audit_history.back()
           << " level=" << arch.level << " epoch=" << epoch << "\n";
      log->flush();
    }
  }
  return result;
}

LatentDataset extract_latents(const nets::EncoderParams& enc, const std::vector<PointCloud>& dataset,
                              const std::vector<PointCloud>& rough_sources) {
  if (!rough_sources.empty() && rough_sources.size() != dataset.size())
    throw InvalidArgument("extract_latents: rough_sources has " +
                          std::to_string(rough_sources.size()) + " entries, dataset has " +
                          std::to_string(dataset.size()));
  LatentDataset out;
  out.level = enc.level;
  out.entries.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    LatentPair pair;
    pair.real = nets::encode(enc, dataset[i]);
    if (!rough_sources.empty()) pair.rough = nets::encode(enc, knn_upsample(rough_sources[i]));
    out.entries.push_back(std::move(pair));
  }
  return out;
}

std::vector<PointCloud> ae_roundtrip(const nets::EncoderParams& enc,
                                     const nets::DecoderParams& dec,
                                     const std::vector<PointCloud>& clouds) {
  std::vector<PointCloud> out;
  out.reserve(clouds.size());
  for (const auto& c : clouds) out.push_back(nets::decode(dec, nets::encode(enc, c)));
  return out;
}

GanTrainResult train_latent_gan(const LatentDataset& data, const GanArchitecture& arch,
                                const TrainConfig& cfg, bool conditional, std::ostream* log) {
  cfg.validate();
  if (data.entries.empty()) throw InvalidArgument("train_latent_gan: empty dataset");
  if (!conditional && data.level != 0)
    throw InvalidArgument("train_latent_gan: unconditional training is only valid at level 0");
  if (conditional && data.level == 0)
    throw InvalidArgument("train_latent_gan: level 0 trains unconditionally");
  if (conditional) {
    for (const auto& e : data.entries)
      if (!e.rough)
        throw InvalidArgument("train_latent_gan: conditional training needs rough codes on every entry");
  }
  for (const auto& e : data.entries)
    if (e.real.dim() != arch.latent_dim)
      throw InvalidArgument("train_latent_gan: latent code dim " + std::to_string(e.real.dim()) +
                            " != architecture dim " + std::to_string(arch.latent_dim));

  Rng rng(cfg.seed);
  Rng g_rng(rng.fork());
  Rng d_rng(rng.fork());
  GanTrainResult result{
      nets::make_generator(data.level, arch.latent_dim, arch.noise_dim, conditional, arch.hidden, g_rng),
      nets::make_discriminator(data.level, arch.latent_dim,
                               conditional && arch.condition_discriminator, arch.hidden, d_rng),
      {},
      {},
      {}};

  AdamOptimizer g_opt(result.generator.mlp.tensors(), cfg);
  AdamOptimizer d_opt(result.discriminator.mlp.tensors(), cfg);

  const bool cond_disc = result.discriminator.conditional;
  auto disc_cond = [&](const LatentPair& e) -> std::optional<LatentCode> {
    if (cond_disc) return e.rough;
    return std::nullopt;
  };
  auto fake_code = [&](const LatentPair& e, const NoiseVector& z, nets::Mlp::Cache& cache) {
    if (conditional) {
      LatentCode h = nets::generate(result.generator, e.rough, z, cache);
      h.values += e.rough->values;  // residual correction
      return h;
    }
    return nets::generate(result.generator, std::nullopt, z, cache);
  };

  GradAccum d_accum, g_accum;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (epoch > 0) {
      g_opt.set_learning_rate(g_opt.learning_rate() * cfg.lr_decay);
      d_opt.set_learning_rate(d_opt.learning_rate() * cfg.lr_decay);
    }
    const auto batches = make_batches(static_cast<int>(data.entries.size()), cfg.batch_size, rng);
    double d_loss_sum = 0.0, g_loss_sum = 0.0;
    int seen = 0, d_correct = 0;

    for (std::size_t b = 0; b < batches.size(); ++b) {
      // --- discriminator step ---
      d_accum.reset();
      double d_loss = 0.0;
      for (int idx : batches[b]) {
        const LatentPair& e = data.entries[static_cast<std::size_t>(idx)];

        nets::Mlp::Cache real_cache;
        const double real_logit =
            nets::discriminate(result.discriminator, e.real, disc_cond(e), real_cache);
        d_loss += softplus(-real_logit);
        d_accum.add(nets::discriminate_backward(result.discriminator, real_cache,
                                                sigmoid(real_logit) - 1.0));
        if (real_logit > 0.0) ++d_correct;

        nets::Mlp::Cache fake_fwd;
        const NoiseVector z = make_noise(arch.noise_dim, rng.fork());
        const LatentCode fake = fake_code(e, z, fake_fwd);
        nets::Mlp::Cache fake_cache;
        const double fake_logit =
            nets::discriminate(result.discriminator, fake, disc_cond(e), fake_cache);
        d_loss += softplus(fake_logit);
        d_accum.add(nets::discriminate_backward(result.discriminator, fake_cache, sigmoid(fake_logit)));
        if (fake_logit <= 0.0) ++d_correct;
        seen += 2;
      }
      d_opt.step(d_accum.refs());
      d_loss /= static_cast<double>(2 * batches[b].size());

      // --- generator step (fresh noise, non-saturating loss) ---
      g_accum.reset();
      double g_loss = 0.0;
      for (int idx : batches[b]) {
        const LatentPair& e = data.entries[static_cast<std::size_t>(idx)];
        nets::Mlp::Cache gen_cache;
        const NoiseVector z = make_noise(arch.noise_dim, rng.fork());
        const LatentCode fake = fake_code(e, z, gen_cache);
        nets::Mlp::Cache disc_cache;
        const double logit = nets::discriminate(result.discriminator, fake, disc_cond(e), disc_cache);
        g_loss += softplus(-logit);

        const nets::Mlp::Grads dd =
            nets::discriminate_backward(result.discriminator, disc_cache, sigmoid(logit) - 1.0);
        // d(loss)/d(fake code) is the top slice of the discriminator input
        // gradient; the residual path passes it through unchanged
        const Eigen::VectorXd dfake = dd.input.col(0).head(arch.latent_dim);
        g_accum.add(nets::generate_backward(result.generator, gen_cache, dfake));
      }
      g_opt.step(g_accum.refs());
      g_loss /= static_cast<double>(batches[b].size());

      if (!std::isfinite(d_loss) || !std::isfinite(g_loss) || d_loss > 1e3 || g_loss > 1e3)
        throw TrainingError("train_latent_gan: divergence at epoch " + std::to_string(epoch) +
                            " batch " + std::to_string(b) + " d_loss=" + std::to_string(d_loss) +
                            " g_loss=" + std::to_string(g_loss));

      d_loss_sum += d_loss * static_cast<double>(batches[b].size());
      g_loss_sum += g_loss * static_cast<double>(batches[b].size());
    }

    const double n = static_cast<double>(data.entries.size());
    result.d_loss_history.push_back(d_loss_sum / n);
    result.g_loss_history.push_back(g_loss_sum / n);
    result.d_accuracy_history.push_back(static_cast<double>(d_correct) / static_cast<double>(seen));

    if (log) {
      *log << "metric=gan_d_loss value=" << result.d_loss_history.back() << " level=" << data.level
           << " epoch=" << epoch << "\n"
           << "metric=gan_g_loss value=" << result.g_loss_history.back() << " level=" << data.level
           << " epoch=" << epoch << "\n"
           << "metric=gan_d_accuracy value=" << result.d_accuracy_history.back()
           << " level=" << data.level << " epoch=" << epoch << "\n";
      log->flush();
    }
  }
  return result;
}

}  // namespace lslp
