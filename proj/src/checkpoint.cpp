#include "lslp/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lslp {

namespace {

constexpr char kMagic[8] = {'L', 'S', 'L', 'P', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

using nlohmann::json;

json descriptor_of(const AnyParams& params) {
  json d;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        d["level"] = p.level;
        d["latent_dim"] = p.latent_dim;
        if constexpr (std::is_same_v<T, nets::EncoderParams>) {
          d["widths"] = p.point_mlp.widths();
          d["n_points"] = p.n_points;
        } else if constexpr (std::is_same_v<T, nets::DecoderParams>) {
          d["widths"] = p.mlp.widths();
          d["n_points"] = p.n_points;
        } else if constexpr (std::is_same_v<T, nets::GeneratorParams>) {
          d["widths"] = p.mlp.widths();
          d["noise_dim"] = p.noise_dim;
          d["conditional"] = p.conditional;
        } else {
          d["widths"] = p.mlp.widths();
          d["conditional"] = p.conditional;
        }
      },
      params);
  return d;
}

nets::Mlp& mlp_of(AnyParams& params) {
  return std::visit(
      [](auto& p) -> nets::Mlp& {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, nets::EncoderParams>)
          return p.point_mlp;
        else
          return p.mlp;
      },
      params);
}

std::string pack_payload(AnyParams& params, json& tensor_table) {
  std::string payload;
  tensor_table = json::array();
  for (const auto& t : mlp_of(params).tensors()) {
    json entry;
    entry["name"] = t.name;
    entry["shape"] = t.shape;
    entry["dtype"] = "f32";
    tensor_table.push_back(entry);
    for (long i = 0; i < t.size; ++i) {
      const float f = static_cast<float>(t.data[i]);
      char raw[4];
      std::memcpy(raw, &f, 4);
      payload.append(raw, 4);
    }
  }
  return payload;
}

AnyParams empty_params_for(const std::string& kind, const json& d) {
  const std::vector<int> widths = d.at("widths").get<std::vector<int>>();
  if (widths.size() < 2) throw FormatError("checkpoint: descriptor widths too short");
  nets::Mlp mlp;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    nets::Linear lin;
    lin.W = Eigen::MatrixXd::Zero(widths[l + 1], widths[l]);
    lin.b = Eigen::VectorXd::Zero(widths[l + 1]);
    mlp.layers.push_back(std::move(lin));
  }
  const int level = d.at("level").get<int>();
  const int latent_dim = d.at("latent_dim").get<int>();
  if (kind == "encoder")
    return nets::EncoderParams{level, d.at("n_points").get<int>(), latent_dim, std::move(mlp)};
  if (kind == "decoder")
    return nets::DecoderParams{level, d.at("n_points").get<int>(), latent_dim, std::move(mlp)};
  if (kind == "generator")
    return nets::GeneratorParams{level, latent_dim, d.at("noise_dim").get<int>(),
                                 d.at("conditional").get<bool>(), std::move(mlp)};
  if (kind == "discriminator")
    return nets::DiscriminatorParams{level, latent_dim, d.at("conditional").get<bool>(),
                                     std::move(mlp)};
  throw FormatError("checkpoint: unknown kind '" + kind + "'");
}

}  // namespace

const char* params_kind(const AnyParams& params) {
  switch (params.index()) {
    case 0: return "encoder";
    case 1: return "decoder";
    case 2: return "generator";
    default: return "discriminator";
  }
}

int params_level(const AnyParams& params) {
  return std::visit([](const auto& p) { return p.level; }, params);
}

std::uint64_t params_hash(const AnyParams& params) {
  AnyParams copy = params;
  json table;
  const std::string payload = pack_payload(copy, table);
  return fnv1a(payload.data(), payload.size());
}

void save_checkpoint(const AnyParams& params, const CheckpointMeta& meta,
                     const std::filesystem::path& path) {
  AnyParams copy = params;
  json tensor_table;
  const std::string payload = pack_payload(copy, tensor_table);

  json header;
  header["kind"] = params_kind(params);
  header["descriptor"] = descriptor_of(params);
  header["metadata"] = {{"epoch", meta.epoch}, {"seed", meta.seed}, {"config", meta.config}};
  header["tensors"] = tensor_table;
  header["payload_bytes"] = payload.size();
  header["payload_fnv1a"] = to_hex(fnv1a(payload.data(), payload.size()));
  const std::string header_str = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("checkpoint: cannot open for write: " + path.string());
  out.write(kMagic, 8);
  char buf[8];
  std::memcpy(buf, &kVersion, 4);
  out.write(buf, 4);
  const std::uint64_t hlen = header_str.size();
  std::memcpy(buf, &hlen, 8);
  out.write(buf, 8);
  out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw IoError("checkpoint: write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("checkpoint: cannot open: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string data = ss.str();

  if (data.size() < 20 || std::memcmp(data.data(), kMagic, 8) != 0)
    throw FormatError("checkpoint: bad magic in " + path.string());
  std::uint32_t version = 0;
  std::memcpy(&version, data.data() + 8, 4);
  if (version != kVersion)
    throw FormatError("checkpoint: format version " + std::to_string(version) + " unsupported (want " +
                      std::to_string(kVersion) + ")");
  std::uint64_t hlen = 0;
  std::memcpy(&hlen, data.data() + 12, 8);
  if (data.size() < 20 + hlen) throw FormatError("checkpoint: truncated header in " + path.string());

  json header;
  try {
    header = json::parse(data.substr(20, hlen));
  } catch (const json::exception& e) {
    throw FormatError("checkpoint: unparseable header: " + std::string(e.what()));
  }

  const std::string payload = data.substr(20 + hlen);
  const std::uint64_t want_bytes = header.at("payload_bytes").get<std::uint64_t>();
  if (payload.size() != want_bytes)
    throw FormatError("checkpoint: corrupt payload, expected " + std::to_string(want_bytes) +
                      " bytes, found " + std::to_string(payload.size()));
  if (to_hex(fnv1a(payload.data(), payload.size())) != header.at("payload_fnv1a").get<std::string>())
    throw FormatError("checkpoint: corrupt payload, checksum mismatch in " + path.string());

  Checkpoint ck{empty_params_for(header.at("kind").get<std::string>(), header.at("descriptor")), {}};
  const json& md = header.at("metadata");
  ck.meta.epoch = md.at("epoch").get<int>();
  ck.meta.seed = md.at("seed").get<std::uint64_t>();
  ck.meta.config = md.at("config").get<std::string>();

  const char* cur = payload.data();
  const char* end = payload.data() + payload.size();
  for (const auto& t : mlp_of(ck.params).tensors()) {
    if (static_cast<std::uint64_t>(end - cur) < static_cast<std::uint64_t>(t.size) * 4)
      throw FormatError("checkpoint: tensor data overruns payload");
    for (long i = 0; i < t.size; ++i) {
      float f;
      std::memcpy(&f, cur, 4);
      cur += 4;
      t.data[i] = static_cast<double>(f);
    }
  }
  if (cur != end) throw FormatError("checkpoint: trailing bytes in payload");
  return ck;
}

namespace {

template <typename T>
T load_typed(const std::filesystem::path& path, const char* want) {
  Checkpoint ck = load_checkpoint(path);
  if (auto* p = std::get_if<T>(&ck.params)) return std::move(*p);
  throw FormatError("checkpoint: " + path.string() + " holds a " + params_kind(ck.params) +
                    ", expected " + want);
}

}  // namespace

nets::EncoderParams load_encoder_checkpoint(const std::filesystem::path& path) {
  return load_typed<nets::EncoderParams>(path, "encoder");
}
nets::DecoderParams load_decoder_checkpoint(const std::filesystem::path& path) {
  return load_typed<nets::DecoderParams>(path, "decoder");
}
nets::GeneratorParams load_generator_checkpoint(const std::filesystem::path& path) {
  return load_typed<nets::GeneratorParams>(path, "generator");
}
nets::DiscriminatorParams load_discriminator_checkpoint(const std::filesystem::path& path) {
  return load_typed<nets::DiscriminatorParams>(path, "discriminator");
}

}  // namespace lslp
