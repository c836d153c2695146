#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>

#include "lslp/nets.hpp"

namespace lslp {

/// Training provenance carried inside every checkpoint.
struct CheckpointMeta {
  int epoch = 0;
  std::uint64_t seed = 0;
  std::string config;  // free-form snapshot of the config that produced the params
};

using AnyParams = std::variant<nets::EncoderParams, nets::DecoderParams, nets::GeneratorParams,
                               nets::DiscriminatorParams>;

// Archive layout: magic "LSLPCKPT", uint32 format version, uint64 JSON header
// length, JSON header (kind, architecture descriptor, metadata, tensor table,
// payload checksum), then all tensors packed as little-endian float32 in
// table order. Parameters are float32-representable by construction, so
// load(save(x)) reproduces every tensor bitwise.
void save_checkpoint(const AnyParams& params, const CheckpointMeta& meta,
                     const std::filesystem::path& path);

struct Checkpoint {
  AnyParams params;
  CheckpointMeta meta;
};

/// Throws FormatError on bad magic, version mismatch, or corrupt/truncated
/// payload (checksum verified).
Checkpoint load_checkpoint(const std::filesystem::path& path);

const char* params_kind(const AnyParams& params);
int params_level(const AnyParams& params);

nets::EncoderParams load_encoder_checkpoint(const std::filesystem::path& path);
nets::DecoderParams load_decoder_checkpoint(const std::filesystem::path& path);
nets::GeneratorParams load_generator_checkpoint(const std::filesystem::path& path);
nets::DiscriminatorParams load_discriminator_checkpoint(const std::filesystem::path& path);

/// FNV-1a over the packed float32 payload; stable identity for "did these
/// params change" checks.
std::uint64_t params_hash(const AnyParams& params);

}  // namespace lslp
