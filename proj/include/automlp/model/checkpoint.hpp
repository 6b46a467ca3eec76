#pragma once

#include <filesystem>
#include <iosfwd>

#include "automlp/model/config.hpp"
#include "automlp/model/params.hpp"
#include "json.hpp"

namespace automlp::model {

// File layout: the 8-byte magic "AMLPCKPT", a little-endian u32 format
// version, a little-endian u64 byte length, a JSON header of that length, and
// then every tensor of the header's "tensors" list as little-endian float64
// values in row-major order.
struct Checkpoint {
  ModelConfig config;
  ModelParams params;
  ArchWeights arch;
  nlohmann::json metadata = nlohmann::json::object();
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
// Validates the magic, version and every tensor shape against the config in
// the header; throws DataError on mismatch or truncation.
Checkpoint read_checkpoint(std::istream& in);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace automlp::model
