#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>

#include "influencerrank/model.hpp"

namespace infrank {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// On-disk layout:
///   8 bytes   magic "INFRANK\0"
///   u32 LE    format version
///   u64 LE    header length in bytes
///   header    UTF-8 JSON: model config, feature layout, feature scale,
///             tensor names and shapes, caller metadata
///   payload   every tensor's doubles, row-major, IEEE-754 little endian
struct Checkpoint {
  ModelParams params;
  nlohmann::json metadata = nlohmann::json::object();
};

std::string encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::string& bytes);

void save_checkpoint(const std::filesystem::path& file, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& file);

}  // namespace infrank
