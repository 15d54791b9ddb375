#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "influencerrank/model.hpp"
#include "influencerrank/synthgen.hpp"
#include "influencerrank/trainer.hpp"

namespace infrank {

/// Everything one batch command needs. Serialized into every report.
struct RunConfig {
  std::uint64_t seed = 0;
  std::string out_dir = "run";
  // Empty paths resolve under out_dir.
  std::string data_dir;
  std::string checkpoint;
  std::string report_dir;
  std::vector<std::size_t> eval_k{1, 10, 50, 100, 200};
  double rbp_p = 0.95;
  double min_freq = 0.01;
  // Seeds per setting for ablate / sweep (seed, seed+1, ...).
  std::size_t seeds = 5;
  // Write a checkpoint every n epochs during train (0 = final only).
  std::size_t checkpoint_every = 0;
  WorldConfig world;
  ModelConfig model;
  TrainConfig train;

  std::filesystem::path data_path() const;
  std::filesystem::path checkpoint_path() const;
  std::filesystem::path report_path() const;

  // Propagates `seed` into the component configs and checks invariants.
  void resolve();
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

nlohmann::json to_json(const WorldConfig& c);
nlohmann::json to_json(const ModelConfig& c);
nlohmann::json to_json(const TrainConfig& c);
nlohmann::json to_json(const RunConfig& c);

// Strict parsers: unknown keys and wrong types raise ContractError. Missing
// keys keep their defaults.
WorldConfig world_config_from_json(const nlohmann::json& j);
ModelConfig model_config_from_json(const nlohmann::json& j);
TrainConfig train_config_from_json(const nlohmann::json& j);
RunConfig run_config_from_json(const nlohmann::json& j);

// Defaults, then each patch applied in order as a JSON merge patch, then
// resolve().
RunConfig resolve_run_config(const std::vector<nlohmann::json>& patches);

}  // namespace infrank
