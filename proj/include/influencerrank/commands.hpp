#pragma once

#include <string>

#include "influencerrank/config.hpp"
#include "influencerrank/pipeline.hpp"

namespace infrank {

// Batch commands behind the C API and CLI. Each takes a resolved RunConfig
// and throws ContractError / DataError / NumericalError on failure.

// Writes the synthetic world to cfg.data_path().
void cmd_generate(const RunConfig& cfg);

// Trains on the data dir; writes the checkpoint and report_dir/history.csv.
TrainResult cmd_train(const RunConfig& cfg);

// score_source: model (checkpoint), oracle, random or followers. Writes
// report_dir/report.csv with overall and per-stratum rows.
EvalReport cmd_eval(const RunConfig& cfg, const std::string& score_source = "model");

// One run per seed (seed .. seed + seeds - 1) plus a median row, appended to
// report_dir/ablation.csv. Returns the median NDCG report.
EvalReport cmd_ablate(const RunConfig& cfg, const std::string& variant);

// axis: window-length (factors 0.5, 1, 2) or history-length (1 .. history).
// Writes report_dir/sweep-<axis>.csv. Returns the median row of each setting.
std::vector<EvalReport> cmd_sweep(const RunConfig& cfg, const std::string& axis);

// Throws NumericalError naming the worst parameter when the check fails.
GradCheckSummary cmd_gradcheck(const RunConfig& cfg, bool corrupt = false);

inline constexpr double kGradCheckThreshold = 1e-4;
std::string gradcheck_failure(const GradCheckSummary& s);

// Component-wise median of several reports over the same K list.
RankingReport median_report(const std::vector<RankingReport>& reports);

}  // namespace infrank
