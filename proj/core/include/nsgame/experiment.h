// Copyright 2026 The nsgame Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Monte Carlo harness.
//
// An experiment runs T independent trials of one game. Seeds form a tree:
// master -> trial -> {root, shared, player k}, so a trial's outcome depends
// only on (config, master seed, trial index). Trials can therefore run on any
// number of threads; results land in per-trial slots and are aggregated in
// trial order, which makes reports identical at every parallelism degree.
//
// Reports cover per-player win rates with Wilson intervals, the Azuma
// deviation audit Pr[S_n >= eps] <= 2 exp(-eps^2 / 2n), and a martingale
// audit of the success walk S_n. Signaling trials are tallied separately and
// never enter the win rates.

#ifndef NSGAME_EXPERIMENT_H_
#define NSGAME_EXPERIMENT_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nsgame/bitstream.h"
#include "nsgame/game.h"
#include "nsgame/oracle.h"
#include "nsgame/stats.h"

namespace nsgame {

inline constexpr int kReportSchemaVersion = 1;

struct AzumaGrid {
  std::vector<std::uint64_t> n{16, 32, 64};
  std::vector<double> epsilon{4, 8, 16};
};

struct ExperimentConfig {
  GameVariant game = GameVariant::kBaker;
  nlohmann::json strategy = {{"name", "fns"}};
  std::uint64_t players = 64;
  std::uint64_t trials = 1000;
  std::uint64_t master_seed = 0;
  OracleMode oracle_mode = OracleMode::kCanonical;
  // Generator roots get bits 1..d flipped away from their base.
  std::uint64_t root_override_depth = 0;
  // Deterministic fixture: every trial uses this root.
  std::optional<BitStream> fixed_root;
  // Grid points with n > players are skipped.
  AzumaGrid azuma;
  double confidence_z = 3.0;
  // Execution only; never changes results and is not echoed into reports.
  unsigned parallelism = 1;
  bool enforce_no_signaling = true;
  // Memoized mode: table to start from, for replays.
  std::optional<nlohmann::json> memo_table;
};

// Throws ConfigError naming the offending field.
void ValidateConfig(const ExperimentConfig& cfg);

// Resolved config as echoed into reports.
nlohmann::json ConfigToJson(const ExperimentConfig& cfg);
// Applies the keys present in j on top of base. Throws ConfigError.
ExperimentConfig ConfigFromJson(const nlohmann::json& j, ExperimentConfig base = {});

std::uint64_t TrialSeed(std::uint64_t master_seed, std::uint64_t trial);
BitStream SampleRoot(const ExperimentConfig& cfg, std::uint64_t trial_seed);

double AzumaBound(std::uint64_t n, double epsilon);

struct PlayerRate {
  std::uint64_t player = 0;
  std::uint64_t wins = 0;
  std::uint64_t trials = 0;
  double rate = 0.0;
  Interval interval;
};

struct WinRateReport {
  std::uint64_t valid_trials = 0;
  std::vector<PlayerRate> per_player;
  // Mean of the per-player rates.
  double pooled = 0.0;
  // Wilson interval over all valid guesses.
  Interval pooled_interval;
  // Are the per-player rates consistent with one common rate?
  ChiSquareResult homogeneity;
  std::map<std::uint64_t, std::uint64_t> threshold_histogram;
  std::uint64_t threshold_none = 0;
};

struct AzumaPoint {
  std::uint64_t n = 0;
  double epsilon = 0.0;
  std::uint64_t exceed = 0;
  std::uint64_t trials = 0;
  double frequency = 0.0;
  double bound = 0.0;
  // Wilson upper limit minus the observed frequency.
  double margin = 0.0;
  bool violation = false;
};

struct AzumaReport {
  std::vector<AzumaPoint> points;
  std::uint64_t violations = 0;
};

// E[s_{n+1} | S_n in [lo, hi]] estimated over every trajectory and every n.
struct MartingaleBin {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::uint64_t count = 0;
  double mean = 0.0;
  double margin = 0.0;  // z / sqrt(count)
  bool tested = false;  // count >= min_bin_count
  bool pass = true;
};

struct MartingaleReport {
  std::uint64_t trajectories = 0;
  std::uint64_t bad_increments = 0;
  std::vector<MartingaleBin> bins;
  bool increments_ok = true;
  bool bins_ok = true;
  bool consistent = true;
  std::string verdict;
};

struct QuarantineTally {
  std::uint64_t invalid_trials = 0;
  std::uint64_t raw_wins = 0;
  std::uint64_t raw_guesses = 0;
  // Success rate the quarantined trials would have scored; null if none.
  std::optional<double> raw_success_rate;
};

struct ExperimentResult {
  nlohmann::json config;
  WinRateReport win_rate;
  AzumaReport azuma;
  // Absent when the log holds quarantined trials.
  std::optional<MartingaleReport> martingale;
  QuarantineTally quarantine;
  std::vector<TrialRecord> log;
  // Final memo table for memoized runs, empty array otherwise.
  nlohmann::json memo_table = nlohmann::json::array();
};

ExperimentResult RunExperiment(const ExperimentConfig& cfg);

// Valid trials only.
WinRateReport SummarizeWinRates(std::span<const TrialRecord> log, std::uint64_t players, double z);
AzumaReport AzumaAudit(std::span<const TrialRecord> log, const AzumaGrid& grid, double z);
// Throws Error if the log contains a quarantined trial.
MartingaleReport MartingaleAudit(std::span<const TrialRecord> log, double z, std::uint64_t min_bin_count = 100);

enum class RootSampler : std::uint8_t {
  kUniform,
  // x = u^2 for uniform u: deliberately non-uniform, for negative controls.
  kSquaredUniform,
};

const char* RootSamplerName(RootSampler s);
RootSampler ParseRootSampler(std::string_view name);

struct InvarianceConfig {
  std::uint64_t samples = 1'000'000;
  std::uint64_t bins = 256;  // power of two
  std::uint64_t shifts = 1;  // doubling-map applications before binning
  std::uint64_t seed = 0;
  RootSampler sampler = RootSampler::kUniform;
};

struct InvarianceReport {
  InvarianceConfig config;
  std::vector<std::uint64_t> counts;
  ChiSquareResult chi_square;
};

// Samples roots, applies the doubling map `shifts` times, bins the leading
// log2(bins) bits of the image and tests the histogram against uniform.
// Throws ConfigError unless bins is a power of two >= 2 and
// samples >= 100 * bins.
InvarianceReport InvarianceTest(const InvarianceConfig& cfg);

nlohmann::json ReportToJson(const ExperimentResult& r);
nlohmann::json InvarianceReportToJson(const InvarianceReport& r);
std::string PlayersCsv(const WinRateReport& r);
std::string AzumaCsv(const AzumaReport& r);

void to_json(nlohmann::json& j, const WinRateReport& r);
void to_json(nlohmann::json& j, const AzumaReport& r);
void to_json(nlohmann::json& j, const MartingaleReport& r);
void to_json(nlohmann::json& j, const QuarantineTally& q);

}  // namespace nsgame

#endif  // NSGAME_EXPERIMENT_H_
