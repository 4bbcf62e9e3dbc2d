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

#include "nsgame/experiment.h"

#include <algorithm>
#include <bit>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

#include "nsgame/errors.h"
#include "nsgame/rng.h"
#include "nsgame/strategy.h"

namespace nsgame {
namespace {

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
T ReadNumber(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) throw ConfigError(std::string("config.") + key + " must be a number");
  } else if constexpr (std::is_unsigned_v<T>) {
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      throw ConfigError(std::string("config.") + key + " must be a nonnegative integer");
    }
  } else {
    if (!v.is_number_integer()) throw ConfigError(std::string("config.") + key + " must be an integer");
  }
  return v.get<T>();
}

std::string ReadString(const nlohmann::json& j, const char* key) {
  if (!j.at(key).is_string()) throw ConfigError(std::string("config.") + key + " must be a string");
  return j.at(key).get<std::string>();
}

// High 64 bits of the 128-bit product.
std::uint64_t MulHigh(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t a_lo = a & 0xFFFFFFFFu, a_hi = a >> 32;
  const std::uint64_t b_lo = b & 0xFFFFFFFFu, b_hi = b >> 32;
  const std::uint64_t lo_lo = a_lo * b_lo;
  const std::uint64_t hi_lo = a_hi * b_lo;
  const std::uint64_t lo_hi = a_lo * b_hi;
  const std::uint64_t cross = (lo_lo >> 32) + (hi_lo & 0xFFFFFFFFu) + lo_hi;
  return a_hi * b_hi + (hi_lo >> 32) + (cross >> 32);
}

}  // namespace

void ValidateConfig(const ExperimentConfig& cfg) {
  if (cfg.players < 1) throw ConfigError("players must be >= 1");
  if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
  if (!(cfg.confidence_z > 0.0)) throw ConfigError("confidence_z must be positive");
  for (double eps : cfg.azuma.epsilon) {
    if (!(eps > 0.0)) throw ConfigError("azuma.epsilon values must be > 0");
  }
  for (auto n : cfg.azuma.n) {
    if (n < 1) throw ConfigError("azuma.n values must be >= 1");
  }
  if (cfg.parallelism < 1) throw ConfigError("parallelism must be >= 1");
  if (cfg.oracle_mode == OracleMode::kMemoized && cfg.parallelism > 1) {
    throw ConfigError("oracle_mode memoized requires parallelism 1 (memo writes are order dependent)");
  }
  if (cfg.memo_table && cfg.oracle_mode != OracleMode::kMemoized) {
    throw ConfigError("memo_table is only meaningful with oracle_mode memoized");
  }
  if (cfg.fixed_root && cfg.root_override_depth != 0) {
    throw ConfigError("root_override_depth applies to sampled roots, not to a fixed root");
  }
  // Surfaces strategy errors before any trial runs.
  MakeStrategy(cfg.strategy);
}

nlohmann::json ConfigToJson(const ExperimentConfig& cfg) {
  return {
      {"game", GameVariantName(cfg.game)},
      {"strategy", MakeStrategy(cfg.strategy)->Params()},
      {"players", cfg.players},
      {"trials", cfg.trials},
      {"seed", cfg.master_seed},
      {"oracle_mode", OracleModeName(cfg.oracle_mode)},
      {"root_override_depth", cfg.root_override_depth},
      {"root", cfg.fixed_root ? nlohmann::json(*cfg.fixed_root) : nlohmann::json(nullptr)},
      {"azuma", {{"n", cfg.azuma.n}, {"epsilon", cfg.azuma.epsilon}}},
      {"confidence_z", cfg.confidence_z},
      {"enforce_no_signaling", cfg.enforce_no_signaling},
  };
}

ExperimentConfig ConfigFromJson(const nlohmann::json& j, ExperimentConfig base) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const char* const kKnown[] = {"game",       "strategy", "players", "trials",       "seed",
                                       "oracle_mode", "root_override_depth", "root", "azuma",
                                       "confidence_z", "enforce_no_signaling", "parallelism", "memo_table"};
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(std::begin(kKnown), std::end(kKnown), [&](const char* k) { return key == k; }) ==
        std::end(kKnown)) {
      throw ConfigError("unknown config key \"" + key + "\"");
    }
  }
  if (j.contains("game")) base.game = ParseGameVariant(ReadString(j, "game"));
  if (j.contains("strategy")) {
    base.strategy = j.at("strategy").is_string() ? ParseStrategySpec(j.at("strategy").get<std::string>())
                                                 : j.at("strategy");
  }
  if (j.contains("players")) base.players = ReadNumber<std::uint64_t>(j, "players");
  if (j.contains("trials")) base.trials = ReadNumber<std::uint64_t>(j, "trials");
  if (j.contains("seed")) base.master_seed = ReadNumber<std::uint64_t>(j, "seed");
  if (j.contains("oracle_mode")) base.oracle_mode = ParseOracleMode(ReadString(j, "oracle_mode"));
  if (j.contains("root_override_depth")) base.root_override_depth = ReadNumber<std::uint64_t>(j, "root_override_depth");
  if (j.contains("root")) {
    if (j.at("root").is_null()) {
      base.fixed_root.reset();
    } else {
      try {
        base.fixed_root = BitStreamFromJson(j.at("root"));
      } catch (const std::exception& e) {
        throw ConfigError(std::string("config.root: ") + e.what());
      }
    }
  }
  if (j.contains("azuma")) {
    const auto& a = j.at("azuma");
    if (!a.is_object()) throw ConfigError("config.azuma must be an object");
    try {
      if (a.contains("n")) base.azuma.n = a.at("n").get<std::vector<std::uint64_t>>();
      if (a.contains("epsilon")) base.azuma.epsilon = a.at("epsilon").get<std::vector<double>>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("config.azuma.n / config.azuma.epsilon must be numeric arrays");
    }
  }
  if (j.contains("confidence_z")) base.confidence_z = ReadNumber<double>(j, "confidence_z");
  if (j.contains("enforce_no_signaling")) {
    if (!j.at("enforce_no_signaling").is_boolean()) throw ConfigError("config.enforce_no_signaling must be a boolean");
    base.enforce_no_signaling = j.at("enforce_no_signaling").get<bool>();
  }
  if (j.contains("parallelism")) base.parallelism = ReadNumber<unsigned>(j, "parallelism");
  if (j.contains("memo_table")) base.memo_table = j.at("memo_table");
  return base;
}

std::uint64_t TrialSeed(std::uint64_t master_seed, std::uint64_t trial) {
  return DeriveSeed(master_seed, SeedTag::kTrial, trial);
}

BitStream SampleRoot(const ExperimentConfig& cfg, std::uint64_t trial_seed) {
  if (cfg.fixed_root) return *cfg.fixed_root;
  const BitStream base = BitStream::Generator(DeriveSeed(trial_seed, SeedTag::kRoot, 0));
  if (cfg.root_override_depth == 0) return base;
  std::vector<Override> flips;
  flips.reserve(cfg.root_override_depth);
  for (std::uint64_t i = 1; i <= cfg.root_override_depth; ++i) {
    flips.push_back({i, static_cast<Bit>(1 - base.At(i))});
  }
  return base.WithOverrides(flips);
}

double AzumaBound(std::uint64_t n, double epsilon) {
  return 2.0 * std::exp(-(epsilon * epsilon) / (2.0 * static_cast<double>(n)));
}

ExperimentResult RunExperiment(const ExperimentConfig& cfg) {
  ValidateConfig(cfg);
  const std::unique_ptr<Strategy> strategy = MakeStrategy(cfg.strategy);
  ChoiceOracle oracle(cfg.oracle_mode);
  if (cfg.memo_table) oracle.LoadMemoTable(*cfg.memo_table);
  const TrialOptions options{cfg.enforce_no_signaling};

  ExperimentResult result;
  result.config = ConfigToJson(cfg);
  result.log.resize(cfg.trials);

  auto run_range = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t t = begin; t < end; ++t) {
      const std::uint64_t seed = TrialSeed(cfg.master_seed, t);
      const GameSpec spec{cfg.game, cfg.players, SampleRoot(cfg, seed), strategy.get(), &oracle};
      result.log[t] = RunTrial(spec, seed, options);
    }
  };

  const std::uint64_t workers = std::min<std::uint64_t>(cfg.parallelism, cfg.trials);
  if (workers <= 1) {
    run_range(0, cfg.trials);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    {
      std::vector<std::jthread> threads;
      threads.reserve(workers);
      for (std::uint64_t w = 0; w < workers; ++w) {
        const std::uint64_t begin = cfg.trials * w / workers;
        const std::uint64_t end = cfg.trials * (w + 1) / workers;
        threads.emplace_back([&, w, begin, end] {
          try {
            run_range(begin, end);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  std::vector<TrialRecord> valid;
  valid.reserve(result.log.size());
  for (const TrialRecord& r : result.log) {
    if (r.valid) {
      valid.push_back(r);
      continue;
    }
    ++result.quarantine.invalid_trials;
    result.quarantine.raw_wins += r.wins();
    result.quarantine.raw_guesses += r.success.size();
  }
  if (result.quarantine.raw_guesses > 0) {
    result.quarantine.raw_success_rate =
        static_cast<double>(result.quarantine.raw_wins) / static_cast<double>(result.quarantine.raw_guesses);
  }

  result.win_rate = SummarizeWinRates(valid, cfg.players, cfg.confidence_z);
  AzumaGrid grid = cfg.azuma;
  std::erase_if(grid.n, [&](std::uint64_t n) { return n > cfg.players; });
  result.azuma = AzumaAudit(valid, grid, cfg.confidence_z);
  if (result.quarantine.invalid_trials == 0) result.martingale = MartingaleAudit(result.log, cfg.confidence_z);
  if (cfg.oracle_mode == OracleMode::kMemoized) result.memo_table = oracle.MemoTableJson();
  return result;
}

WinRateReport SummarizeWinRates(std::span<const TrialRecord> log, std::uint64_t players, double z) {
  WinRateReport report;
  std::vector<std::uint64_t> wins(players, 0);
  for (const TrialRecord& r : log) {
    if (!r.valid) continue;
    if (r.success.size() != players) throw Error("trial record has the wrong number of players");
    ++report.valid_trials;
    for (std::uint64_t k = 0; k < players; ++k) wins[k] += r.success[k] > 0 ? 1 : 0;
    if (r.threshold) {
      ++report.threshold_histogram[*r.threshold];
    } else {
      ++report.threshold_none;
    }
  }
  std::uint64_t total_wins = 0;
  double rate_sum = 0.0;
  for (std::uint64_t k = 0; k < players; ++k) {
    PlayerRate pr;
    pr.player = k + 1;
    pr.wins = wins[k];
    pr.trials = report.valid_trials;
    pr.rate = report.valid_trials ? static_cast<double>(wins[k]) / static_cast<double>(report.valid_trials) : 0.0;
    pr.interval = WilsonInterval(wins[k], report.valid_trials, z);
    rate_sum += pr.rate;
    total_wins += wins[k];
    report.per_player.push_back(pr);
  }
  report.pooled = players ? rate_sum / static_cast<double>(players) : 0.0;
  report.pooled_interval = WilsonInterval(total_wins, report.valid_trials * players, z);
  if (players >= 2 && report.valid_trials > 0) report.homogeneity = ChiSquareHomogeneity(wins, report.valid_trials);
  return report;
}

AzumaReport AzumaAudit(std::span<const TrialRecord> log, const AzumaGrid& grid, double z) {
  AzumaReport report;
  for (std::uint64_t n : grid.n) {
    for (double eps : grid.epsilon) {
      AzumaPoint p;
      p.n = n;
      p.epsilon = eps;
      for (const TrialRecord& r : log) {
        if (!r.valid) continue;
        if (n > r.walk.size()) throw ConfigError("Azuma grid n exceeds the number of players");
        ++p.trials;
        if (static_cast<double>(r.walk[n - 1]) >= eps) ++p.exceed;
      }
      p.frequency = p.trials ? static_cast<double>(p.exceed) / static_cast<double>(p.trials) : 0.0;
      p.bound = AzumaBound(n, eps);
      p.margin = WilsonInterval(p.exceed, p.trials, z).hi - p.frequency;
      p.violation = p.frequency > p.bound + p.margin;
      report.violations += p.violation ? 1 : 0;
      report.points.push_back(p);
    }
  }
  return report;
}

MartingaleReport MartingaleAudit(std::span<const TrialRecord> log, double z, std::uint64_t min_bin_count) {
  constexpr std::int64_t kLow = std::numeric_limits<std::int64_t>::min();
  constexpr std::int64_t kHigh = std::numeric_limits<std::int64_t>::max();
  MartingaleReport report;
  report.bins = {{kLow, -12}, {-11, -6}, {-5, -2}, {-1, 1}, {2, 5}, {6, 11}, {12, kHigh}};
  std::vector<std::int64_t> sums(report.bins.size(), 0);
  auto bin_of = [&](std::int64_t v) {
    for (std::size_t b = 0; b < report.bins.size(); ++b) {
      if (v >= report.bins[b].lo && v <= report.bins[b].hi) return b;
    }
    return report.bins.size() - 1;
  };

  for (const TrialRecord& r : log) {
    if (!r.valid) throw Error("martingale audit refuses logs with signaling-invalid trials");
    ++report.trajectories;
    std::int64_t prev = 0;
    for (std::size_t i = 0; i < r.walk.size(); ++i) {
      const std::int64_t step = r.walk[i] - prev;
      if ((step != 1 && step != -1) || i >= r.success.size() || step != r.success[i]) ++report.bad_increments;
      prev = r.walk[i];
    }
    for (std::size_t n = 1; n < r.walk.size() && n < r.success.size(); ++n) {
      const std::size_t b = bin_of(r.walk[n - 1]);
      ++report.bins[b].count;
      sums[b] += r.success[n];
    }
  }

  report.increments_ok = report.bad_increments == 0;
  for (std::size_t b = 0; b < report.bins.size(); ++b) {
    MartingaleBin& bin = report.bins[b];
    if (bin.count == 0) continue;
    bin.mean = static_cast<double>(sums[b]) / static_cast<double>(bin.count);
    bin.margin = z / std::sqrt(static_cast<double>(bin.count));
    bin.tested = bin.count >= min_bin_count;
    bin.pass = !bin.tested || std::abs(bin.mean) <= bin.margin;
    report.bins_ok = report.bins_ok && bin.pass;
  }
  report.consistent = report.increments_ok && report.bins_ok;
  if (report.consistent) {
    report.verdict = "consistent with a martingale: every increment is +/-1 and E[s_{n+1} | S_n] is zero within the "
                     "margin in every tested bin";
  } else {
    std::ostringstream os;
    os << "martingale property FAILS:";
    if (!report.increments_ok) os << " " << report.bad_increments << " increments differ from +/-1;";
    for (const MartingaleBin& bin : report.bins) {
      if (!bin.pass) {
        os << " E[s_{n+1} | S_n in [" << (bin.lo == kLow ? std::string("-inf") : std::to_string(bin.lo)) << ","
           << (bin.hi == kHigh ? std::string("inf") : std::to_string(bin.hi)) << "]] = " << bin.mean
           << " exceeds margin " << bin.margin << ";";
      }
    }
    report.verdict = os.str();
    report.verdict.pop_back();
  }
  return report;
}

const char* RootSamplerName(RootSampler s) { return s == RootSampler::kUniform ? "uniform" : "squared"; }

RootSampler ParseRootSampler(std::string_view name) {
  if (name == "uniform") return RootSampler::kUniform;
  if (name == "squared") return RootSampler::kSquaredUniform;
  throw ConfigError("unknown sampler \"" + std::string(name) + "\" (expected uniform|squared)");
}

InvarianceReport InvarianceTest(const InvarianceConfig& cfg) {
  if (cfg.bins < 2 || !std::has_single_bit(cfg.bins)) throw ConfigError("bins must be a power of two >= 2");
  if (cfg.samples < 100 * cfg.bins) throw ConfigError("samples must be at least 100 * bins");
  const unsigned width = static_cast<unsigned>(std::countr_zero(cfg.bins));

  InvarianceReport report;
  report.config = cfg;
  report.counts.assign(cfg.bins, 0);
  for (std::uint64_t i = 0; i < cfg.samples; ++i) {
    const std::uint64_t sample_seed = DeriveSeed(cfg.seed, SeedTag::kSample, i);
    BitStream x = BitStream::Generator(sample_seed);
    if (cfg.sampler == RootSampler::kSquaredUniform) {
      const std::uint64_t u = HashWord(sample_seed, 1);
      const std::uint64_t square = MulHigh(u, u);
      std::vector<Override> prefix;
      prefix.reserve(64);
      for (std::uint64_t b = 1; b <= 64; ++b) prefix.push_back({b, static_cast<Bit>((square >> (64 - b)) & 1)});
      x = x.WithOverrides(prefix);
    }
    for (std::uint64_t s = 0; s < cfg.shifts; ++s) x = BakerShift(x);
    std::uint64_t bin = 0;
    for (unsigned b = 1; b <= width; ++b) bin = (bin << 1) | x.At(b);
    ++report.counts[bin];
  }
  report.chi_square = ChiSquareUniform(report.counts);
  return report;
}

void to_json(nlohmann::json& j, const WinRateReport& r) {
  nlohmann::json per_player = nlohmann::json::array();
  for (const PlayerRate& p : r.per_player) {
    per_player.push_back({{"player", p.player},
                          {"wins", p.wins},
                          {"trials", p.trials},
                          {"rate", p.rate},
                          {"interval", {p.interval.lo, p.interval.hi}}});
  }
  nlohmann::json histogram = nlohmann::json::array();
  for (const auto& [t, count] : r.threshold_histogram) histogram.push_back({{"threshold", t}, {"count", count}});
  if (r.threshold_none > 0) histogram.push_back({{"threshold", nullptr}, {"count", r.threshold_none}});
  j = nlohmann::json{
      {"valid_trials", r.valid_trials},
      {"pooled", r.pooled},
      {"pooled_interval", {r.pooled_interval.lo, r.pooled_interval.hi}},
      {"homogeneity",
       {{"statistic", r.homogeneity.statistic}, {"dof", r.homogeneity.dof}, {"p_value", r.homogeneity.p_value}}},
      {"threshold_histogram", std::move(histogram)},
      {"per_player", std::move(per_player)},
  };
}

void to_json(nlohmann::json& j, const AzumaReport& r) {
  nlohmann::json points = nlohmann::json::array();
  for (const AzumaPoint& p : r.points) {
    points.push_back({{"n", p.n},
                      {"epsilon", p.epsilon},
                      {"exceed", p.exceed},
                      {"trials", p.trials},
                      {"frequency", p.frequency},
                      {"bound", p.bound},
                      {"margin", p.margin},
                      {"violation", p.violation}});
  }
  j = nlohmann::json{{"violations", r.violations}, {"points", std::move(points)}};
}

void to_json(nlohmann::json& j, const MartingaleReport& r) {
  nlohmann::json bins = nlohmann::json::array();
  for (const MartingaleBin& b : r.bins) {
    bins.push_back({
        {"lo", b.lo == std::numeric_limits<std::int64_t>::min() ? nlohmann::json(nullptr) : nlohmann::json(b.lo)},
        {"hi", b.hi == std::numeric_limits<std::int64_t>::max() ? nlohmann::json(nullptr) : nlohmann::json(b.hi)},
        {"count", b.count},
        {"mean", b.mean},
        {"margin", b.margin},
        {"tested", b.tested},
        {"pass", b.pass},
    });
  }
  j = nlohmann::json{{"trajectories", r.trajectories},
                     {"bad_increments", r.bad_increments},
                     {"increments_ok", r.increments_ok},
                     {"bins_ok", r.bins_ok},
                     {"consistent", r.consistent},
                     {"verdict", r.verdict},
                     {"bins", std::move(bins)}};
}

void to_json(nlohmann::json& j, const QuarantineTally& q) {
  j = nlohmann::json{{"signaling_invalid", q.invalid_trials},
                     {"raw_wins", q.raw_wins},
                     {"raw_guesses", q.raw_guesses},
                     {"raw_success_rate", q.raw_success_rate ? nlohmann::json(*q.raw_success_rate)
                                                             : nlohmann::json(nullptr)}};
}

nlohmann::json ReportToJson(const ExperimentResult& r) {
  nlohmann::json j = {
      {"schema_version", kReportSchemaVersion},
      {"report", "simulate"},
      {"config", r.config},
      {"win_rate", r.win_rate},
      {"azuma", r.azuma},
      {"martingale", r.martingale ? nlohmann::json(*r.martingale) : nlohmann::json(nullptr)},
      {"quarantine", r.quarantine},
  };
  if (!r.memo_table.empty()) j["memo_table"] = r.memo_table;
  return j;
}

nlohmann::json InvarianceReportToJson(const InvarianceReport& r) {
  return {
      {"schema_version", kReportSchemaVersion},
      {"report", "invariance-test"},
      {"config",
       {{"samples", r.config.samples},
        {"bins", r.config.bins},
        {"shifts", r.config.shifts},
        {"seed", r.config.seed},
        {"sampler", RootSamplerName(r.config.sampler)}}},
      {"chi_square", r.chi_square.statistic},
      {"dof", r.chi_square.dof},
      {"p_value", r.chi_square.p_value},
      {"counts", r.counts},
  };
}

std::string PlayersCsv(const WinRateReport& r) {
  std::ostringstream os;
  os << "schema_version,player,wins,trials,rate,lo,hi\n";
  for (const PlayerRate& p : r.per_player) {
    os << kReportSchemaVersion << ',' << p.player << ',' << p.wins << ',' << p.trials << ',' << FormatDouble(p.rate) << ','
       << FormatDouble(p.interval.lo) << ',' << FormatDouble(p.interval.hi) << '\n';
  }
  return os.str();
}

std::string AzumaCsv(const AzumaReport& r) {
  std::ostringstream os;
  os << "schema_version,n,epsilon,exceed,trials,frequency,bound,margin,violation\n";
  for (const AzumaPoint& p : r.points) {
    os << kReportSchemaVersion << ',' << p.n << ',' << FormatDouble(p.epsilon) << ',' << p.exceed << ',' << p.trials << ','
       << FormatDouble(p.frequency) << ',' << FormatDouble(p.bound) << ',' << FormatDouble(p.margin) << ','
       << (p.violation ? "true" : "false") << '\n';
  }
  return os.str();
}

}  // namespace nsgame
