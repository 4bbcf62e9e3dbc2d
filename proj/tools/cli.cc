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

#include "cli.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nsgame/behavior.h"
#include "nsgame/errors.h"
#include "nsgame/experiment.h"
#include "nsgame/strategy.h"

namespace nsgame {
namespace {

using nlohmann::json;

constexpr int kMaxCount = std::numeric_limits<int>::max();

std::string Join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

json ReadJsonFile(const std::string& path, const std::string& flag) {
  std::ifstream in(path);
  if (!in) throw ConfigError(flag + ": cannot open \"" + path + "\"");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(flag + ": " + path + ": " + e.what());
  }
}

// Resolves --out, then $NSGAME_OUTPUT_DIR/<default_name>, then stdout.
class Output {
 public:
  Output(std::string out_flag, std::ostream& fallback) : flag_(std::move(out_flag)), fallback_(fallback) {}

  void Write(const std::string& default_name, const std::string& content) const {
    std::filesystem::path path;
    if (!flag_.empty()) {
      path = flag_;
    } else if (const char* dir = std::getenv("NSGAME_OUTPUT_DIR"); dir != nullptr && *dir != '\0') {
      std::filesystem::create_directories(dir);
      path = std::filesystem::path(dir) / default_name;
    } else {
      fallback_ << content;
      return;
    }
    WriteFile(path, content);
  }

  // Sibling of the primary output: foo.csv -> foo.<suffix>.
  void WriteSibling(const std::string& default_name, const std::string& suffix, const std::string& content) const {
    if (flag_.empty()) {
      Write(default_name, content);
      return;
    }
    std::filesystem::path path(flag_);
    path.replace_extension(suffix);
    WriteFile(path, content);
  }

 private:
  static void WriteFile(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("--out: cannot write \"" + path.string() + "\"");
    f << content;
  }

  std::string flag_;
  std::ostream& fallback_;
};

void WriteTextFile(const std::string& path, const std::string& flag, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError(flag + ": cannot write \"" + path + "\"");
  f << content;
}

struct SimulateFlags {
  std::string config_path;
  std::string strategy;
  std::uint64_t players = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::string oracle_mode;
  std::uint64_t depth = 0;
  std::string game;
  unsigned parallelism = 1;
  std::vector<std::uint64_t> azuma_n;
  std::vector<double> azuma_eps;
  double z = 3.0;
  std::string root_path;
  std::string memo_in;
  std::string memo_out;
  std::string trial_log;
  std::string format = "json";
  std::string out;
};

struct SimulateOptions {
  CLI::Option* strategy;
  CLI::Option* players;
  CLI::Option* trials;
  CLI::Option* seed;
  CLI::Option* oracle_mode;
  CLI::Option* depth;
  CLI::Option* game;
  CLI::Option* parallelism;
  CLI::Option* azuma_n;
  CLI::Option* azuma_eps;
  CLI::Option* z;
  CLI::Option* root;
};

ExperimentConfig ResolveConfig(const SimulateFlags& f, const SimulateOptions& o) {
  ExperimentConfig cfg;
  if (!f.config_path.empty()) cfg = ConfigFromJson(ReadJsonFile(f.config_path, "--config"), cfg);
  if (o.strategy->count()) {
    try {
      cfg.strategy = ParseStrategySpec(f.strategy);
      MakeStrategy(cfg.strategy);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("--strategy: ") + e.what());
    }
  }
  if (o.players->count()) cfg.players = f.players;
  if (o.trials->count()) cfg.trials = f.trials;
  if (o.seed->count()) cfg.master_seed = f.seed;
  if (o.oracle_mode->count()) cfg.oracle_mode = ParseOracleMode(f.oracle_mode);
  if (o.depth->count()) cfg.root_override_depth = f.depth;
  if (o.game->count()) cfg.game = ParseGameVariant(f.game);
  if (o.parallelism->count()) cfg.parallelism = f.parallelism;
  if (o.azuma_n->count()) cfg.azuma.n = f.azuma_n;
  if (o.azuma_eps->count()) cfg.azuma.epsilon = f.azuma_eps;
  if (o.z->count()) cfg.confidence_z = f.z;
  if (o.root->count()) {
    try {
      cfg.fixed_root = BitStreamFromJson(ReadJsonFile(f.root_path, "--root"));
    } catch (const FormatError& e) {
      throw FormatError(std::string("--root: ") + e.what());
    }
  }
  if (!f.memo_in.empty()) {
    json table = ReadJsonFile(f.memo_in, "--memo-in");
    if (table.is_object() && table.contains("memo_table")) table = table.at("memo_table");
    cfg.memo_table = std::move(table);
  }
  ValidateConfig(cfg);
  return cfg;
}

int Simulate(const SimulateFlags& f, const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = ResolveConfig(f, o);
  const ExperimentResult result = RunExperiment(cfg);
  const Output output(f.out, out);
  if (f.format == "csv") {
    output.Write("simulate.players.csv", PlayersCsv(result.win_rate));
    if (f.out.empty() && std::getenv("NSGAME_OUTPUT_DIR") == nullptr) out << '\n';
    output.WriteSibling("simulate.azuma.csv", ".azuma.csv", AzumaCsv(result.azuma));
  } else {
    output.Write("simulate.json", ReportToJson(result).dump(2) + "\n");
  }
  if (!f.trial_log.empty()) {
    std::string lines;
    for (std::size_t t = 0; t < result.log.size(); ++t) {
      json j = result.log[t];
      j["trial"] = t;
      lines += j.dump() + "\n";
    }
    WriteTextFile(f.trial_log, "--trial-log", lines);
  }
  if (!f.memo_out.empty()) {
    const json memo = {{"schema_version", kReportSchemaVersion}, {"report", "memo-table"}, {"memo_table", result.memo_table}};
    WriteTextFile(f.memo_out, "--memo-out", memo.dump(2) + "\n");
  }
  if (result.quarantine.invalid_trials > 0) {
    err << "signaling: " << result.quarantine.invalid_trials << " of " << cfg.trials
        << " trials quarantined as signaling-invalid\n";
    return kExitSignaling;
  }
  return kExitOk;
}

struct VerifyFlags {
  std::string path;
  double tolerance = 1e-9;
  bool strict = false;
  std::string out;
};

std::string DescribeViolation(const NsViolation& v) {
  std::string who;
  for (int p : v.parties) who += std::to_string(p);
  std::ostringstream os;
  os << "  party " << Join(v.parties) << " marginal P(a" << who << "=" << Join(v.fixed_outputs) << " | x" << who << "="
     << Join(v.fixed_inputs) << ") is " << v.reference_probability << " at x=(" << Join(v.reference_inputs)
     << ") but " << v.other_probability << " at x=(" << Join(v.other_inputs) << ")";
  return os.str();
}

int VerifyBehavior(const VerifyFlags& f, std::ostream& out, std::ostream& err) {
  const AnyBehavior any = BehaviorFromJson(ReadJsonFile(f.path, "behavior file"));
  json report = {{"schema_version", kReportSchemaVersion},
                 {"report", "verify-behavior"},
                 {"config", {{"path", f.path}, {"tolerance", f.tolerance}, {"strict", f.strict}}}};
  bool ns_pass = true;
  std::string summary;
  std::visit(
      [&](const auto& b) {
        report["parties"] = b.parties();
        report["exact"] = std::is_same_v<std::decay_t<decltype(b)>, Behavior>;
        CheckNormalized(b, f.tolerance);
        report["normalized"] = true;
        const NsReport ns = CheckNoSignaling(b, f.tolerance, f.strict);
        ns_pass = ns.pass;
        report["ns"] = ns;
        const bool det = IsDeterministicExtremal(b, f.tolerance);
        report["deterministic"] = det;
        summary = std::string("NS: ") + (ns.pass ? "pass" : "FAIL") + ", deterministic: " + (det ? "yes" : "no");
        if (det) {
          const FunctionTuple ft = FunctionsFromDeterministic(b, f.tolerance);
          const FnsReport fns = CheckFns(ft);
          report["fns"] = fns;
          report["factors_locally"] = FactorsIntoLocalFunctions(ft);
          summary += std::string(", FNS: ") + (fns.pass ? "pass" : "FAIL");
        } else {
          report["fns"] = nullptr;
          report["factors_locally"] = nullptr;
        }
        if (!ns.pass) {
          for (const NsViolation& v : ns.violations) summary += "\n" + DescribeViolation(v);
        }
      },
      any);
  report["summary"] = summary;
  Output(f.out, out).Write("verify-behavior.json", report.dump(2) + "\n");
  err << summary << "\n";
  return ns_pass ? kExitOk : kExitNsViolation;
}

struct InvarianceFlags {
  InvarianceConfig cfg;
  std::string sampler = "uniform";
  double alpha = 1e-3;
  std::string format = "json";
  std::string out;
};

int RunInvariance(InvarianceFlags f, std::ostream& out, std::ostream& err) {
  f.cfg.sampler = ParseRootSampler(f.sampler);
  const InvarianceReport r = InvarianceTest(f.cfg);
  const bool pass = r.chi_square.p_value > f.alpha;
  const Output output(f.out, out);
  if (f.format == "csv") {
    std::string csv = "schema_version,bin,count\n";
    for (std::size_t i = 0; i < r.counts.size(); ++i) {
      csv += std::to_string(kReportSchemaVersion) + "," + std::to_string(i) + "," + std::to_string(r.counts[i]) + "\n";
    }
    output.Write("invariance-test.csv", csv);
  } else {
    json j = InvarianceReportToJson(r);
    j["config"]["alpha"] = f.alpha;
    j["pass"] = pass;
    output.Write("invariance-test.json", j.dump(2) + "\n");
  }
  err << "chi-square " << r.chi_square.statistic << " on " << r.chi_square.dof << " dof, p = " << r.chi_square.p_value
      << (pass ? " (uniform)" : " (rejected)") << "\n";
  return kExitOk;
}

struct EnumerateFlags {
  std::vector<int> inputs{2, 2};
  std::vector<int> outputs;
  double budget = 1e6;
  std::string out;
};

int EnumerateFns(const EnumerateFlags& f, std::ostream& out, std::ostream& err) {
  std::vector<int> outputs = f.outputs.empty() ? std::vector<int>(f.inputs.size(), 2) : f.outputs;
  if (outputs.size() != f.inputs.size()) throw ConfigError("--outputs must list one size per party");
  const LocalityEquivalenceReport r = CheckFunctionalLocalityEquivalence(f.inputs, outputs, f.budget);
  json j = {{"schema_version", kReportSchemaVersion},
            {"report", "enumerate-fns"},
            {"config", {{"inputs", f.inputs}, {"outputs", outputs}, {"budget", f.budget}}}};
  j.update(json(r));
  Output(f.out, out).Write("enumerate-fns.json", j.dump(2) + "\n");
  err << "total " << r.total << ", FNS " << r.fns << ", factored " << r.factored << ", equal: "
      << (r.equal ? "true" : "false") << "\n";
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulator for guessing games on the baker's map and checker for no-signaling behaviors"};
  app.name("nsgame");
  app.require_subcommand(1);

  SimulateFlags sim;
  auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo experiment and report win rates");
  simulate->add_option("--config", sim.config_path, "JSON config file; inline flags override it");
  SimulateOptions so{};
  so.strategy = simulate->add_option("--strategy", sim.strategy,
                                     "fns | constant:B | local-random:P | local-table:BITS | cheat | JSON object");
  so.players = simulate->add_option("--players", sim.players, "Players per trial (K)")->check(CLI::Range(1, kMaxCount));
  so.trials = simulate->add_option("--trials", sim.trials, "Number of trials (T)")->check(CLI::Range(1, kMaxCount));
  so.seed = simulate->add_option("--seed", sim.seed, "Master seed");
  so.oracle_mode = simulate->add_option("--oracle-mode", sim.oracle_mode, "canonical | memoized")
                       ->check(CLI::IsMember({"canonical", "memoized"}));
  so.depth = simulate->add_option("--root-override-depth", sim.depth, "Flip root bits 1..d away from the base");
  so.game = simulate->add_option("--game", sim.game, "baker | hat")->check(CLI::IsMember({"baker", "hat"}));
  so.parallelism = simulate->add_option("--parallelism", sim.parallelism, "Worker threads")->check(CLI::Range(1, kMaxCount));
  so.azuma_n = simulate->add_option("--azuma-n", sim.azuma_n, "Azuma grid n values")->delimiter(',');
  so.azuma_eps = simulate->add_option("--azuma-epsilon", sim.azuma_eps, "Azuma grid epsilon values")->delimiter(',');
  so.z = simulate->add_option("--confidence-z", sim.z, "z for Wilson intervals and martingale bins");
  so.root = simulate->add_option("--root", sim.root_path, "Bit stream JSON used as every trial's root");
  simulate->add_option("--memo-in", sim.memo_in, "Memo table to start from (memoized mode)");
  simulate->add_option("--memo-out", sim.memo_out, "Write the final memo table here");
  simulate->add_option("--trial-log", sim.trial_log, "Write per-trial records as JSON lines");
  simulate->add_option("--format", sim.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  simulate->add_option("--out", sim.out, "Report path");

  VerifyFlags ver;
  auto* verify = app.add_subcommand("verify-behavior", "Check a behavior table for normalization, NS and FNS");
  verify->add_option("path", ver.path, "Behavior JSON file")->required();
  verify->add_option("--tolerance", ver.tolerance, "Tolerance for floating-point tables")->check(CLI::NonNegativeNumber);
  verify->add_flag("--strict", ver.strict, "Check marginals of every proper subset of parties");
  std::string verify_format = "json";
  verify->add_option("--format", verify_format, "json")->check(CLI::IsMember({"json"}));
  verify->add_option("--out", ver.out, "Report path");

  InvarianceFlags inv;
  auto* invariance = app.add_subcommand("invariance-test", "Chi-square test of the doubling map's invariant measure");
  invariance->add_option("--samples", inv.cfg.samples, "Number of sampled roots");
  invariance->add_option("--bins", inv.cfg.bins, "Histogram bins (power of two)");
  invariance->add_option("--shifts", inv.cfg.shifts, "Doubling-map applications before binning");
  invariance->add_option("--seed", inv.cfg.seed, "Sampling seed");
  invariance->add_option("--sampler", inv.sampler, "uniform | squared")->check(CLI::IsMember({"uniform", "squared"}));
  invariance->add_option("--alpha", inv.alpha, "Reject uniformity when p <= alpha");
  invariance->add_option("--format", inv.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  invariance->add_option("--out", inv.out, "Report path");

  EnumerateFlags en;
  auto* enumerate = app.add_subcommand("enumerate-fns", "Count deterministic, FNS and locally factored function tuples");
  enumerate->add_option("--inputs", en.inputs, "Input alphabet size per party")->delimiter(',')->check(CLI::Range(1, kMaxCount));
  enumerate->add_option("--outputs", en.outputs, "Output alphabet size per party (default 2 each)")
      ->delimiter(',')
      ->check(CLI::Range(1, kMaxCount));
  enumerate->add_option("--budget", en.budget, "Maximum number of tuples to enumerate");
  std::string enumerate_format = "json";
  enumerate->add_option("--format", enumerate_format, "json")->check(CLI::IsMember({"json"}));
  enumerate->add_option("--out", en.out, "Report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*simulate) return Simulate(sim, so, out, err);
    if (*verify) return VerifyBehavior(ver, out, err);
    if (*invariance) return RunInvariance(inv, out, err);
    if (*enumerate) return EnumerateFns(en, out, err);
  } catch (const EnumerationBudgetExceeded& e) {
    err << "error: " << e.what() << "; rerun with --budget " << EnumerationBudgetExceeded::Format(e.required())
        << " or more\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace nsgame
