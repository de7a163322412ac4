// Copyright 2026 The alstrat Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: calibration, training, evaluation and analysis.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11/CLI11.hpp>

#include "alstrat/dataset.hpp"
#include "alstrat/dqn.hpp"
#include "alstrat/experiments.hpp"
#include "alstrat/io.hpp"
#include "alstrat/strategies.hpp"

namespace fs = std::filesystem;
using namespace alstrat;

namespace {

// Error kinds map to exit codes; the message is printed as a single line.
struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string OneLine(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

Dataset LoadDataFile(const std::string& path, const std::string& label_column) {
  return Normalize(LoadCsv(path, label_column));
}

TargetsFile LoadTargets(const std::string& path) { return TargetsFromJson(ReadJsonFile(path)); }

double TargetOf(const TargetsFile& t, const std::string& name) {
  const auto it = t.targets.find(name);
  if (it == t.targets.end()) throw CliError("no target quality for dataset '" + name + "'");
  return it->second;
}

// train.json holds TrainConfig keys at top level and an optional "env"
// object. Without an explicit env classifier the one used for calibration
// is taken from the targets file.
struct RunConfig {
  TrainConfig train;
  EnvConfig env;
};

RunConfig LoadRunConfig(const std::string& path, const TargetsFile& targets) {
  RunConfig rc;
  nlohmann::json j = path.empty() ? nlohmann::json::object() : ReadJsonFile(path);
  rc.train = TrainConfigFromJson(j);
  const nlohmann::json env = j.value("env", nlohmann::json::object());
  rc.env = EnvConfigFromJson(env);
  if (!env.contains("classifier")) rc.env.classifier = targets.classifier;
  return rc;
}

void EnsureParent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

// The policy under evaluation plus the environment it should run in.
struct LoadedPolicy {
  std::unique_ptr<Policy> policy;
  EnvConfig env;
};

LoadedPolicy ResolvePolicy(const std::string& policy_path, const std::string& strategy,
                           const TargetsFile& targets, const std::string& classifier) {
  if (policy_path.empty() == strategy.empty()) {
    throw CliError("exactly one of --policy or --strategy is required");
  }
  LoadedPolicy out;
  if (!policy_path.empty()) {
    PolicyFile pf = PolicyFromJson(ReadJsonFile(policy_path));
    out.env = pf.env;
    out.policy = std::make_unique<QPolicy>(std::move(pf.network), 0.0, "learned");
  } else {
    out.env.classifier = targets.classifier;
    out.policy = MakeBaselinePolicy(strategy);
  }
  if (!classifier.empty()) {
    out.env.classifier.kind = ParseClassifierKind(classifier);
    if (out.env.classifier.kind == targets.classifier.kind) {
      out.env.classifier = targets.classifier;
    }
  }
  if (out.env.classifier.kind != targets.classifier.kind) {
    std::cerr << "warning: targets were calibrated with "
              << ClassifierKindName(targets.classifier.kind) << " but the environment uses "
              << ClassifierKindName(out.env.classifier.kind) << "\n";
  }
  return out;
}

struct Common {
  std::uint64_t seed = 0;
  std::string out;
  std::string label_column = "label";
};

int CmdSynth(const std::string& out_dir, const std::string& kind, int count, int points,
             int dmin, int dmax, double sep_min, double sep_max, std::uint64_t seed) {
  if (count <= 0 || points < 4 || dmin < 1 || dmax < dmin || sep_max < sep_min) {
    throw CliError("invalid synth parameters");
  }
  const SyntheticKind k = ParseSyntheticKind(kind);
  Rng rng = MakeRng(seed, 0x5EED);
  std::vector<Dataset> sets;
  for (int i = 0; i < count; ++i) {
    const int d = dmin + static_cast<int>(UniformIndex(rng, static_cast<std::uint64_t>(dmax - dmin + 1)));
    const double sep = sep_min + (sep_max - sep_min) * UniformUnit(rng);
    std::ostringstream name;
    name << SyntheticKindName(k) << "_" << i;
    sets.push_back(MakeSynthetic(k, points, d, sep, MixSeed(seed, static_cast<std::uint64_t>(i)),
                                 name.str()));
  }
  WriteCollection(out_dir, sets);
  std::cout << "wrote " << sets.size() << " datasets to " << out_dir << "\n";
  return 0;
}

int CmdCalibrate(const std::string& collection, const std::string& classifier, int budget,
                 int repeats, double test_fraction, double bandwidth, const Common& c) {
  TargetsFile t;
  t.classifier.kind = ParseClassifierKind(classifier);
  t.classifier.rbf.bandwidth = bandwidth;
  t.budget = budget;
  t.repeats = repeats;
  t.seed = c.seed;
  t.test_fraction = test_fraction;
  std::uint64_t index = 0;
  for (const auto& ds : LoadCollection(collection)) {
    const Calibration cal = CalibrateDataset(ds, t.classifier, budget, repeats, test_fraction,
                                             MixSeed(c.seed, index++));
    t.targets[ds.name] = cal.target_quality;
    std::cerr << ds.name << ": mean accuracy " << FormatReal(cal.mean_accuracy, 4) << ", q "
              << FormatReal(cal.target_quality, 4) << (cal.clamped ? " (budget clamped)" : "")
              << "\n";
  }
  EnsureParent(c.out);
  WriteJsonFile(c.out, TargetsToJson(t));
  return 0;
}

int CmdTrain(const std::string& collection, const std::string& targets_path,
             const std::string& config_path, const std::string& log_path, const Common& c) {
  const TargetsFile targets = LoadTargets(targets_path);
  const RunConfig rc = LoadRunConfig(config_path, targets);
  std::vector<TrainingTask> tasks;
  for (auto& ds : LoadCollection(collection)) {
    const double q = TargetOf(targets, ds.name);
    tasks.push_back({std::make_shared<const Dataset>(std::move(ds)), q});
  }
  DqnTrainer trainer(tasks, rc.train, rc.env, c.seed);
  std::ostringstream log;
  log << "iteration,epsilon,mean_episode_length,mean_loss,buffer_size\n";
  trainer.Run([&](const IterationStats& s) {
    log << s.iteration << "," << FormatReal(s.epsilon) << ","
        << FormatReal(s.mean_episode_length) << "," << FormatReal(s.mean_loss) << ","
        << s.buffer_size << "\n";
    if ((s.iteration + 1) % 10 == 0) {
      std::cerr << "iteration " << s.iteration + 1 << ": epsilon " << FormatReal(s.epsilon, 3)
                << ", mean length " << FormatReal(s.mean_episode_length, 2) << "\n";
    }
  });

  PolicyFile pf;
  pf.network = trainer.online();
  pf.env = rc.env;
  pf.train = rc.train;
  pf.seed = c.seed;
  for (const auto& task : trainer.tasks()) {
    pf.training_datasets.push_back(task.dataset->name);
    pf.targets[task.dataset->name] = task.target_quality;
  }
  EnsureParent(c.out);
  WriteJsonFile(c.out, PolicyToJson(pf));
  const std::string training_log =
      log_path.empty() ? (fs::path(c.out).parent_path() / "training_log.csv").string() : log_path;
  WriteFileAtomic(training_log, log.str());
  return 0;
}

int CmdEval(const std::string& policy_path, const std::string& strategy,
            const std::string& data, const std::string& targets_path, int trials,
            const std::string& logs_dir, const std::string& classifier, const Common& c) {
  const TargetsFile targets = LoadTargets(targets_path);
  LoadedPolicy lp = ResolvePolicy(policy_path, strategy, targets, classifier);
  const Dataset ds = LoadDataFile(data, c.label_column);
  EvalConfig cfg;
  cfg.trials = trials;
  cfg.seed = c.seed;
  cfg.env = lp.env;
  cfg.keep_logs = !logs_dir.empty();
  const EvalResult r = Evaluate(*lp.policy, ds, TargetOf(targets, ds.name), cfg);
  EnsureParent(c.out);
  WriteFileAtomic(c.out, EvalResultsCsv({r}));
  if (!logs_dir.empty()) {
    fs::create_directories(logs_dir);
    WriteEpisodeLogs(logs_dir, r.logs);
  }
  std::cerr << r.dataset << " " << r.policy << ": mean length " << FormatReal(r.mean_length, 2)
            << " +- " << FormatReal(r.stderr_length, 2) << "\n";
  return 0;
}

int CmdLoo(const std::string& collection, const std::string& targets_path,
           const std::string& config_path, int trials, const std::string& test_dir,
           const std::string& policy_dir, const Common& c) {
  const TargetsFile targets = LoadTargets(targets_path);
  const RunConfig rc = LoadRunConfig(config_path, targets);
  LooConfig cfg;
  cfg.train = rc.train;
  cfg.eval.env = rc.env;
  cfg.eval.trials = trials;
  cfg.eval.seed = c.seed;
  cfg.eval.test_fraction = rc.train.test_fraction;
  cfg.seed = c.seed;
  cfg.policy_dir = policy_dir;
  if (!policy_dir.empty()) fs::create_directories(policy_dir);
  std::vector<Dataset> tests;
  if (!test_dir.empty()) tests = LoadCollection(test_dir);
  const auto rows = LeaveOneOut(LoadCollection(collection), targets.targets, cfg, tests,
                                [](const std::string& m) { std::cerr << m << "\n"; });
  EnsureParent(c.out);
  WriteFileAtomic(c.out, LooTableCsv(rows));
  return 0;
}

int CmdCurve(const std::string& policy_path, const std::string& strategy,
             const std::string& data, const std::string& targets_path, int trials,
             const std::string& classifier, const Common& c) {
  const TargetsFile targets = LoadTargets(targets_path);
  LoadedPolicy lp = ResolvePolicy(policy_path, strategy, targets, classifier);
  const Dataset ds = LoadDataFile(data, c.label_column);
  EvalConfig cfg;
  cfg.trials = trials;
  cfg.seed = c.seed;
  cfg.env = lp.env;
  const double q = TargetOf(targets, ds.name);
  const EvalResult r = Evaluate(*lp.policy, ds, q, cfg);
  EnsureParent(c.out);
  WriteFileAtomic(c.out, LearningCurveCsv(ComputeLearningCurve(r.logs, q, cfg.env.max_steps)));
  return 0;
}

int CmdAnalyze(const std::string& logs_dir, int bins, const Common& c) {
  const auto logs = ReadEpisodeLogs(logs_dir);
  if (logs.empty()) throw CliError(logs_dir + ": no episode logs found");
  EnsureParent(c.out);
  WriteFileAtomic(c.out, SelectionHistogramCsv(AnalyzeSelections(logs, bins)));
  return 0;
}

int CmdDumpState(const std::string& policy_path, const std::string& strategy,
                 const std::string& data, const std::string& targets_path, int trial,
                 const std::string& classifier, const Common& c) {
  const TargetsFile targets = LoadTargets(targets_path);
  LoadedPolicy lp = ResolvePolicy(policy_path, strategy, targets, classifier);
  const Dataset ds = LoadDataFile(data, c.label_column);
  const EpisodeLog log =
      RunTrial(*lp.policy, ds, TargetOf(targets, ds.name), lp.env, 0.5,
               c.seed + static_cast<std::uint64_t>(trial), /*record_states=*/true);
  EnsureParent(c.out);
  WriteFileAtomic(c.out, StateEvolutionCsv(StateEvolution(log)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learned active-learning strategies: calibrate, train, evaluate, analyze"};
  app.require_subcommand(1);

  Common c;
  std::string collection, targets_path, config_path, policy_path, strategy, data, logs_dir,
      classifier, test_dir, policy_dir, log_path, kind = "two_gaussians";
  std::string calib_classifier = "logreg";
  int budget = 100, repeats = 10, trials = 500, bins = 20, trial = 0;
  int count = 8, points = 400, dmin = 2, dmax = 10;
  double sep_min = 2.0, sep_max = 5.0, test_fraction = 0.5, bandwidth = 1.0;

  auto add_seed_out = [&](CLI::App* s, bool out_required = true) {
    s->add_option("--seed", c.seed, "Base random seed")->default_val(0);
    auto* o = s->add_option("--out", c.out, "Output file");
    if (out_required) o->required();
  };
  auto add_policy_opts = [&](CLI::App* s) {
    auto* p = s->add_option("--policy", policy_path, "Trained policy JSON");
    auto* st = s->add_option("--strategy", strategy, "Baseline strategy")
                   ->check(CLI::IsMember({"random", "uncertainty"}));
    p->excludes(st);
    s->add_option("--data", data, "Dataset CSV")->required()->check(CLI::ExistingFile);
    s->add_option("--targets", targets_path, "Target-quality JSON")->required();
    s->add_option("--label-column", c.label_column, "Label column name");
    s->add_option("--classifier", classifier, "Override the environment classifier")
        ->check(CLI::IsMember({"logreg", "rbf_logreg"}));
  };

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset collection");
  synth->add_option("--out", c.out, "Output directory")->required();
  synth->add_option("--kind", kind)->check(CLI::IsMember({"two_gaussians", "xor_blobs", "ring"}));
  synth->add_option("--count", count);
  synth->add_option("--points", points);
  synth->add_option("--dmin", dmin);
  synth->add_option("--dmax", dmax);
  synth->add_option("--sep-min", sep_min);
  synth->add_option("--sep-max", sep_max);
  synth->add_option("--seed", c.seed);

  auto* calibrate = app.add_subcommand("calibrate", "Compute target qualities");
  calibrate->add_option("--collection", collection)->required()->check(CLI::ExistingDirectory);
  calibrate->add_option("--classifier", calib_classifier)
      ->check(CLI::IsMember({"logreg", "rbf_logreg"}));
  calibrate->add_option("--budget", budget);
  calibrate->add_option("--repeats", repeats);
  calibrate->add_option("--test-fraction", test_fraction);
  calibrate->add_option("--bandwidth", bandwidth, "RBF bandwidth");
  add_seed_out(calibrate);

  auto* train = app.add_subcommand("train", "Train a strategy on a collection");
  train->add_option("--collection", collection)->required()->check(CLI::ExistingDirectory);
  train->add_option("--targets", targets_path)->required();
  train->add_option("--config", config_path, "Training config JSON");
  train->add_option("--log", log_path, "Training log CSV (default: next to --out)");
  add_seed_out(train);

  auto* eval = app.add_subcommand("eval", "Evaluate a policy or baseline");
  add_policy_opts(eval);
  eval->add_option("--trials", trials);
  eval->add_option("--logs", logs_dir, "Directory for episode logs");
  add_seed_out(eval);

  auto* loo = app.add_subcommand("loo", "Leave-one-out transfer experiment");
  loo->add_option("--collection", collection)->required()->check(CLI::ExistingDirectory);
  loo->add_option("--targets", targets_path)->required();
  loo->add_option("--config", config_path);
  loo->add_option("--trials", trials);
  loo->add_option("--test-collection", test_dir, "Datasets evaluated under every fold");
  loo->add_option("--policy-dir", policy_dir, "Where to save the fold policies");
  add_seed_out(loo);

  auto* curve = app.add_subcommand("curve", "Learning curve of a policy");
  add_policy_opts(curve);
  curve->add_option("--trials", trials);
  add_seed_out(curve);

  auto* analyze = app.add_subcommand("analyze", "Histograms of selected scores");
  analyze->add_option("--logs", logs_dir)->required()->check(CLI::ExistingDirectory);
  analyze->add_option("--bins", bins);
  add_seed_out(analyze);

  auto* dump = app.add_subcommand("dump-state", "State vector evolution of one episode");
  add_policy_opts(dump);
  dump->add_option("--trial", trial, "Trial index (seed offset)");
  add_seed_out(dump);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << OneLine(e.what()) << "\n";
    return 2;
  }

  try {
    if (*synth) {
      return CmdSynth(c.out, kind, count, points, dmin, dmax, sep_min, sep_max, c.seed);
    }
    if (*calibrate) {
      return CmdCalibrate(collection, calib_classifier, budget, repeats, test_fraction, bandwidth,
                          c);
    }
    if (*train) return CmdTrain(collection, targets_path, config_path, log_path, c);
    if (*eval) {
      return CmdEval(policy_path, strategy, data, targets_path, trials, logs_dir, classifier, c);
    }
    if (*loo) return CmdLoo(collection, targets_path, config_path, trials, test_dir, policy_dir, c);
    if (*curve) return CmdCurve(policy_path, strategy, data, targets_path, trials, classifier, c);
    if (*analyze) return CmdAnalyze(logs_dir, bins, c);
    if (*dump) {
      return CmdDumpState(policy_path, strategy, data, targets_path, trial, classifier, c);
    }
  } catch (const DataError& e) {
    std::cerr << "error: data: " << OneLine(e.what()) << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "error: io: " << OneLine(e.what()) << "\n";
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: json: " << OneLine(e.what()) << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: config: " << OneLine(e.what()) << "\n";
    return 4;
  } catch (const CliError& e) {
    std::cerr << "error: usage: " << OneLine(e.what()) << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << OneLine(e.what()) << "\n";
    return 1;
  }
  return 0;
}
