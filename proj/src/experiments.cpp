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

#include "alstrat/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "alstrat/io.hpp"

namespace alstrat {
namespace {

void RequireVersion(const nlohmann::json& j, const std::string& what) {
  if (j.value("version", 0) != kFileFormatVersion) {
    throw std::invalid_argument(what + ": unsupported or missing version");
  }
}

double MeanOf(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Sample standard deviation (n - 1); 0 for fewer than two values.
double SampleStd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = MeanOf(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double TargetFor(const std::map<std::string, double>& targets, const std::string& name) {
  const auto it = targets.find(name);
  if (it == targets.end()) {
    throw std::invalid_argument("no target quality for dataset '" + name + "'");
  }
  return it->second;
}

}  // namespace

nlohmann::json TargetsToJson(const TargetsFile& t) {
  return {{"version", kFileFormatVersion},
          {"classifier", ClassifierSpecToJson(t.classifier)},
          {"budget", t.budget},
          {"repeats", t.repeats},
          {"seed", t.seed},
          {"test_fraction", t.test_fraction},
          {"targets", t.targets}};
}

TargetsFile TargetsFromJson(const nlohmann::json& j) {
  RequireVersion(j, "targets file");
  TargetsFile t;
  if (j.contains("classifier")) t.classifier = ClassifierSpecFromJson(j.at("classifier"));
  t.budget = j.value("budget", t.budget);
  t.repeats = j.value("repeats", t.repeats);
  t.seed = j.value("seed", t.seed);
  t.test_fraction = j.value("test_fraction", t.test_fraction);
  t.targets = j.at("targets").get<std::map<std::string, double>>();
  for (const auto& [name, q] : t.targets) {
    if (!(q > 0.0 && q <= 1.0)) {
      throw std::invalid_argument("targets file: q for '" + name + "' outside (0, 1]");
    }
  }
  return t;
}

Calibration CalibrateDataset(const Dataset& ds, const ClassifierSpec& spec, int budget,
                             int repeats, double test_fraction, std::uint64_t seed) {
  if (repeats <= 0) throw std::invalid_argument("calibration: repeats must be > 0");
  Calibration out;
  for (int r = 0; r < repeats; ++r) {
    const std::uint64_t rs = MixSeed(seed, static_cast<std::uint64_t>(r));
    const auto [pool, test] = Split(ds, {test_fraction, rs});
    const Calibration one = CalibrateTargetQuality(pool, test, spec, budget, 1, rs);
    out.accuracies.push_back(one.accuracies.front());
    out.clamped = out.clamped || one.clamped;
  }
  out.mean_accuracy = MeanOf(out.accuracies);
  out.target_quality = 0.98 * out.mean_accuracy;
  return out;
}

nlohmann::json PolicyToJson(const PolicyFile& p) {
  nlohmann::json env = EnvConfigToJson(p.env);
  return {{"version", kFileFormatVersion},
          {"env", std::move(env)},
          {"encoder", MlpToJson(p.network.encoder())},
          {"head", MlpToJson(p.network.head())},
          {"train_config", TrainConfigToJson(p.train)},
          {"seed", p.seed},
          {"targets", p.targets},
          {"training_datasets", p.training_datasets}};
}

PolicyFile PolicyFromJson(const nlohmann::json& j) {
  RequireVersion(j, "policy file");
  PolicyFile p;
  p.env = EnvConfigFromJson(j.at("env"));
  p.network = QNetwork(MlpFromJson(j.at("encoder")), MlpFromJson(j.at("head")));
  if (p.network.state_dim() != p.env.v_size) {
    throw std::invalid_argument("policy file: encoder input does not match v_size");
  }
  if (j.contains("train_config")) p.train = TrainConfigFromJson(j.at("train_config"));
  p.seed = j.value("seed", p.seed);
  if (j.contains("targets")) p.targets = j.at("targets").get<std::map<std::string, double>>();
  if (j.contains("training_datasets")) {
    p.training_datasets = j.at("training_datasets").get<std::vector<std::string>>();
  }
  return p;
}

EpisodeLog RunTrial(const Policy& policy, const Dataset& ds, double target_quality,
                    const EnvConfig& env, double test_fraction, std::uint64_t trial_seed,
                    bool record_states) {
  auto [pool, test] = Split(ds, {test_fraction, MixSeed(trial_seed, 1)});
  EnvConfig cfg = env;
  cfg.target_quality = target_quality;
  Environment environment(std::make_shared<const Dataset>(std::move(pool)),
                          std::make_shared<const Dataset>(std::move(test)), cfg);
  Rng policy_rng = MakeRng(trial_seed, 3);
  EpisodeOptions opts;
  opts.record_states = record_states;
  return RunEpisode(environment, policy, MixSeed(trial_seed, 2), policy_rng, opts);
}

void Summarize(EvalResult& result, int max_steps) {
  std::vector<double> lengths(result.lengths.begin(), result.lengths.end());
  result.mean_length = MeanOf(lengths);
  result.stderr_length =
      lengths.empty() ? 0.0 : SampleStd(lengths) / std::sqrt(static_cast<double>(lengths.size()));
  const auto exhausted = std::count_if(result.lengths.begin(), result.lengths.end(),
                                       [&](int len) { return len >= max_steps; });
  result.exhausted_fraction =
      lengths.empty() ? 0.0 : static_cast<double>(exhausted) / static_cast<double>(lengths.size());
}

EvalResult Evaluate(const Policy& policy, const Dataset& ds, double target_quality,
                    const EvalConfig& cfg) {
  if (cfg.trials <= 0) throw std::invalid_argument("evaluate: trials must be >= 1");
  EvalResult result;
  result.dataset = ds.name;
  result.policy = policy.name();
  result.target_quality = target_quality;
  for (int i = 0; i < cfg.trials; ++i) {
    EpisodeLog log = RunTrial(policy, ds, target_quality, cfg.env, cfg.test_fraction,
                              cfg.seed + static_cast<std::uint64_t>(i), cfg.record_states);
    log.episode_id = i;
    result.lengths.push_back(log.length());
    if (cfg.keep_logs) result.logs.push_back(std::move(log));
  }
  Summarize(result, cfg.env.max_steps);
  return result;
}

double Savings(double policy_mean, double random_mean) {
  if (random_mean == 0.0) return 0.0;
  return 1.0 - policy_mean / random_mean;
}

EvalResult CrossClassifierEval(const Policy& policy, const Dataset& ds,
                               const ClassifierSpec& eval_classifier, double target_quality,
                               EvalConfig cfg) {
  cfg.env.classifier = eval_classifier;
  return Evaluate(policy, ds, target_quality, cfg);
}

std::string EvalResultsCsv(const std::vector<EvalResult>& results) {
  std::ostringstream out;
  out << "dataset,policy,trials,target_quality,mean_length,stderr,exhausted_fraction\n";
  for (const auto& r : results) {
    out << r.dataset << "," << r.policy << "," << r.lengths.size() << ","
        << FormatReal(r.target_quality) << "," << FormatReal(r.mean_length) << ","
        << FormatReal(r.stderr_length) << "," << FormatReal(r.exhausted_fraction) << "\n";
  }
  return out.str();
}

std::vector<LooRow> LeaveOneOut(const std::vector<Dataset>& collection,
                                const std::map<std::string, double>& targets,
                                const LooConfig& cfg, const std::vector<Dataset>& test_sets,
                                const LooProgress& progress) {
  if (collection.size() < 2) {
    throw std::invalid_argument("leave-one-out needs at least 2 datasets");
  }
  auto note = [&](const std::string& m) {
    if (progress) progress(m);
  };
  const EvalConfig& eval_cfg = cfg.eval;
  const RandomPolicy random;
  const UncertaintyPolicy uncertainty;

  std::vector<LooRow> rows;
  std::vector<LooRow> test_rows(test_sets.size());
  for (std::size_t t = 0; t < test_sets.size(); ++t) {
    const double q = TargetFor(targets, test_sets[t].name);
    test_rows[t].dataset = test_sets[t].name;
    test_rows[t].held_out_test = true;
    test_rows[t].random = Evaluate(random, test_sets[t], q, eval_cfg);
    test_rows[t].uncertainty = Evaluate(uncertainty, test_sets[t], q, eval_cfg);
  }

  for (std::size_t fold = 0; fold < collection.size(); ++fold) {
    const Dataset& held = collection[fold];
    std::vector<TrainingTask> tasks;
    std::vector<std::string> names;
    std::map<std::string, double> used_targets;
    for (std::size_t k = 0; k < collection.size(); ++k) {
      if (k == fold) continue;
      const double q = TargetFor(targets, collection[k].name);
      tasks.push_back({std::make_shared<const Dataset>(collection[k]), q});
      names.push_back(collection[k].name);
      used_targets[collection[k].name] = q;
    }
    note("fold " + std::to_string(fold) + ": training without " + held.name);
    const std::uint64_t train_seed = MixSeed(cfg.seed, fold);
    DqnTrainer trainer(std::move(tasks), cfg.train, cfg.eval.env, train_seed);
    trainer.Run();
    const QPolicy learned(trainer.online(), 0.0, "learned");

    if (!cfg.policy_dir.empty()) {
      PolicyFile pf{trainer.online(), cfg.eval.env, cfg.train, train_seed, used_targets, names};
      WriteJsonFile((std::filesystem::path(cfg.policy_dir) / ("policy_without_" + held.name + ".json"))
                        .string(),
                    PolicyToJson(pf));
    }

    const double q = TargetFor(targets, held.name);
    LooRow row;
    row.dataset = held.name;
    row.random = Evaluate(random, held, q, eval_cfg);
    row.uncertainty = Evaluate(uncertainty, held, q, eval_cfg);
    row.learned = Evaluate(learned, held, q, eval_cfg);
    note("fold " + std::to_string(fold) + ": " + held.name + " random " +
         FormatReal(row.random.mean_length, 2) + " uncertainty " +
         FormatReal(row.uncertainty.mean_length, 2) + " learned " +
         FormatReal(row.learned.mean_length, 2));
    rows.push_back(std::move(row));

    for (std::size_t t = 0; t < test_sets.size(); ++t) {
      const EvalResult r =
          Evaluate(learned, test_sets[t], TargetFor(targets, test_sets[t].name), eval_cfg);
      test_rows[t].learned_means.push_back(r.mean_length);
    }
  }

  for (auto& row : test_rows) {
    row.learned.dataset = row.dataset;
    row.learned.policy = "learned";
    row.learned.mean_length = MeanOf(row.learned_means);
    row.learned_std_across_policies = SampleStd(row.learned_means);
    row.learned.stderr_length = row.learned_std_across_policies /
                                std::sqrt(static_cast<double>(row.learned_means.size()));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string LooTableCsv(const std::vector<LooRow>& rows) {
  std::ostringstream out;
  out << "dataset,role,random_mean,random_stderr,uncertainty_mean,uncertainty_stderr,"
         "learned_mean,learned_stderr,learned_std_across_policies,uncertainty_savings,"
         "learned_savings\n";
  for (const auto& r : rows) {
    out << r.dataset << "," << (r.held_out_test ? "test" : "leave_one_out") << ","
        << FormatReal(r.random.mean_length) << "," << FormatReal(r.random.stderr_length) << ","
        << FormatReal(r.uncertainty.mean_length) << ","
        << FormatReal(r.uncertainty.stderr_length) << "," << FormatReal(r.learned.mean_length)
        << "," << FormatReal(r.learned.stderr_length) << ","
        << FormatReal(r.learned_std_across_policies) << ","
        << FormatReal(Savings(r.uncertainty.mean_length, r.random.mean_length)) << ","
        << FormatReal(Savings(r.learned.mean_length, r.random.mean_length)) << "\n";
  }
  return out.str();
}

LearningCurve ComputeLearningCurve(const std::vector<EpisodeLog>& logs, double target_quality,
                                   int max_steps) {
  if (!(target_quality > 0.0)) throw std::invalid_argument("learning curve: q must be > 0");
  LearningCurve curve;
  const auto steps = static_cast<std::size_t>(max_steps) + 1;
  curve.mean.assign(steps, 0.0);
  curve.std_error.assign(steps, 0.0);
  if (logs.empty()) return curve;
  std::vector<std::vector<double>> per_step(steps);
  for (const auto& log : logs) {
    double value = log.initial_accuracy / target_quality;
    for (std::size_t k = 0; k < steps; ++k) {
      if (k >= 1 && k <= log.steps.size()) value = log.steps[k - 1].accuracy / target_quality;
      per_step[k].push_back(value);
    }
  }
  for (std::size_t k = 0; k < steps; ++k) {
    curve.mean[k] = MeanOf(per_step[k]);
    curve.std_error[k] =
        SampleStd(per_step[k]) / std::sqrt(static_cast<double>(per_step[k].size()));
  }
  return curve;
}

std::string LearningCurveCsv(const LearningCurve& curve) {
  std::ostringstream out;
  out << "step,mean_quality_fraction,stderr\n";
  for (std::size_t k = 0; k < curve.mean.size(); ++k) {
    out << k << "," << FormatReal(curve.mean[k]) << "," << FormatReal(curve.std_error[k])
        << "\n";
  }
  return out.str();
}

std::vector<SelectionHistogram> AnalyzeSelections(const std::vector<EpisodeLog>& logs,
                                                  int bins) {
  if (bins <= 0) throw std::invalid_argument("histogram: bins must be > 0");
  std::vector<SelectionHistogram> hists;
  auto make = [&](std::string name, int lo, int hi) {
    SelectionHistogram h;
    h.bucket = std::move(name);
    h.t_min = lo;
    h.t_max = hi;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    hists.push_back(std::move(h));
  };
  make("all", 0, -1);
  for (int lo = 0; lo < 100; lo += 20) {
    make("t" + std::to_string(lo) + "-" + std::to_string(lo + 19), lo, lo + 19);
  }
  for (const auto& log : logs) {
    for (const auto& s : log.steps) {
      const int bin = std::clamp(static_cast<int>(s.p_t * bins), 0, bins - 1);
      ++hists[0].counts[bin];
      ++hists[0].total;
      if (s.t >= 0 && s.t < 100) {
        auto& h = hists[1 + s.t / 20];
        ++h.counts[bin];
        ++h.total;
      }
    }
  }
  for (auto& h : hists) {
    h.fractions.assign(h.counts.size(), 0.0);
    if (h.total == 0) continue;
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      h.fractions[b] = static_cast<double>(h.counts[b]) / static_cast<double>(h.total);
    }
  }
  return hists;
}

std::string SelectionHistogramCsv(const std::vector<SelectionHistogram>& hists) {
  std::ostringstream out;
  out << "bucket,t_min,t_max,total";
  const std::size_t bins = hists.empty() ? 0 : hists.front().counts.size();
  for (std::size_t b = 0; b < bins; ++b) {
    out << ",bin_" << FormatReal(static_cast<double>(b) / static_cast<double>(bins), 2);
  }
  out << "\n";
  for (const auto& h : hists) {
    out << h.bucket << "," << h.t_min << "," << h.t_max << "," << h.total;
    for (double f : h.fractions) out << "," << FormatReal(f, 9);
    out << "\n";
  }
  return out.str();
}

Eigen::MatrixXd StateEvolution(const EpisodeLog& log) {
  if (log.states.empty()) throw std::invalid_argument("episode log has no recorded states");
  const Eigen::Index rows = log.states.front().size();
  Eigen::MatrixXd m(rows, static_cast<Eigen::Index>(log.states.size()));
  for (std::size_t t = 0; t < log.states.size(); ++t) m.col(t) = log.states[t];
  return m;
}

std::string StateEvolutionCsv(const Eigen::MatrixXd& states) {
  std::ostringstream out;
  out << "position";
  for (Eigen::Index t = 0; t < states.cols(); ++t) out << ",t" << t;
  out << "\n";
  for (Eigen::Index r = 0; r < states.rows(); ++r) {
    out << r;
    for (Eigen::Index t = 0; t < states.cols(); ++t) out << "," << FormatReal(states(r, t), 9);
    out << "\n";
  }
  return out.str();
}

void WriteEpisodeLogs(const std::string& dir, const std::vector<EpisodeLog>& logs) {
  if (logs.empty()) return;
  std::string content;
  for (const auto& log : logs) content += EpisodeLogToJsonLines(log);
  const std::string file = logs.front().dataset + "__" + logs.front().policy + ".jsonl";
  WriteFileAtomic((std::filesystem::path(dir) / file).string(), content);
}

std::vector<EpisodeLog> ReadEpisodeLogs(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw std::invalid_argument(dir + ": not a directory");
  std::vector<fs::path> files;
  for (const auto& f : fs::directory_iterator(dir)) {
    if (f.path().extension() == ".jsonl") files.push_back(f.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<EpisodeLog> logs;
  for (const auto& f : files) {
    auto part = ParseEpisodeJsonLines(ReadFile(f.string()));
    logs.insert(logs.end(), std::make_move_iterator(part.begin()),
                std::make_move_iterator(part.end()));
  }
  return logs;
}

}  // namespace alstrat
