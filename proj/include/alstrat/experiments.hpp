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

#ifndef ALSTRAT_EXPERIMENTS_HPP_
#define ALSTRAT_EXPERIMENTS_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "alstrat/dataset.hpp"
#include "alstrat/dqn.hpp"
#include "alstrat/environment.hpp"
#include "alstrat/episode.hpp"
#include "alstrat/q_network.hpp"
#include "alstrat/strategies.hpp"
#include <nlohmann/json.hpp>

namespace alstrat {

inline constexpr int kFileFormatVersion = 1;

// ---------------------------------------------------------------------------
// Target-quality files.

struct TargetsFile {
  ClassifierSpec classifier;
  int budget = 100;
  int repeats = 10;
  std::uint64_t seed = 0;
  double test_fraction = 0.5;
  std::map<std::string, double> targets;
};

nlohmann::json TargetsToJson(const TargetsFile& t);
TargetsFile TargetsFromJson(const nlohmann::json& j);

// Each repeat draws its own D/D' split, then one budget-sized labelled sample.
Calibration CalibrateDataset(const Dataset& ds, const ClassifierSpec& spec, int budget,
                             int repeats, double test_fraction, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Policy files.

struct PolicyFile {
  QNetwork network;
  EnvConfig env;
  TrainConfig train;
  std::uint64_t seed = 0;
  std::map<std::string, double> targets;
  std::vector<std::string> training_datasets;
};

nlohmann::json PolicyToJson(const PolicyFile& p);
PolicyFile PolicyFromJson(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Evaluation.

struct EvalConfig {
  int trials = 500;
  std::uint64_t seed = 0;
  EnvConfig env;  // target_quality is supplied per dataset
  double test_fraction = 0.5;
  bool keep_logs = true;
  bool record_states = false;
};

struct EvalResult {
  std::string dataset;
  std::string policy;
  std::vector<int> lengths;
  std::vector<EpisodeLog> logs;  // empty unless keep_logs
  double target_quality = 0.0;
  double mean_length = 0.0;
  double stderr_length = 0.0;
  double exhausted_fraction = 0.0;
};

// Trial `trial_seed` fixes the D/D' split and (V, L_0) independently of the
// policy, so different policies see identical starting points.
EpisodeLog RunTrial(const Policy& policy, const Dataset& ds, double target_quality,
                    const EnvConfig& env, double test_fraction, std::uint64_t trial_seed,
                    bool record_states = false);

// Trial i uses seed base + i.
EvalResult Evaluate(const Policy& policy, const Dataset& ds, double target_quality,
                    const EvalConfig& cfg);

// Mean, standard error (sample std / sqrt(n)) and budget-exhausted fraction.
void Summarize(EvalResult& result, int max_steps);

// 1 - policy_mean / random_mean
double Savings(double policy_mean, double random_mean);

// Evaluates a policy trained with one classifier in an environment that uses
// `eval_classifier`; `target_quality` must be calibrated for that classifier.
EvalResult CrossClassifierEval(const Policy& policy, const Dataset& ds,
                               const ClassifierSpec& eval_classifier, double target_quality,
                               EvalConfig cfg);

// CSV: dataset,policy,trials,mean_length,stderr,exhausted_fraction
std::string EvalResultsCsv(const std::vector<EvalResult>& results);

// ---------------------------------------------------------------------------
// Leave-one-out transfer.

struct LooConfig {
  TrainConfig train;
  EvalConfig eval;
  std::uint64_t seed = 0;
  std::string policy_dir;  // learned policies are written here when non-empty
};

struct LooRow {
  std::string dataset;
  bool held_out_test = false;  // never trained on; learned = mean over all folds
  EvalResult random;
  EvalResult uncertainty;
  EvalResult learned;
  double learned_std_across_policies = 0.0;
  std::vector<double> learned_means;  // per fold, test rows only
};

using LooProgress = std::function<void(const std::string& message)>;

// For every dataset: train on the others and evaluate random, uncertainty and
// the learned policy on it. Datasets in `test_sets` are evaluated under every
// fold's policy.
std::vector<LooRow> LeaveOneOut(const std::vector<Dataset>& collection,
                                const std::map<std::string, double>& targets,
                                const LooConfig& cfg,
                                const std::vector<Dataset>& test_sets = {},
                                const LooProgress& progress = nullptr);

// One row per dataset with means, standard errors and savings vs random.
std::string LooTableCsv(const std::vector<LooRow>& rows);

// ---------------------------------------------------------------------------
// Analysis outputs.

struct LearningCurve {
  std::vector<double> mean;    // index = number of annotations
  std::vector<double> std_error;
};

// Mean of accuracy / q per step, finished episodes padded with their final
// value.
LearningCurve ComputeLearningCurve(const std::vector<EpisodeLog>& logs,
                                   double target_quality, int max_steps);
std::string LearningCurveCsv(const LearningCurve& curve);

struct SelectionHistogram {
  std::string bucket;  // "all" or "t0-19", ...
  int t_min = 0;
  int t_max = 0;
  long total = 0;
  std::vector<long> counts;
  std::vector<double> fractions;  // counts / total, zeros if total == 0
};

// Histograms of p_t on [0, 1]: one over all steps, then one per 20-step
// bucket [0,19], ..., [80,99].
std::vector<SelectionHistogram> AnalyzeSelections(const std::vector<EpisodeLog>& logs,
                                                  int bins = 20);
std::string SelectionHistogramCsv(const std::vector<SelectionHistogram>& hists);

// Column t holds s_t; requires a log recorded with states.
Eigen::MatrixXd StateEvolution(const EpisodeLog& log);
std::string StateEvolutionCsv(const Eigen::MatrixXd& states);

// Writes all episodes to DIR/<dataset>__<policy>.jsonl (names from the first
// log).
void WriteEpisodeLogs(const std::string& dir, const std::vector<EpisodeLog>& logs);
// Reads every *.jsonl file in `dir`.
std::vector<EpisodeLog> ReadEpisodeLogs(const std::string& dir);

}  // namespace alstrat

#endif  // ALSTRAT_EXPERIMENTS_HPP_
