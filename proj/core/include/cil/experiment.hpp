#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cil/dataset.hpp"
#include "cil/exemplar_store.hpp"
#include "cil/mlp.hpp"
#include "cil/reduce.hpp"
#include "cil/run_config.hpp"
#include "cil/stream.hpp"

namespace cil::harness {

struct MetricsRecord {
  int task_index = 0;
  double accuracy = 0.0;          ///< on test data of every class seen so far
  double average_accuracy = 0.0;  ///< mean of accuracy over tasks so far
  std::size_t exemplars = 0;
  double seconds = 0.0;
  std::vector<std::string> warnings;
};

struct ExportedEmbedding {
  int task_index = 0;
  int class_id = 0;
  reduce::Embedding embedding;
};

struct ExperimentResult {
  std::vector<MetricsRecord> records;
  std::vector<stream::TaskBatch> tasks;
  sampler::ExemplarStore store;
  learner::MlpModel model;
  /// Output unit k predicts class unit_classes[k].
  std::vector<int> unit_classes;
  std::vector<ExportedEmbedding> embeddings;
};

Dataset load_dataset(const DatasetSpec& spec, std::uint64_t seed);

/// Runs the class-incremental loop: grow the head, train on task data plus
/// exemplars (distilling from the previous model after the first task),
/// select exemplars per class, evaluate on every seen class. Errors are
/// rethrown with the failing task and stage prepended.
ExperimentResult run_experiment(const RunConfig& cfg);
ExperimentResult run_experiment(const RunConfig& cfg, const Dataset& ds);

/// Fraction of `pool` predicted correctly. Labels in `pool` are output units;
/// `class_means` (keyed by unit) is required for the NME classifier.
double evaluate(const learner::MlpModel& model,
                std::span<const LabeledExample> pool, ClassifierKind classifier,
                const std::map<int, std::vector<double>>* class_means = nullptr);

double average_accuracy(std::span<const double> per_task);

/// `task,accuracy,avg_accuracy,exemplars,seconds`
std::string metrics_csv(std::span<const MetricsRecord> records);

/// Writes metrics.csv, config.json, exemplars.json, stream.json, model.bin
/// (+ model.json) and, when requested, embeddings/*.csv into `dir`.
void emit_results(const ExperimentResult& result, const RunConfig& cfg,
                  const std::filesystem::path& dir);

/// One row per (n, seed, task): `n,seed,task,accuracy,avg_accuracy`.
struct AblationCell {
  int n = 0;
  std::uint64_t seed = 0;
  std::vector<MetricsRecord> records;
};
std::vector<AblationCell> run_n_ablation(const RunConfig& base,
                                         std::span<const int> n_values,
                                         std::span<const std::uint64_t> seeds,
                                         const std::filesystem::path& dir);
std::string ablation_csv(std::span<const AblationCell> cells);

}  // namespace cil::harness
