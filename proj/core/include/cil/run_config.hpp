#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cil/blobs.hpp"
#include "cil/losses.hpp"
#include "cil/reduce.hpp"
#include "cil/sampler.hpp"
#include "cil/stream.hpp"
#include "cil/trainer.hpp"

namespace cil::harness {

enum class DatasetKind { blobs, cifar100 };
enum class SamplerKind { dss, gonzalez, random };
enum class ReducerKind { tsne, pca, none };
/// Which vectors are reduced and sampled: raw inputs or head features.
enum class SamplingSpace { input, penultimate };
enum class ClassifierKind { softmax_head, nme };

struct DatasetSpec {
  DatasetKind kind = DatasetKind::blobs;
  BlobsParams blobs;
  std::string train_path;
  std::string test_path;
  /// CIFAR classes to keep (relabelled in this order); empty keeps all 100.
  std::vector<int> classes;
  std::size_t per_class_limit = 0;

  bool operator==(const DatasetSpec&) const = default;
};

/// Every knob of one experiment. Per-module seeds are derived from `seed`,
/// so the seed fields of the nested configs are ignored.
struct RunConfig {
  DatasetSpec dataset;
  stream::StreamSpec stream;
  sampler::SamplerParams sampler;  ///< m is set per class from the quota
  SamplerKind sampler_kind = SamplerKind::dss;
  ReducerKind reducer = ReducerKind::tsne;
  reduce::TsneConfig tsne;
  SamplingSpace sampling_space = SamplingSpace::input;
  learner::LossConfig loss;
  learner::TrainConfig train;
  std::vector<std::size_t> hidden{128, 64};
  std::size_t memory_budget = 1000;
  ClassifierKind classifier = ClassifierKind::softmax_head;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  /// Wall-clock seconds go into metrics.csv only when set; otherwise the
  /// column is zero so repeated runs produce identical files.
  bool record_seconds = false;
  bool export_embeddings = false;

  /// Throws ConfigError on an invalid or inconsistent configuration.
  void validate() const;
  /// Width of the vectors handed to the reducer.
  std::size_t sampling_dim() const;

  bool operator==(const RunConfig&) const = default;
};

struct DerivedSeeds {
  std::uint64_t stream;
  std::uint64_t reducer;
  std::uint64_t sampler;
  std::uint64_t trainer;
  std::uint64_t model;
};
DerivedSeeds derive_seeds(std::uint64_t global);

std::string to_json(const RunConfig& cfg);
/// Unknown keys and malformed values raise ConfigError.
RunConfig config_from_json(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

const char* to_string(SamplerKind k);
const char* to_string(ReducerKind k);
const char* to_string(ClassifierKind k);

}  // namespace cil::harness
