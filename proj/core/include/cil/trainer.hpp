#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "cil/dataset.hpp"
#include "cil/losses.hpp"
#include "cil/mlp.hpp"

namespace cil::learner {

/// Frozen copy of the model from the previous task boundary.
struct TeacherSnapshot {
  MlpModel model;
  std::size_t old_classes = 0;

  static TeacherSnapshot capture(const MlpModel& model);
};

struct TrainConfig {
  int epochs = 70;
  std::size_t batch_size = 128;
  double learning_rate = 0.01;
  double momentum = 0.01;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

struct BatchLoss {
  double mean_loss = 0.0;
  Gradients gradients;  ///< of the mean loss
};

/// Mean per-example loss over `batch` and its gradient. Labels index the
/// model's output units.
BatchLoss batch_loss(const MlpModel& model, std::span<const LabeledExample> batch,
                     const TeacherSnapshot* teacher, const LossConfig& cfg);

struct TrainResult {
  MlpModel model;
  std::vector<double> loss_trace;  ///< mean example loss per epoch
};

/// Mini-batch SGD with momentum over epoch-shuffled batches. Uses plain
/// cross-entropy when `teacher` is null and the cross-distilled loss
/// otherwise. Throws ShapeError for a label outside the head and
/// DivergenceError on a non-finite loss.
TrainResult train_task(MlpModel model, std::span<const LabeledExample> data,
                       const TeacherSnapshot* teacher, const LossConfig& lcfg,
                       const TrainConfig& tcfg);

/// Nearest class mean in feature space; ties go to the lowest class id.
int nme_classify(std::span<const double> features,
                 const std::map<int, std::vector<double>>& class_means);

// Checkpoints: "CILMLP01", u64 size count, u64 sizes..., u64 class count,
// then f64 parameters (weights then bias per layer), all little-endian.
std::vector<std::uint8_t> checkpoint_bytes(const MlpModel& model);
MlpModel parse_checkpoint(std::span<const std::uint8_t> bytes);
void save_checkpoint(const std::filesystem::path& path, const MlpModel& model,
                     const std::string& sidecar_json);
MlpModel load_checkpoint(const std::filesystem::path& path);

}  // namespace cil::learner
