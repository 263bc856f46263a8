#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cil {

/// One input vector and its class id.
struct LabeledExample {
  std::vector<double> features;
  int label = 0;

  bool operator==(const LabeledExample&) const = default;
};

/// A train/test pair with a fixed, deterministic example order.
///
/// `train_outlier` is optional ground truth for generated data (empty when
/// unknown, as for CIFAR); it is never consulted by the learning pipeline.
struct Dataset {
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> test;
  int num_classes = 0;
  std::size_t dim = 0;
  std::vector<bool> train_outlier;

  /// Throws DataError on a non-finite feature, wrong width or bad label.
  void validate() const;
};

/// Indices of `examples` grouped by label, in their original order.
std::vector<std::vector<std::size_t>> indices_by_class(
    std::span<const LabeledExample> examples, int num_classes);

/// Keeps only `classes` (relabelled 0..k-1 in the given order), retaining at
/// most `per_class_limit` examples of each class per split (0 = no limit).
Dataset subset_classes(const Dataset& ds, std::span<const int> classes,
                       std::size_t per_class_limit = 0);

}  // namespace cil
