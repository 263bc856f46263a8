#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "cil/dataset.hpp"

namespace cil {

/// Gaussian class clusters with planted far-away outliers.
struct BlobsParams {
  int num_classes = 10;
  int per_class = 200;
  /// Optional per-class sizes (imbalanced data); overrides per_class.
  std::vector<int> per_class_counts;
  std::size_t dim = 2;
  double spread = 1.0;
  double outlier_fraction = 0.0;
  std::uint64_t seed = 0;
  /// Centers are uniform in [-center_box, center_box]^dim, in units of spread.
  double center_box = 10.0;

  bool operator==(const BlobsParams&) const = default;
};

/// Outliers sit at 10 to 15 spreads from their class center and keep the
/// class label. Each class is split 80/20 into train and test after shuffling.
Dataset make_blobs(const BlobsParams& params);

Dataset make_blobs(int num_classes, int per_class, std::size_t dim,
                   double spread, double outlier_fraction, std::uint64_t seed);

}  // namespace cil
