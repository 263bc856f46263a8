#include "cil/dataset.hpp"

#include <cmath>
#include <string>

#include "cil/error.hpp"

namespace cil {

namespace {

void validate_split(const std::vector<LabeledExample>& split, const char* name,
                    int num_classes, std::size_t dim) {
  for (std::size_t i = 0; i < split.size(); ++i) {
    const auto& ex = split[i];
    const std::string where = std::string(name) + "[" + std::to_string(i) + "]";
    if (ex.features.empty()) throw DataError(where + ": empty feature vector");
    if (ex.features.size() != dim) {
      throw DataError(where + ": feature width " +
                      std::to_string(ex.features.size()) + " != " +
                      std::to_string(dim));
    }
    if (ex.label < 0 || ex.label >= num_classes) {
      throw DataError(where + ": label " + std::to_string(ex.label) +
                      " out of range");
    }
    for (double v : ex.features) {
      if (!std::isfinite(v)) throw DataError(where + ": non-finite feature");
    }
  }
}

}  // namespace

void Dataset::validate() const {
  if (num_classes < 1) throw DataError("dataset has no classes");
  if (dim == 0) throw DataError("dataset has zero feature width");
  validate_split(train, "train", num_classes, dim);
  validate_split(test, "test", num_classes, dim);
  if (!train_outlier.empty() && train_outlier.size() != train.size()) {
    throw DataError("train_outlier is not aligned with train");
  }
}

std::vector<std::vector<std::size_t>> indices_by_class(
    std::span<const LabeledExample> examples, int num_classes) {
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(num_classes));
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const int y = examples[i].label;
    if (y < 0 || y >= num_classes) {
      throw DataError("label " + std::to_string(y) + " out of range");
    }
    out[static_cast<std::size_t>(y)].push_back(i);
  }
  return out;
}

Dataset subset_classes(const Dataset& ds, std::span<const int> classes,
                       std::size_t per_class_limit) {
  if (classes.empty()) throw ConfigError("class subset is empty");
  std::vector<int> remap(static_cast<std::size_t>(ds.num_classes), -1);
  for (std::size_t k = 0; k < classes.size(); ++k) {
    const int c = classes[k];
    if (c < 0 || c >= ds.num_classes) {
      throw ConfigError("subset class " + std::to_string(c) + " out of range");
    }
    if (remap[static_cast<std::size_t>(c)] != -1) {
      throw ConfigError("subset class " + std::to_string(c) + " repeated");
    }
    remap[static_cast<std::size_t>(c)] = static_cast<int>(k);
  }

  Dataset out;
  out.num_classes = static_cast<int>(classes.size());
  out.dim = ds.dim;
  auto copy_split = [&](const std::vector<LabeledExample>& src,
                        std::vector<LabeledExample>& dst,
                        const std::vector<bool>* flags,
                        std::vector<bool>* out_flags) {
    std::vector<std::size_t> taken(classes.size(), 0);
    for (std::size_t i = 0; i < src.size(); ++i) {
      const int k = remap[static_cast<std::size_t>(src[i].label)];
      if (k < 0) continue;
      auto& count = taken[static_cast<std::size_t>(k)];
      if (per_class_limit != 0 && count >= per_class_limit) continue;
      ++count;
      dst.push_back({src[i].features, k});
      if (out_flags != nullptr && flags != nullptr && !flags->empty()) {
        out_flags->push_back((*flags)[i]);
      }
    }
  };
  copy_split(ds.train, out.train, &ds.train_outlier, &out.train_outlier);
  copy_split(ds.test, out.test, nullptr, nullptr);
  return out;
}

}  // namespace cil
