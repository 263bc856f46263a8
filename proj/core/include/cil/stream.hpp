#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cil/dataset.hpp"

namespace cil::stream {

enum class Mode { disjoint, fuzzy };

struct StreamSpec {
  Mode mode = Mode::disjoint;
  int classes_per_task = 1;
  /// Percentage of each task drawn from classes that define other tasks.
  int fuzz_percent = 0;
  std::uint64_t seed = 0;
  std::optional<std::vector<int>> class_order;

  /// Throws ConfigError if the spec is unusable with `num_classes` classes.
  void validate(int num_classes) const;
  bool operator==(const StreamSpec&) const = default;
};

/// One task of the stream. Examples are referenced by index into the
/// dataset's training split; `labels[i]` is the label of `example_indices[i]`.
struct TaskBatch {
  int task_index = 0;
  std::vector<int> major_classes;
  std::vector<std::size_t> example_indices;
  std::vector<int> labels;
  std::vector<std::string> warnings;

  std::size_t size() const noexcept { return example_indices.size(); }
  /// Number of examples whose label is not a major class.
  std::size_t minor_count() const;
};

/// The class order used for major-class assignment.
std::vector<int> resolve_class_order(int num_classes, const StreamSpec& spec);

std::vector<TaskBatch> make_disjoint_stream(const Dataset& ds,
                                            const StreamSpec& spec);
std::vector<TaskBatch> make_fuzzy_stream(const Dataset& ds,
                                         const StreamSpec& spec);
/// Dispatches on spec.mode.
std::vector<TaskBatch> make_stream(const Dataset& ds, const StreamSpec& spec);

/// Copies the referenced training examples out of `ds`.
std::vector<LabeledExample> materialize(const Dataset& ds,
                                        const TaskBatch& task);

/// JSON array of {task_index, major_classes, example_indices}.
std::string manifest_json(std::span<const TaskBatch> tasks);
void write_manifest(const std::filesystem::path& path,
                    std::span<const TaskBatch> tasks);

}  // namespace cil::stream
