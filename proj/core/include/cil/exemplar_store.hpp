#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cil/dataset.hpp"

namespace cil::sampler {

struct StoredExemplar {
  std::size_t train_index = 0;
  LabeledExample example;
};

/// Bounded rehearsal memory. Exemplars are original training inputs, kept
/// per class in selection order so that any prefix is itself a diverse set.
class ExemplarStore {
 public:
  explicit ExemplarStore(std::size_t budget = 0) : budget_(budget) {}

  std::size_t budget() const noexcept { return budget_; }
  std::size_t total() const noexcept;
  std::size_t size_of(int cls) const;
  bool contains(int cls) const { return per_class_.contains(cls); }

  /// Classes in the order they were first stored.
  const std::vector<int>& class_order() const noexcept { return order_; }
  const std::vector<StoredExemplar>& exemplars(int cls) const;

  /// Replaces the list of `cls`. Throws ConfigError on a label mismatch or if
  /// the budget would be exceeded.
  void set_class(int cls, std::vector<StoredExemplar> exemplars);

  /// Keeps the first `new_quota` exemplars of `cls`. Returns a warning when
  /// the class is not stored (the store is then unchanged).
  std::optional<std::string> shrink(int cls, std::size_t new_quota);

  /// Every stored example, classes in first-seen order.
  std::vector<LabeledExample> all_examples() const;

  /// {budget, classes: [{class, indices_into_train, selection_order}]}
  std::string to_json() const;
  /// Rebuilds a store from to_json() output; examples come from ds.train.
  static ExemplarStore from_json(const std::string& text, const Dataset& ds);

  bool operator==(const ExemplarStore& other) const;

 private:
  std::size_t budget_;
  std::map<int, std::vector<StoredExemplar>> per_class_;
  std::vector<int> order_;
};

/// Functional form of ExemplarStore::shrink; a warning is appended for an
/// absent class.
ExemplarStore shrink_class_exemplars(ExemplarStore store, int cls,
                                     std::size_t new_quota,
                                     std::vector<std::string>* warnings = nullptr);

}  // namespace cil::sampler
