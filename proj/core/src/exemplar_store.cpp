#include "cil/exemplar_store.hpp"

#include <algorithm>
#include <numeric>

#include "cil/error.hpp"
#include "json.hpp"

namespace cil::sampler {

std::size_t ExemplarStore::total() const noexcept {
  std::size_t n = 0;
  for (const auto& [cls, list] : per_class_) n += list.size();
  return n;
}

std::size_t ExemplarStore::size_of(int cls) const {
  const auto it = per_class_.find(cls);
  return it == per_class_.end() ? 0 : it->second.size();
}

const std::vector<StoredExemplar>& ExemplarStore::exemplars(int cls) const {
  const auto it = per_class_.find(cls);
  if (it == per_class_.end()) {
    throw ConfigError("class " + std::to_string(cls) + " has no exemplars");
  }
  return it->second;
}

void ExemplarStore::set_class(int cls, std::vector<StoredExemplar> exemplars) {
  for (const auto& e : exemplars) {
    if (e.example.label != cls) {
      throw ConfigError("exemplar labelled " + std::to_string(e.example.label) +
                        " stored under class " + std::to_string(cls));
    }
  }
  const std::size_t after = total() - size_of(cls) + exemplars.size();
  if (after > budget_) {
    throw ConfigError("storing " + std::to_string(exemplars.size()) +
                      " exemplars of class " + std::to_string(cls) +
                      " exceeds the budget of " + std::to_string(budget_));
  }
  if (!per_class_.contains(cls)) order_.push_back(cls);
  per_class_[cls] = std::move(exemplars);
}

std::optional<std::string> ExemplarStore::shrink(int cls, std::size_t new_quota) {
  if (new_quota < 1) throw ConfigError("quota must be >= 1");
  const auto it = per_class_.find(cls);
  if (it == per_class_.end()) {
    return "shrink: class " + std::to_string(cls) + " has no exemplars";
  }
  if (it->second.size() > new_quota) it->second.resize(new_quota);
  return std::nullopt;
}

std::vector<LabeledExample> ExemplarStore::all_examples() const {
  std::vector<LabeledExample> out;
  out.reserve(total());
  for (int cls : order_) {
    for (const auto& e : per_class_.at(cls)) out.push_back(e.example);
  }
  return out;
}

std::string ExemplarStore::to_json() const {
  nlohmann::ordered_json j;
  j["budget"] = budget_;
  j["classes"] = nlohmann::ordered_json::array();
  for (int cls : order_) {
    const auto& list = per_class_.at(cls);
    std::vector<std::size_t> indices;
    indices.reserve(list.size());
    for (const auto& e : list) indices.push_back(e.train_index);
    std::vector<std::size_t> rank(list.size());
    std::iota(rank.begin(), rank.end(), std::size_t{0});
    nlohmann::ordered_json c;
    c["class"] = cls;
    c["indices_into_train"] = indices;
    c["selection_order"] = rank;
    j["classes"].push_back(std::move(c));
  }
  return j.dump(2);
}

ExemplarStore ExemplarStore::from_json(const std::string& text, const Dataset& ds) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("exemplar store: ") + e.what());
  }
  try {
    ExemplarStore store(j.at("budget").get<std::size_t>());
    for (const auto& c : j.at("classes")) {
      const int cls = c.at("class").get<int>();
      const auto indices = c.at("indices_into_train").get<std::vector<std::size_t>>();
      const auto rank = c.at("selection_order").get<std::vector<std::size_t>>();
      if (rank.size() != indices.size()) {
        throw ConfigError("selection_order and indices_into_train differ in length");
      }
      std::vector<StoredExemplar> list(indices.size());
      for (std::size_t k = 0; k < indices.size(); ++k) {
        if (rank[k] >= list.size()) throw ConfigError("selection_order out of range");
        const auto idx = indices[k];
        if (idx >= ds.train.size()) {
          throw DataError("exemplar index " + std::to_string(idx) + " out of range");
        }
        list[rank[k]] = {idx, ds.train[idx]};
      }
      store.set_class(cls, std::move(list));
    }
    return store;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("exemplar store: ") + e.what());
  }
}

bool ExemplarStore::operator==(const ExemplarStore& other) const {
  if (budget_ != other.budget_ || order_ != other.order_) return false;
  for (const auto& [cls, list] : per_class_) {
    const auto it = other.per_class_.find(cls);
    if (it == other.per_class_.end() || it->second.size() != list.size()) return false;
    for (std::size_t k = 0; k < list.size(); ++k) {
      if (list[k].train_index != it->second[k].train_index ||
          !(list[k].example == it->second[k].example)) {
        return false;
      }
    }
  }
  return per_class_.size() == other.per_class_.size();
}

ExemplarStore shrink_class_exemplars(ExemplarStore store, int cls,
                                     std::size_t new_quota,
                                     std::vector<std::string>* warnings) {
  if (auto w = store.shrink(cls, new_quota); w && warnings != nullptr) {
    warnings->push_back(*w);
  }
  return store;
}

}  // namespace cil::sampler
