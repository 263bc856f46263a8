#include "cil/stream.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cil/error.hpp"
#include "cil/random.hpp"

namespace cil::stream {

namespace {

struct Layout {
  std::vector<int> order;
  std::vector<std::vector<std::size_t>> by_class;
  int num_tasks = 0;
};

Layout prepare(const Dataset& ds, const StreamSpec& spec) {
  spec.validate(ds.num_classes);
  Layout l;
  l.order = resolve_class_order(ds.num_classes, spec);
  l.by_class = indices_by_class(ds.train, ds.num_classes);
  l.num_tasks = ds.num_classes / spec.classes_per_task;
  return l;
}

std::vector<int> majors_of(const Layout& l, int q, int t) {
  const auto first = l.order.begin() + static_cast<std::ptrdiff_t>(t) * q;
  return {first, first + q};
}

std::vector<std::size_t> gather(const Layout& l, const std::vector<int>& classes) {
  std::vector<std::size_t> out;
  for (int c : classes) {
    const auto& idx = l.by_class[static_cast<std::size_t>(c)];
    out.insert(out.end(), idx.begin(), idx.end());
  }
  return out;
}

void fill_labels(const Dataset& ds, TaskBatch& task) {
  task.labels.clear();
  task.labels.reserve(task.example_indices.size());
  for (auto i : task.example_indices) task.labels.push_back(ds.train[i].label);
}

}  // namespace

void StreamSpec::validate(int num_classes) const {
  if (classes_per_task < 1) throw ConfigError("classes_per_task must be >= 1");
  if (num_classes < 1) throw ConfigError("dataset has no classes");
  if (num_classes % classes_per_task != 0) {
    throw ConfigError(std::to_string(num_classes) +
                      " classes are not divisible by classes_per_task " +
                      std::to_string(classes_per_task));
  }
  if (fuzz_percent < 0 || fuzz_percent > 100) {
    throw ConfigError("fuzz_percent must be in [0, 100]");
  }
  if (mode == Mode::disjoint && fuzz_percent != 0) {
    throw ConfigError("disjoint streams require fuzz_percent = 0");
  }
  if (mode == Mode::fuzzy && fuzz_percent >= 100) {
    throw ConfigError("fuzzy streams require fuzz_percent < 100");
  }
  if (class_order) {
    if (class_order->size() != static_cast<std::size_t>(num_classes)) {
      throw ConfigError("class_order must list every class exactly once");
    }
    std::vector<bool> seen(static_cast<std::size_t>(num_classes), false);
    for (int c : *class_order) {
      if (c < 0 || c >= num_classes || seen[static_cast<std::size_t>(c)]) {
        throw ConfigError("class_order is not a permutation of the classes");
      }
      seen[static_cast<std::size_t>(c)] = true;
    }
  }
}

std::size_t TaskBatch::minor_count() const {
  return static_cast<std::size_t>(std::count_if(
      labels.begin(), labels.end(), [this](int y) {
        return std::find(major_classes.begin(), major_classes.end(), y) ==
               major_classes.end();
      }));
}

std::vector<int> resolve_class_order(int num_classes, const StreamSpec& spec) {
  if (spec.class_order) return *spec.class_order;
  std::vector<int> order(static_cast<std::size_t>(num_classes));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(spec.seed, "stream/class_order"));
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

std::vector<TaskBatch> make_disjoint_stream(const Dataset& ds,
                                            const StreamSpec& spec) {
  if (spec.mode != Mode::disjoint) {
    throw ConfigError("make_disjoint_stream needs a disjoint spec");
  }
  const Layout l = prepare(ds, spec);
  std::vector<TaskBatch> tasks;
  for (int t = 0; t < l.num_tasks; ++t) {
    TaskBatch task;
    task.task_index = t;
    task.major_classes = majors_of(l, spec.classes_per_task, t);
    task.example_indices = gather(l, task.major_classes);
    Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(t), 11));
    std::shuffle(task.example_indices.begin(), task.example_indices.end(), rng);
    fill_labels(ds, task);
    tasks.push_back(std::move(task));
  }
  return tasks;
}

// Every training example lands in exactly one task. A task of size S keeps
// S - round(Z% of S) of its own major examples; the remainder of each task
// forms a pool that is dealt out as minor examples to the other tasks.
std::vector<TaskBatch> make_fuzzy_stream(const Dataset& ds,
                                         const StreamSpec& spec) {
  if (spec.mode != Mode::fuzzy) {
    throw ConfigError("make_fuzzy_stream needs a fuzzy spec");
  }
  const Layout l = prepare(ds, spec);
  const auto T = static_cast<std::size_t>(l.num_tasks);
  const double z = spec.fuzz_percent / 100.0;

  std::vector<TaskBatch> tasks(T);
  std::vector<std::vector<std::size_t>> leftover(T);
  std::vector<std::size_t> demand(T);
  for (std::size_t t = 0; t < T; ++t) {
    auto& task = tasks[t];
    task.task_index = static_cast<int>(t);
    task.major_classes = majors_of(l, spec.classes_per_task, static_cast<int>(t));
    auto majors = gather(l, task.major_classes);
    Rng rng(derive_seed(spec.seed, t, 21));
    std::shuffle(majors.begin(), majors.end(), rng);
    const auto size = majors.size();
    const auto minor = static_cast<std::size_t>(std::llround(z * static_cast<double>(size)));
    demand[t] = minor;
    task.example_indices.assign(majors.begin(), majors.end() - static_cast<std::ptrdiff_t>(minor));
    leftover[t].assign(majors.end() - static_cast<std::ptrdiff_t>(minor), majors.end());
  }

  std::size_t supply = 0;
  for (const auto& pool : leftover) supply += pool.size();

  Rng draw_rng(derive_seed(spec.seed, "stream/minor_draw"));
  for (std::size_t t = 0; t < T; ++t) {
    auto& task = tasks[t];
    Rng fallback_rng(derive_seed(spec.seed, t, 23));
    bool warned = false;
    while (demand[t] > 0) {
      // A later task u is tight when every pool example it may still use is
      // needed; drawing from anywhere but u's own pool would starve it.
      std::size_t home = T;
      for (std::size_t u = t + 1; u < T && home == T; ++u) {
        if (leftover[u].empty()) continue;
        if (supply - leftover[u].size() == demand[u]) home = u;
      }

      std::size_t available = supply - leftover[t].size();
      if (home == T && available == 0) {
        // Pool exhausted: sample with replacement from other classes.
        std::vector<std::size_t> others;
        for (std::size_t u = 0; u < T; ++u) {
          if (u == t) continue;
          const auto idx = gather(l, majors_of(l, spec.classes_per_task, static_cast<int>(u)));
          others.insert(others.end(), idx.begin(), idx.end());
        }
        if (others.empty()) {
          throw ConfigError("fuzzy stream needs at least two tasks");
        }
        if (!warned) {
          task.warnings.push_back(
              "task " + std::to_string(t) +
              ": minor pool exhausted, sampling minor examples with replacement");
          warned = true;
        }
        std::uniform_int_distribution<std::size_t> pick(0, others.size() - 1);
        for (; demand[t] > 0; --demand[t]) {
          task.example_indices.push_back(others[pick(fallback_rng)]);
        }
        break;
      }

      std::size_t pos = 0;
      if (home == T) {
        std::uniform_int_distribution<std::size_t> pick(0, available - 1);
        pos = pick(draw_rng);
        for (std::size_t u = 0; u < T; ++u) {
          if (u == t) continue;
          if (pos < leftover[u].size()) {
            home = u;
            break;
          }
          pos -= leftover[u].size();
        }
      } else {
        std::uniform_int_distribution<std::size_t> pick(0, leftover[home].size() - 1);
        pos = pick(draw_rng);
      }
      auto& pool = leftover[home];
      task.example_indices.push_back(pool[pos]);
      pool[pos] = pool.back();
      pool.pop_back();
      --supply;
      --demand[t];
    }

    Rng rng(derive_seed(spec.seed, t, 22));
    std::shuffle(task.example_indices.begin(), task.example_indices.end(), rng);
    fill_labels(ds, task);
  }
  return tasks;
}

std::vector<TaskBatch> make_stream(const Dataset& ds, const StreamSpec& spec) {
  return spec.mode == Mode::disjoint ? make_disjoint_stream(ds, spec)
                                     : make_fuzzy_stream(ds, spec);
}

std::vector<LabeledExample> materialize(const Dataset& ds,
                                        const TaskBatch& task) {
  std::vector<LabeledExample> out;
  out.reserve(task.example_indices.size());
  for (auto i : task.example_indices) out.push_back(ds.train.at(i));
  return out;
}

}  // namespace cil::stream
