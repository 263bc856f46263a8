#include "cil/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>

#include "cil/cifar.hpp"
#include "cil/error.hpp"
#include "cil/random.hpp"
#include "cil/trainer.hpp"

namespace cil::harness {

namespace {

using learner::MlpModel;

// Rethrows `e` with context, keeping its type so exit codes survive.
[[noreturn]] void rethrow_with(const std::string& where) {
  try {
    throw;
  } catch (const DivergenceError& e) {
    throw DivergenceError(e.epoch(), where + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(where + ": " + e.what());
  } catch (const ShapeError& e) {
    throw ShapeError(where + ": " + e.what());
  } catch (const IoError& e) {
    throw IoError(where + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(where + ": " + e.what());
  }
}

template <typename F>
auto stage(int task, const char* name, F&& body) {
  try {
    return body();
  } catch (...) {
    rethrow_with("task " + std::to_string(task) + ", stage " + name);
  }
}

reduce::Embedding reduce_rows(const RunConfig& cfg, const reduce::FeatureMatrix& x,
                              std::uint64_t seed) {
  switch (cfg.reducer) {
    case ReducerKind::none:
      return reduce::Embedding::identity(x);
    case ReducerKind::pca: {
      const std::size_t d = std::min({cfg.tsne.target_dim, x.rows, x.cols});
      return reduce::pca_reduce(x, d);
    }
    case ReducerKind::tsne: {
      reduce::TsneConfig t = cfg.tsne;
      t.seed = seed;
      return reduce::tsne_reduce(x, t);
    }
  }
  throw ConfigError("unknown reducer");
}

std::map<int, std::vector<double>> exemplar_means(
    const MlpModel& model, const sampler::ExemplarStore& store,
    const std::map<int, int>& unit_of) {
  std::map<int, std::vector<double>> means;
  for (int cls : store.class_order()) {
    const auto& list = store.exemplars(cls);
    std::vector<double> mean(model.feature_width(), 0.0);
    for (const auto& e : list) {
      const auto f = learner::forward(model, e.example.features).penultimate;
      for (std::size_t k = 0; k < f.size(); ++k) mean[k] += f[k];
    }
    for (auto& v : mean) v /= static_cast<double>(list.size());
    means[unit_of.at(cls)] = std::move(mean);
  }
  return means;
}

}  // namespace

Dataset load_dataset(const DatasetSpec& spec, std::uint64_t seed) {
  if (spec.kind == DatasetKind::blobs) {
    BlobsParams p = spec.blobs;
    p.seed = seed;
    return make_blobs(p);
  }
  Dataset ds;
  try {
    ds = cifar::load_cifar100(spec.train_path, spec.test_path);
  } catch (const IoError& e) {
    // An unreadable input file is a problem with the data, not the output.
    throw DataError(e.what());
  }
  if (!spec.classes.empty() || spec.per_class_limit != 0) {
    std::vector<int> classes = spec.classes;
    if (classes.empty()) {
      classes.resize(static_cast<std::size_t>(ds.num_classes));
      std::iota(classes.begin(), classes.end(), 0);
    }
    ds = subset_classes(ds, classes, spec.per_class_limit);
  }
  return ds;
}

ExperimentResult run_experiment(const RunConfig& cfg) {
  cfg.validate();
  const Dataset ds = stage(0, "load", [&] {
    Dataset d = load_dataset(cfg.dataset, derive_seed(cfg.seed, "dataset"));
    d.validate();
    return d;
  });
  return run_experiment(cfg, ds);
}

ExperimentResult run_experiment(const RunConfig& cfg, const Dataset& ds) {
  cfg.validate();
  const DerivedSeeds seeds = derive_seeds(cfg.seed);

  ExperimentResult out;
  out.store = sampler::ExemplarStore(cfg.memory_budget);
  out.tasks = stage(0, "stream", [&] {
    stream::StreamSpec spec = cfg.stream;
    spec.seed = seeds.stream;
    return stream::make_stream(ds, spec);
  });

  MlpModel model(ds.dim, cfg.hidden, 0, seeds.model);
  std::map<int, int> unit_of;
  std::optional<learner::TeacherSnapshot> teacher;
  std::vector<double> accuracies;

  for (const auto& task : out.tasks) {
    const int t = task.task_index;
    const auto started = std::chrono::steady_clock::now();
    MetricsRecord rec;
    rec.task_index = t;
    rec.warnings = task.warnings;

    // New classes get fresh head units: major classes first, then any minor
    // classes making their first appearance, in ascending id.
    std::vector<int> fresh;
    for (int c : task.major_classes) {
      if (!unit_of.contains(c)) fresh.push_back(c);
    }
    std::set<int> minors(task.labels.begin(), task.labels.end());
    for (int c : minors) {
      if (!unit_of.contains(c) &&
          std::find(fresh.begin(), fresh.end(), c) == fresh.end()) {
        fresh.push_back(c);
      }
    }
    for (int c : fresh) {
      unit_of[c] = static_cast<int>(out.unit_classes.size());
      out.unit_classes.push_back(c);
    }
    if (!fresh.empty()) {
      model = learner::grow_head(std::move(model), fresh.size(),
                                 derive_seed(seeds.model, static_cast<std::uint64_t>(t), 1));
    }
    auto to_unit = [&](LabeledExample ex) {
      ex.label = unit_of.at(ex.label);
      return ex;
    };

    model = stage(t, "train", [&] {
      std::vector<LabeledExample> data;
      data.reserve(task.size() + out.store.total());
      for (auto i : task.example_indices) data.push_back(to_unit(ds.train[i]));
      for (auto& ex : out.store.all_examples()) data.push_back(to_unit(std::move(ex)));
      learner::TrainConfig tc = cfg.train;
      tc.seed = derive_seed(seeds.trainer, static_cast<std::uint64_t>(t));
      return learner::train_task(std::move(model), data,
                                 teacher ? &*teacher : nullptr, cfg.loss, tc)
          .model;
    });
    teacher = learner::TeacherSnapshot::capture(model);

    stage(t, "sample", [&] {
      const auto quota = sampler::allocate_quota(cfg.memory_budget, out.unit_classes.size());
      for (int cls : out.store.class_order()) {
        out.store.shrink(cls, quota[static_cast<std::size_t>(unit_of.at(cls))]);
      }
      std::map<int, std::vector<std::size_t>> members;
      for (std::size_t k = 0; k < task.size(); ++k) {
        members[task.labels[k]].push_back(task.example_indices[k]);
      }
      for (int cls : out.unit_classes) {
        const auto it = members.find(cls);
        if (it == members.end()) continue;
        const auto& idx = it->second;
        sampler::SamplerParams params = cfg.sampler;
        params.m = quota[static_cast<std::size_t>(unit_of.at(cls))];

        sampler::Selection picks;
        const auto job_seed = derive_seed(seeds.sampler, static_cast<std::uint64_t>(t),
                                          static_cast<std::uint64_t>(cls));
        if (cfg.sampler_kind == SamplerKind::random) {
          picks = sampler::random_sample(idx.size(), std::min(params.m, idx.size()), job_seed);
        } else {
          const std::size_t width = cfg.sampling_space == SamplingSpace::input
                                        ? ds.dim
                                        : model.feature_width();
          reduce::FeatureMatrix x(idx.size(), width);
          for (std::size_t r = 0; r < idx.size(); ++r) {
            const auto& f = ds.train[idx[r]].features;
            if (cfg.sampling_space == SamplingSpace::input) {
              std::copy(f.begin(), f.end(), x.row(r).begin());
            } else {
              const auto p = learner::forward(model, f).penultimate;
              std::copy(p.begin(), p.end(), x.row(r).begin());
            }
          }
          auto emb = reduce_rows(cfg, x,
                                 derive_seed(seeds.reducer, static_cast<std::uint64_t>(t),
                                             static_cast<std::uint64_t>(cls)));
          for (const auto& w : emb.warnings) {
            rec.warnings.push_back("class " + std::to_string(cls) + ": " + w);
          }
          picks = cfg.sampler_kind == SamplerKind::dss
                      ? sampler::dss_sample(emb, params)
                      : sampler::gonzalez_sample(emb, params.m);
          if (cfg.export_embeddings) {
            out.embeddings.push_back({t, cls, std::move(emb)});
          }
        }
        std::vector<sampler::StoredExemplar> kept;
        kept.reserve(picks.size());
        for (auto p : picks) kept.push_back({idx[p], ds.train[idx[p]]});
        out.store.set_class(cls, std::move(kept));
      }
    });

    rec.accuracy = stage(t, "evaluate", [&] {
      std::vector<LabeledExample> pool;
      for (const auto& ex : ds.test) {
        if (unit_of.contains(ex.label)) pool.push_back(to_unit(ex));
      }
      if (cfg.classifier == ClassifierKind::nme) {
        const auto means = exemplar_means(model, out.store, unit_of);
        return evaluate(model, pool, cfg.classifier, &means);
      }
      return evaluate(model, pool, cfg.classifier);
    });
    accuracies.push_back(rec.accuracy);
    rec.average_accuracy = average_accuracy(accuracies);
    rec.exemplars = out.store.total();
    if (cfg.record_seconds) {
      rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
                        .count();
    }
    out.records.push_back(std::move(rec));
  }
  out.model = std::move(model);
  return out;
}

double evaluate(const learner::MlpModel& model, std::span<const LabeledExample> pool,
                ClassifierKind classifier,
                const std::map<int, std::vector<double>>* class_means) {
  if (pool.empty()) throw ConfigError("evaluation pool is empty");
  if (classifier == ClassifierKind::nme && (class_means == nullptr || class_means->empty())) {
    throw ConfigError("nme evaluation needs exemplar means");
  }
  std::size_t correct = 0;
  for (const auto& ex : pool) {
    int predicted = 0;
    if (classifier == ClassifierKind::nme) {
      predicted = learner::nme_classify(learner::forward(model, ex.features).penultimate,
                                        *class_means);
    } else {
      predicted = static_cast<int>(learner::predict(model, ex.features));
    }
    if (predicted == ex.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(pool.size());
}

double average_accuracy(std::span<const double> per_task) {
  if (per_task.empty()) throw ConfigError("average accuracy of no tasks");
  double sum = 0.0;
  for (double a : per_task) {
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("accuracy outside [0, 1]");
    sum += a;
  }
  return sum / static_cast<double>(per_task.size());
}

}  // namespace cil::harness
