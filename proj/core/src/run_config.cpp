#include "cil/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "cil/cifar.hpp"
#include "cil/error.hpp"
#include "cil/random.hpp"
#include "json.hpp"

namespace cil::harness {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

template <typename Enum>
struct EnumName {
  Enum value;
  const char* name;
};

constexpr EnumName<SamplerKind> kSamplerNames[] = {
    {SamplerKind::dss, "dss"}, {SamplerKind::gonzalez, "gonzalez"},
    {SamplerKind::random, "random"}};
constexpr EnumName<ReducerKind> kReducerNames[] = {
    {ReducerKind::tsne, "tsne"}, {ReducerKind::pca, "pca"}, {ReducerKind::none, "none"}};
constexpr EnumName<ClassifierKind> kClassifierNames[] = {
    {ClassifierKind::softmax_head, "softmax_head"}, {ClassifierKind::nme, "nme"}};
constexpr EnumName<DatasetKind> kDatasetNames[] = {
    {DatasetKind::blobs, "blobs"}, {DatasetKind::cifar100, "cifar100"}};
constexpr EnumName<stream::Mode> kModeNames[] = {
    {stream::Mode::disjoint, "disjoint"}, {stream::Mode::fuzzy, "fuzzy"}};
constexpr EnumName<SamplingSpace> kSpaceNames[] = {
    {SamplingSpace::input, "input"}, {SamplingSpace::penultimate, "penultimate"}};
constexpr EnumName<reduce::TsneInit> kInitNames[] = {
    {reduce::TsneInit::pca, "pca"}, {reduce::TsneInit::random, "random"}};

template <typename Enum, std::size_t N>
const char* name_of(const EnumName<Enum> (&table)[N], Enum v) {
  for (const auto& e : table) {
    if (e.value == v) return e.name;
  }
  return "?";
}

template <typename Enum, std::size_t N>
Enum parse_enum(const EnumName<Enum> (&table)[N], const std::string& s,
                const std::string& key) {
  for (const auto& e : table) {
    if (s == e.name) return e.value;
  }
  std::string options;
  for (const auto& e : table) options += std::string(options.empty() ? "" : ", ") + e.name;
  throw ConfigError(key + ": unknown value '" + s + "' (expected one of " + options + ")");
}

// Reads an object section, remembering which keys were consumed so that
// leftovers (typos) can be rejected.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    used_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(path_ + "." + key + ": " + e.what());
    }
  }

  template <typename Enum, std::size_t N>
  void get_enum(const char* key, const EnumName<Enum> (&table)[N], Enum& out) {
    std::string s = name_of(table, out);
    get(key, s);
    out = parse_enum(table, s, path_ + "." + key);
  }

  bool has(const char* key) const { return j_.contains(key); }

  Section child(const char* key) {
    used_.insert(key);
    const auto it = j_.find(key);
    static const json empty = json::object();
    return Section(it == j_.end() ? empty : *it, path_ + "." + key);
  }

  void ignore(const char* key) { used_.insert(key); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.contains(it.key())) {
        throw ConfigError(path_ + ": unknown key '" + it.key() + "'");
      }
    }
  }

  const json& raw(const char* key) const { return j_.at(key); }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

}  // namespace

const char* to_string(SamplerKind k) { return name_of(kSamplerNames, k); }
const char* to_string(ReducerKind k) { return name_of(kReducerNames, k); }
const char* to_string(ClassifierKind k) { return name_of(kClassifierNames, k); }

DerivedSeeds derive_seeds(std::uint64_t global) {
  return {derive_seed(global, "stream"), derive_seed(global, "reducer"),
          derive_seed(global, "sampler"), derive_seed(global, "trainer"),
          derive_seed(global, "model")};
}

std::size_t RunConfig::sampling_dim() const {
  if (sampling_space == SamplingSpace::penultimate) {
    return hidden.empty() ? 0 : hidden.back();
  }
  return dataset.kind == DatasetKind::cifar100 ? cifar::kPixelBytes : dataset.blobs.dim;
}

void RunConfig::validate() const {
  if (dataset.kind == DatasetKind::cifar100) {
    if (dataset.train_path.empty() || dataset.test_path.empty()) {
      throw ConfigError("cifar100 datasets need train_path and test_path");
    }
  }
  if (memory_budget < 1) throw ConfigError("memory_budget must be >= 1");
  for (auto h : hidden) {
    if (h == 0) throw ConfigError("hidden layer widths must be >= 1");
  }
  if (sampling_space == SamplingSpace::penultimate && hidden.empty()) {
    throw ConfigError("penultimate sampling needs at least one hidden layer");
  }
  sampler::SamplerParams probe = sampler;
  probe.m = 1;
  probe.validate();
  tsne.validate();
  loss.validate();
  train.validate();
  if (reducer == ReducerKind::none && sampling_dim() > 3) {
    throw ConfigError("reducer 'none' is only allowed for inputs of width <= 3");
  }
  if (reducer == ReducerKind::pca && tsne.target_dim > sampling_dim()) {
    throw ConfigError("reducer target_dim exceeds the sampling width");
  }
}

std::string to_json(const RunConfig& c) {
  ordered_json j;
  j["seed"] = c.seed;

  auto& d = j["dataset"];
  d["kind"] = name_of(kDatasetNames, c.dataset.kind);
  d["num_classes"] = c.dataset.blobs.num_classes;
  d["per_class"] = c.dataset.blobs.per_class;
  d["per_class_counts"] = c.dataset.blobs.per_class_counts;
  d["dim"] = c.dataset.blobs.dim;
  d["spread"] = c.dataset.blobs.spread;
  d["outlier_fraction"] = c.dataset.blobs.outlier_fraction;
  d["center_box"] = c.dataset.blobs.center_box;
  d["train_path"] = c.dataset.train_path;
  d["test_path"] = c.dataset.test_path;
  d["classes"] = c.dataset.classes;
  d["per_class_limit"] = c.dataset.per_class_limit;

  auto& s = j["stream"];
  s["mode"] = name_of(kModeNames, c.stream.mode);
  s["classes_per_task"] = c.stream.classes_per_task;
  s["fuzz_percent"] = c.stream.fuzz_percent;
  s["class_order"] = c.stream.class_order ? ordered_json(*c.stream.class_order)
                                          : ordered_json(nullptr);

  auto& sp = j["sampler"];
  sp["kind"] = name_of(kSamplerNames, c.sampler_kind);
  sp["n"] = c.sampler.n;
  sp["r0"] = c.sampler.r0;
  sp["delta_r"] = c.sampler.delta_r;
  sp["max_adapt"] = c.sampler.max_adapt;

  auto& r = j["reducer"];
  r["kind"] = name_of(kReducerNames, c.reducer);
  r["space"] = name_of(kSpaceNames, c.sampling_space);
  r["target_dim"] = c.tsne.target_dim;
  r["perplexity"] = c.tsne.perplexity;
  r["iterations"] = c.tsne.iterations;
  r["learning_rate"] = c.tsne.learning_rate;
  r["early_exaggeration"] = c.tsne.early_exaggeration;
  r["exaggeration_iterations"] = c.tsne.exaggeration_iterations;
  r["initial_momentum"] = c.tsne.initial_momentum;
  r["final_momentum"] = c.tsne.final_momentum;
  r["momentum_switch"] = c.tsne.momentum_switch;
  r["init"] = name_of(kInitNames, c.tsne.init);

  j["loss"] = {{"temperature", c.loss.temperature}, {"beta", c.loss.beta}};

  auto& t = j["train"];
  t["epochs"] = c.train.epochs;
  t["batch_size"] = c.train.batch_size;
  t["learning_rate"] = c.train.learning_rate;
  t["momentum"] = c.train.momentum;
  t["hidden"] = c.hidden;

  j["memory_budget"] = c.memory_budget;
  j["classifier"] = name_of(kClassifierNames, c.classifier);
  j["output_dir"] = c.output_dir;
  j["record_seconds"] = c.record_seconds;
  j["export_embeddings"] = c.export_embeddings;

  const DerivedSeeds ds = derive_seeds(c.seed);
  j["derived_seeds"] = {{"stream", ds.stream},   {"reducer", ds.reducer},
                        {"sampler", ds.sampler}, {"trainer", ds.trainer},
                        {"model", ds.model}};
  return j.dump(2);
}

RunConfig config_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  RunConfig c;
  Section top(root, "config");
  top.get("seed", c.seed);
  top.ignore("derived_seeds");

  {
    Section d = top.child("dataset");
    d.get_enum("kind", kDatasetNames, c.dataset.kind);
    d.get("num_classes", c.dataset.blobs.num_classes);
    d.get("per_class", c.dataset.blobs.per_class);
    d.get("per_class_counts", c.dataset.blobs.per_class_counts);
    d.get("dim", c.dataset.blobs.dim);
    d.get("spread", c.dataset.blobs.spread);
    d.get("outlier_fraction", c.dataset.blobs.outlier_fraction);
    d.get("center_box", c.dataset.blobs.center_box);
    d.get("train_path", c.dataset.train_path);
    d.get("test_path", c.dataset.test_path);
    d.get("classes", c.dataset.classes);
    d.get("per_class_limit", c.dataset.per_class_limit);
    d.finish();
  }
  {
    Section s = top.child("stream");
    s.get_enum("mode", kModeNames, c.stream.mode);
    s.get("classes_per_task", c.stream.classes_per_task);
    s.get("fuzz_percent", c.stream.fuzz_percent);
    s.ignore("class_order");
    if (s.has("class_order") && !s.raw("class_order").is_null()) {
      std::vector<int> order;
      s.get("class_order", order);
      c.stream.class_order = std::move(order);
    }
    s.finish();
  }
  {
    Section sp = top.child("sampler");
    sp.get_enum("kind", kSamplerNames, c.sampler_kind);
    sp.get("n", c.sampler.n);
    sp.get("r0", c.sampler.r0);
    sp.get("delta_r", c.sampler.delta_r);
    sp.get("max_adapt", c.sampler.max_adapt);
    sp.finish();
  }
  {
    Section r = top.child("reducer");
    r.get_enum("kind", kReducerNames, c.reducer);
    r.get_enum("space", kSpaceNames, c.sampling_space);
    r.get("target_dim", c.tsne.target_dim);
    r.get("perplexity", c.tsne.perplexity);
    r.get("iterations", c.tsne.iterations);
    r.get("learning_rate", c.tsne.learning_rate);
    r.get("early_exaggeration", c.tsne.early_exaggeration);
    r.get("exaggeration_iterations", c.tsne.exaggeration_iterations);
    r.get("initial_momentum", c.tsne.initial_momentum);
    r.get("final_momentum", c.tsne.final_momentum);
    r.get("momentum_switch", c.tsne.momentum_switch);
    r.get_enum("init", kInitNames, c.tsne.init);
    r.finish();
  }
  {
    Section l = top.child("loss");
    l.get("temperature", c.loss.temperature);
    l.get("beta", c.loss.beta);
    l.finish();
  }
  {
    Section t = top.child("train");
    t.get("epochs", c.train.epochs);
    t.get("batch_size", c.train.batch_size);
    t.get("learning_rate", c.train.learning_rate);
    t.get("momentum", c.train.momentum);
    t.get("hidden", c.hidden);
    t.finish();
  }
  top.get("memory_budget", c.memory_budget);
  top.get_enum("classifier", kClassifierNames, c.classifier);
  top.get("output_dir", c.output_dir);
  top.get("record_seconds", c.record_seconds);
  top.get("export_embeddings", c.export_embeddings);
  top.finish();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_json(buf.str());
}

}  // namespace cil::harness
