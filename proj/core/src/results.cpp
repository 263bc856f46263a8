#include <cstdio>
#include <fstream>

#include "cil/error.hpp"
#include "cil/experiment.hpp"
#include "cil/trainer.hpp"
#include "json.hpp"

namespace cil::harness {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw IoError("cannot create output directory " + dir.string());
  }
}

}  // namespace

std::string metrics_csv(std::span<const MetricsRecord> records) {
  std::string out = "task,accuracy,avg_accuracy,exemplars,seconds\n";
  for (const auto& r : records) {
    out += std::to_string(r.task_index) + ',' + fmt(r.accuracy) + ',' +
           fmt(r.average_accuracy) + ',' + std::to_string(r.exemplars) + ',' +
           fmt(r.seconds) + '\n';
  }
  return out;
}

void emit_results(const ExperimentResult& result, const RunConfig& cfg,
                  const std::filesystem::path& dir) {
  ensure_dir(dir);
  write_text(dir / "metrics.csv", metrics_csv(result.records));
  write_text(dir / "config.json", to_json(cfg) + '\n');
  write_text(dir / "exemplars.json", result.store.to_json() + '\n');
  write_text(dir / "stream.json", stream::manifest_json(result.tasks) + '\n');

  nlohmann::ordered_json side;
  side["layer_sizes"] = result.model.layer_sizes();
  side["unit_classes"] = result.unit_classes;
  side["seed"] = cfg.seed;
  side["config"] = nlohmann::ordered_json::parse(to_json(cfg));
  learner::save_checkpoint(dir / "model.bin", result.model, side.dump(2));

  if (!result.embeddings.empty()) {
    ensure_dir(dir / "embeddings");
    for (const auto& e : result.embeddings) {
      reduce::write_embedding_csv(
          dir / "embeddings" /
              ("task" + std::to_string(e.task_index) + "_class" +
               std::to_string(e.class_id) + ".csv"),
          e.embedding);
    }
  }

  bool any_warning = false;
  nlohmann::ordered_json warnings = nlohmann::ordered_json::array();
  for (const auto& r : result.records) {
    for (const auto& w : r.warnings) {
      warnings.push_back({{"task", r.task_index}, {"warning", w}});
      any_warning = true;
    }
  }
  if (any_warning) write_text(dir / "warnings.json", warnings.dump(2) + '\n');
}

std::vector<AblationCell> run_n_ablation(const RunConfig& base,
                                         std::span<const int> n_values,
                                         std::span<const std::uint64_t> seeds,
                                         const std::filesystem::path& dir) {
  if (n_values.empty()) throw ConfigError("ablation needs at least one n value");
  if (seeds.empty()) throw ConfigError("ablation needs at least one seed");
  std::vector<AblationCell> cells;
  for (int n : n_values) {
    if (n < 0) throw ConfigError("ablation n values must be >= 0");
    for (auto seed : seeds) {
      RunConfig cfg = base;
      cfg.sampler.n = n;
      cfg.seed = seed;
      auto result = run_experiment(cfg);
      if (!dir.empty()) {
        emit_results(result, cfg,
                     dir / ("n" + std::to_string(n) + "_seed" + std::to_string(seed)));
      }
      cells.push_back({n, seed, std::move(result.records)});
    }
  }
  if (!dir.empty()) write_text(dir / "ablation.csv", ablation_csv(cells));
  return cells;
}

std::string ablation_csv(std::span<const AblationCell> cells) {
  std::string out = "n,seed,task,accuracy,avg_accuracy\n";
  for (const auto& c : cells) {
    for (const auto& r : c.records) {
      out += std::to_string(c.n) + ',' + std::to_string(c.seed) + ',' +
             std::to_string(r.task_index) + ',' + fmt(r.accuracy) + ',' +
             fmt(r.average_accuracy) + '\n';
    }
  }
  return out;
}

}  // namespace cil::harness
