// cilbench: run class-incremental experiments, n-ablations and the
// sampler/learner property suite from a JSON config.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cil/error.hpp"
#include "cil/experiment.hpp"
#include "cil/property_suite.hpp"
#include "cil/run_config.hpp"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::vector<int> values{0, 3, 5, 8};
  std::vector<std::uint64_t> seeds;
};

cil::harness::RunConfig resolve(const Options& o) {
  auto cfg = cil::harness::load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (!o.out.empty()) cfg.output_dir = o.out;
  cfg.validate();
  return cfg;
}

void print_records(const std::vector<cil::harness::MetricsRecord>& records) {
  for (const auto& r : records) {
    std::printf("task %d  acc %.4f  avg %.4f  exemplars %zu\n", r.task_index, r.accuracy,
                r.average_accuracy, r.exemplars);
    for (const auto& w : r.warnings) std::fprintf(stderr, "warning: task %d: %s\n",
                                                  r.task_index, w.c_str());
  }
}

int cmd_run(const Options& o) {
  const auto cfg = resolve(o);
  const auto result = cil::harness::run_experiment(cfg);
  cil::harness::emit_results(result, cfg, cfg.output_dir);
  print_records(result.records);
  std::printf("results written to %s\n", cfg.output_dir.c_str());
  return 0;
}

int cmd_ablate(const Options& o) {
  const auto cfg = resolve(o);
  std::vector<std::uint64_t> seeds = o.seeds;
  if (seeds.empty()) seeds.push_back(cfg.seed);
  const auto cells = cil::harness::run_n_ablation(cfg, o.values, seeds, cfg.output_dir);
  for (const auto& c : cells) {
    const double aa = c.records.empty() ? 0.0 : c.records.back().average_accuracy;
    std::printf("n=%d seed=%llu  AA %.4f\n", c.n, static_cast<unsigned long long>(c.seed), aa);
  }
  std::printf("ablation written to %s\n", (std::filesystem::path(cfg.output_dir) / "ablation.csv").string().c_str());
  return 0;
}

int cmd_verify(const Options& o) {
  const auto cfg = resolve(o);
  bool all = true;
  for (const auto& r : cil::checks::run_property_suite(cfg.seed)) {
    std::printf("%s\n", cil::checks::format(r).c_str());
    all = all && r.passed;
  }
  return all ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"class-incremental learning workbench"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--out", o.out, "output directory (overrides config)");
  app.add_option("--seed", o.seed, "global seed (overrides config)");

  auto* run = app.add_subcommand("run", "run one experiment");
  run->add_option("--config", o.config, "JSON run config")->required()->check(CLI::ExistingFile);

  auto* ablate = app.add_subcommand("ablate-n", "sweep the DSS neighbor count n");
  ablate->add_option("--config", o.config, "JSON run config")->required()->check(CLI::ExistingFile);
  ablate->add_option("--values", o.values, "n values")->delimiter(',');
  ablate->add_option("--seeds", o.seeds, "seeds shared across n values")->delimiter(',');

  auto* verify = app.add_subcommand("verify", "run the property and oracle suite");
  verify->add_option("--config", o.config, "JSON run config")->required()->check(CLI::ExistingFile);

  // Global options are accepted after the subcommand too.
  for (auto* sub : {run, ablate, verify}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(o);
    if (*ablate) return cmd_ablate(o);
    return cmd_verify(o);
  } catch (const cil::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const cil::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
