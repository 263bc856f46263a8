#include <benchmark/benchmark.h>

#include "cil/blobs.hpp"
#include "cil/trainer.hpp"

using namespace cil;

static void BM_TrainEpoch(benchmark::State& state) {
  const auto ds = make_blobs(10, 200, 32, 1.0, 0.1, 6);
  const learner::MlpModel model(32, {128, 64}, 10, 7);
  learner::TrainConfig tc;
  tc.epochs = 1;
  tc.batch_size = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_task(model, ds.train, nullptr, learner::LossConfig{}, tc));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ds.train.size()));
}
BENCHMARK(BM_TrainEpoch)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_DistilledBatch(benchmark::State& state) {
  const auto ds = make_blobs(10, 20, 32, 1.0, 0.0, 8);
  const learner::MlpModel student(32, {128, 64}, 10, 9);
  const auto teacher = learner::TeacherSnapshot{learner::MlpModel(32, {128, 64}, 5, 10), 5};
  const std::span<const LabeledExample> batch(ds.train.data(), 128);
  for (auto _ : state) {
    benchmark::DoNotOptimize(learner::batch_loss(student, batch, &teacher, learner::LossConfig{}));
  }
}
BENCHMARK(BM_DistilledBatch);
