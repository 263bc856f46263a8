#include "cil/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "cil/error.hpp"
#include "cil/random.hpp"

namespace cil::learner {

TeacherSnapshot TeacherSnapshot::capture(const MlpModel& model) {
  if (model.output_width() == 0) throw ConfigError("teacher has no classes");
  return {model, model.output_width()};
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw ConfigError("momentum must be in [0, 1)");
  }
}

BatchLoss batch_loss(const MlpModel& model, std::span<const LabeledExample> batch,
                     const TeacherSnapshot* teacher, const LossConfig& cfg) {
  BatchLoss out{0.0, Gradients(model)};
  if (batch.empty()) return out;
  for (const auto& ex : batch) {
    if (ex.label < 0 || static_cast<std::size_t>(ex.label) >= model.output_width()) {
      throw ShapeError("label " + std::to_string(ex.label) + " outside a head of " +
                       std::to_string(model.output_width()) + " classes");
    }
    const ForwardCache cache = forward_cached(model, ex.features);
    std::vector<double> teacher_logits;
    if (teacher != nullptr) teacher_logits = forward(teacher->model, ex.features).logits;
    const ExampleLoss l = example_loss(cache.logits(), static_cast<std::size_t>(ex.label),
                                       teacher_logits, cfg);
    out.mean_loss += l.loss;
    backward(model, cache, l.dlogits, out.gradients);
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  out.mean_loss *= inv;
  out.gradients.scale(inv);
  return out;
}

TrainResult train_task(MlpModel model, std::span<const LabeledExample> data,
                       const TeacherSnapshot* teacher, const LossConfig& lcfg,
                       const TrainConfig& tcfg) {
  tcfg.validate();
  if (teacher != nullptr) {
    lcfg.validate();
    if (teacher->old_classes > model.output_width()) {
      throw ShapeError("teacher covers more classes than the student");
    }
  }
  if (data.empty()) throw ConfigError("no training data");
  for (const auto& ex : data) {
    if (ex.label < 0 || static_cast<std::size_t>(ex.label) >= model.output_width()) {
      throw ShapeError("label " + std::to_string(ex.label) + " outside a head of " +
                       std::to_string(model.output_width()) + " classes");
    }
  }

  std::vector<std::vector<double>> vel_w;
  std::vector<std::vector<double>> vel_b;
  for (const auto& l : model.layers()) {
    vel_w.emplace_back(l.weights.size(), 0.0);
    vel_b.emplace_back(l.bias.size(), 0.0);
  }

  TrainResult result;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(tcfg.seed);
  std::vector<LabeledExample> batch;

  for (int epoch = 0; epoch < tcfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += tcfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + tcfg.batch_size);
      batch.clear();
      for (std::size_t k = start; k < end; ++k) batch.push_back(data[order[k]]);

      BatchLoss bl = batch_loss(model, batch, teacher, lcfg);
      if (!std::isfinite(bl.mean_loss)) {
        throw DivergenceError(epoch, "non-finite loss");
      }
      epoch_loss += bl.mean_loss * static_cast<double>(batch.size());

      auto& layers = model.layers();
      for (std::size_t k = 0; k < layers.size(); ++k) {
        auto& w = layers[k].weights;
        auto& b = layers[k].bias;
        const auto& gw = bl.gradients.weights[k];
        const auto& gb = bl.gradients.biases[k];
        for (std::size_t i = 0; i < w.size(); ++i) {
          vel_w[k][i] = tcfg.momentum * vel_w[k][i] + gw[i];
          w[i] -= tcfg.learning_rate * vel_w[k][i];
        }
        for (std::size_t i = 0; i < b.size(); ++i) {
          vel_b[k][i] = tcfg.momentum * vel_b[k][i] + gb[i];
          b[i] -= tcfg.learning_rate * vel_b[k][i];
        }
      }
    }
    const double mean = epoch_loss / static_cast<double>(data.size());
    if (!std::isfinite(mean) || !model.all_finite()) {
      throw DivergenceError(epoch, "non-finite parameters");
    }
    result.loss_trace.push_back(mean);
  }
  result.model = std::move(model);
  return result;
}

int nme_classify(std::span<const double> features,
                 const std::map<int, std::vector<double>>& class_means) {
  if (class_means.empty()) throw ConfigError("no class means");
  int best = class_means.begin()->first;
  double best_d = std::numeric_limits<double>::infinity();
  for (const auto& [cls, mean] : class_means) {
    if (mean.size() != features.size()) throw ShapeError("class mean width mismatch");
    double d = 0.0;
    for (std::size_t k = 0; k < mean.size(); ++k) {
      const double diff = features[k] - mean[k];
      d += diff * diff;
    }
    if (d < best_d) {
      best_d = d;
      best = cls;
    }
  }
  return best;
}

}  // namespace cil::learner
