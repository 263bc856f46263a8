#include "cil/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cil/error.hpp"

namespace cil::learner {

namespace {

std::vector<double> tempered_softmax(std::span<const double> logits, double T) {
  std::vector<double> p(logits.size());
  if (logits.empty()) return p;
  const double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp((logits[i] - top) / T);
    sum += p[i];
  }
  for (auto& v : p) v /= sum;
  return p;
}

}  // namespace

void LossConfig::validate() const {
  if (!(temperature > 1.0)) throw ConfigError("temperature must be > 1");
  if (!(beta >= 0.0 && beta <= 1.0)) throw ConfigError("beta must be in [0, 1]");
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) throw ConfigError("softmax of an empty vector");
  return tempered_softmax(logits, 1.0);
}

std::vector<double> distilled_softmax(std::span<const double> logits, double T,
                                      std::size_t k) {
  if (k == 0) throw ConfigError("distilled softmax over zero classes");
  if (k > logits.size()) {
    throw ShapeError("distilled softmax over " + std::to_string(k) + " of " +
                     std::to_string(logits.size()) + " logits");
  }
  if (!(T > 1.0)) throw ConfigError("temperature must be > 1");
  return tempered_softmax(logits.first(k), T);
}

double ce_loss(std::span<const double> probs, std::size_t target) {
  if (target >= probs.size()) {
    throw ShapeError("target " + std::to_string(target) + " outside " +
                     std::to_string(probs.size()) + " classes");
  }
  return -std::log(std::max(probs[target], kProbabilityFloor));
}

double kd_loss(std::span<const double> teacher_logits,
               std::span<const double> student_logits, double T) {
  const std::size_t old = teacher_logits.size();
  if (old == 0) throw ConfigError("distillation needs at least one teacher class");
  const auto teacher = distilled_softmax(teacher_logits, T, old);
  const auto student = distilled_softmax(student_logits, T, old);
  double loss = 0.0;
  for (std::size_t i = 0; i < old; ++i) {
    loss -= teacher[i] * std::log(std::max(student[i], kProbabilityFloor));
  }
  return loss;
}

double cross_distilled_loss(double kd, double ce, double beta) {
  return beta * kd + (1.0 - beta) * ce;
}

double entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

ExampleLoss example_loss(std::span<const double> student_logits,
                         std::size_t target,
                         std::span<const double> teacher_logits,
                         const LossConfig& cfg) {
  ExampleLoss out;
  const auto probs = softmax(student_logits);
  const double ce = ce_loss(probs, target);
  out.dlogits = probs;
  out.dlogits[target] -= 1.0;
  if (teacher_logits.empty()) {
    out.loss = ce;
    return out;
  }

  const double T = cfg.temperature;
  const std::size_t old = teacher_logits.size();
  if (old > student_logits.size()) {
    throw ShapeError("teacher has more classes than the student");
  }
  const double kd = kd_loss(teacher_logits, student_logits, T);
  const auto teacher = distilled_softmax(teacher_logits, T, old);
  const auto student = distilled_softmax(student_logits, T, old);
  for (auto& g : out.dlogits) g *= 1.0 - cfg.beta;
  for (std::size_t i = 0; i < old; ++i) {
    out.dlogits[i] += cfg.beta * (student[i] - teacher[i]) / T;
  }
  out.loss = cross_distilled_loss(kd, ce, cfg.beta);
  return out;
}

}  // namespace cil::learner
