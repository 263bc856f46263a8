#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cil::learner {

/// Floor applied to every probability before a log.
inline constexpr double kProbabilityFloor = 1e-12;

struct LossConfig {
  double temperature = 2.0;  ///< distillation temperature, > 1
  double beta = 0.5;         ///< weight of the distillation term

  void validate() const;
  bool operator==(const LossConfig&) const = default;
};

/// Plain softmax over every logit, with max subtraction.
std::vector<double> softmax(std::span<const double> logits);

/// exp(z_i / T) / sum_{j<k} exp(z_j / T) over the first k logits only.
/// Throws ConfigError for k == 0 or T <= 1, ShapeError for k > |logits|.
std::vector<double> distilled_softmax(std::span<const double> logits, double T,
                                      std::size_t k);

/// -log(probs[target]) with the probability floor.
double ce_loss(std::span<const double> probs, std::size_t target);

/// Cross-entropy between teacher and student distilled distributions over the
/// teacher's classes (the first |teacher_logits| student logits).
double kd_loss(std::span<const double> teacher_logits,
               std::span<const double> student_logits, double T);

/// beta * kd + (1 - beta) * ce
double cross_distilled_loss(double kd, double ce, double beta);

/// Shannon entropy in nats.
double entropy(std::span<const double> probs);

struct ExampleLoss {
  double loss = 0.0;
  std::vector<double> dlogits;  ///< d loss / d student logits
};

/// Cross-entropy over every class when `teacher_logits` is empty, otherwise
/// the cross-distilled loss.
ExampleLoss example_loss(std::span<const double> student_logits,
                         std::size_t target,
                         std::span<const double> teacher_logits,
                         const LossConfig& cfg);

}  // namespace cil::learner
