#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cil::learner {

/// Fully connected layer; weights are out x in, row-major.
struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  bool operator==(const DenseLayer&) const = default;
};

/// Feed-forward classifier: rectified hidden layers and a linear head whose
/// width equals the number of classes seen so far.
class MlpModel {
 public:
  MlpModel() = default;
  /// He-uniform hidden layers; the head uses fan-in uniform init.
  MlpModel(std::size_t input, const std::vector<std::size_t>& hidden,
           std::size_t outputs, std::uint64_t seed);
  /// Throws ShapeError if consecutive widths do not chain.
  explicit MlpModel(std::vector<DenseLayer> layers);

  std::size_t input_width() const;
  std::size_t output_width() const;
  /// Width of the features feeding the head.
  std::size_t feature_width() const;
  std::vector<std::size_t> layer_sizes() const;

  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  std::vector<DenseLayer>& layers() noexcept { return layers_; }

  std::size_t parameter_count() const;
  /// Weights then bias, layer by layer.
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> values);
  bool all_finite() const;

  bool operator==(const MlpModel&) const = default;

 private:
  std::vector<DenseLayer> layers_;
};

struct ForwardResult {
  std::vector<double> logits;
  std::vector<double> penultimate;
};

/// Throws ShapeError when |x| differs from the input width.
ForwardResult forward(const MlpModel& model, std::span<const double> x);

/// Input followed by the output of every layer (rectified for hidden layers).
struct ForwardCache {
  std::vector<std::vector<double>> activations;
  std::span<const double> logits() const { return activations.back(); }
};
ForwardCache forward_cached(const MlpModel& model, std::span<const double> x);

/// Parameter-shaped accumulator.
struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  explicit Gradients(const MlpModel& model);
  void scale(double factor);
  /// Same layout as MlpModel::parameters().
  std::vector<double> flatten() const;
};

/// Adds d(objective)/d(parameters) given d(objective)/d(logits).
void backward(const MlpModel& model, const ForwardCache& cache,
              std::span<const double> dlogits, Gradients& grads);

/// Appends `q_new` head units. Existing parameters are untouched; new rows
/// draw from U(-1/sqrt(fan_in), 1/sqrt(fan_in)) and new biases are zero.
MlpModel grow_head(MlpModel model, std::size_t q_new, std::uint64_t seed);

/// Argmax over all logits; ties go to the lowest index.
std::size_t predict(const MlpModel& model, std::span<const double> x);
std::size_t argmax(std::span<const double> values);

}  // namespace cil::learner
