#include "cil/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "cil/error.hpp"
#include "cil/random.hpp"

namespace cil::learner {

namespace {

DenseLayer make_layer(std::size_t in, std::size_t out, double bound, Rng& rng) {
  DenseLayer l;
  l.in = in;
  l.out = out;
  l.weights.resize(in * out);
  l.bias.assign(out, 0.0);
  std::uniform_real_distribution<double> u(-bound, bound);
  for (auto& w : l.weights) w = u(rng);
  return l;
}

double head_bound(std::size_t fan_in) {
  return fan_in == 0 ? 0.0 : 1.0 / std::sqrt(static_cast<double>(fan_in));
}

}  // namespace

MlpModel::MlpModel(std::size_t input, const std::vector<std::size_t>& hidden,
                   std::size_t outputs, std::uint64_t seed) {
  if (input == 0) throw ConfigError("model input width must be >= 1");
  std::size_t prev = input;
  for (std::size_t k = 0; k < hidden.size(); ++k) {
    if (hidden[k] == 0) throw ConfigError("hidden layer width must be >= 1");
    Rng rng(derive_seed(seed, k, 101));
    layers_.push_back(make_layer(prev, hidden[k],
                                 std::sqrt(6.0 / static_cast<double>(prev)), rng));
    prev = hidden[k];
  }
  Rng rng(derive_seed(seed, hidden.size(), 101));
  layers_.push_back(make_layer(prev, outputs, head_bound(prev), rng));
}

MlpModel::MlpModel(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw ShapeError("model needs at least one layer");
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const auto& l = layers_[k];
    if (l.weights.size() != l.in * l.out || l.bias.size() != l.out) {
      throw ShapeError("layer " + std::to_string(k) + " has inconsistent sizes");
    }
    if (k > 0 && layers_[k - 1].out != l.in) {
      throw ShapeError("layer " + std::to_string(k) + " does not chain");
    }
  }
}

std::size_t MlpModel::input_width() const { return layers_.front().in; }
std::size_t MlpModel::output_width() const { return layers_.back().out; }
std::size_t MlpModel::feature_width() const { return layers_.back().in; }

std::vector<std::size_t> MlpModel::layer_sizes() const {
  std::vector<std::size_t> sizes{layers_.front().in};
  for (const auto& l : layers_) sizes.push_back(l.out);
  return sizes;
}

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weights.size() + l.bias.size();
  return n;
}

std::vector<double> MlpModel::parameters() const {
  std::vector<double> out;
  out.reserve(parameter_count());
  for (const auto& l : layers_) {
    out.insert(out.end(), l.weights.begin(), l.weights.end());
    out.insert(out.end(), l.bias.begin(), l.bias.end());
  }
  return out;
}

void MlpModel::set_parameters(std::span<const double> values) {
  if (values.size() != parameter_count()) throw ShapeError("parameter count mismatch");
  auto it = values.begin();
  for (auto& l : layers_) {
    std::copy(it, it + static_cast<std::ptrdiff_t>(l.weights.size()), l.weights.begin());
    it += static_cast<std::ptrdiff_t>(l.weights.size());
    std::copy(it, it + static_cast<std::ptrdiff_t>(l.bias.size()), l.bias.begin());
    it += static_cast<std::ptrdiff_t>(l.bias.size());
  }
}

bool MlpModel::all_finite() const {
  for (const auto& l : layers_) {
    for (double w : l.weights) if (!std::isfinite(w)) return false;
    for (double b : l.bias) if (!std::isfinite(b)) return false;
  }
  return true;
}

ForwardCache forward_cached(const MlpModel& model, std::span<const double> x) {
  if (x.size() != model.input_width()) {
    throw ShapeError("input width " + std::to_string(x.size()) + " != " +
                     std::to_string(model.input_width()));
  }
  ForwardCache cache;
  cache.activations.reserve(model.layers().size() + 1);
  cache.activations.emplace_back(x.begin(), x.end());
  const auto& layers = model.layers();
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& l = layers[k];
    const auto& a = cache.activations.back();
    std::vector<double> z(l.out);
    for (std::size_t o = 0; o < l.out; ++o) {
      const double* w = l.weights.data() + o * l.in;
      double s = l.bias[o];
      for (std::size_t i = 0; i < l.in; ++i) s += w[i] * a[i];
      z[o] = s;
    }
    if (k + 1 < layers.size()) {
      for (auto& v : z) v = v > 0.0 ? v : 0.0;
    }
    cache.activations.push_back(std::move(z));
  }
  return cache;
}

ForwardResult forward(const MlpModel& model, std::span<const double> x) {
  ForwardCache cache = forward_cached(model, x);
  ForwardResult r;
  r.logits = std::move(cache.activations.back());
  r.penultimate = std::move(cache.activations[cache.activations.size() - 2]);
  return r;
}

Gradients::Gradients(const MlpModel& model) {
  for (const auto& l : model.layers()) {
    weights.emplace_back(l.weights.size(), 0.0);
    biases.emplace_back(l.bias.size(), 0.0);
  }
}

void Gradients::scale(double factor) {
  for (auto& w : weights) for (auto& v : w) v *= factor;
  for (auto& b : biases) for (auto& v : b) v *= factor;
}

std::vector<double> Gradients::flatten() const {
  std::vector<double> out;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    out.insert(out.end(), weights[k].begin(), weights[k].end());
    out.insert(out.end(), biases[k].begin(), biases[k].end());
  }
  return out;
}

void backward(const MlpModel& model, const ForwardCache& cache,
              std::span<const double> dlogits, Gradients& grads) {
  const auto& layers = model.layers();
  if (dlogits.size() != model.output_width()) throw ShapeError("dlogits width mismatch");
  std::vector<double> delta(dlogits.begin(), dlogits.end());
  for (std::size_t k = layers.size(); k-- > 0;) {
    const auto& l = layers[k];
    const auto& a = cache.activations[k];
    auto& gw = grads.weights[k];
    auto& gb = grads.biases[k];
    for (std::size_t o = 0; o < l.out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      gb[o] += d;
      double* g = gw.data() + o * l.in;
      for (std::size_t i = 0; i < l.in; ++i) g[i] += d * a[i];
    }
    if (k == 0) break;
    std::vector<double> prev(l.in, 0.0);
    for (std::size_t o = 0; o < l.out; ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      const double* w = l.weights.data() + o * l.in;
      for (std::size_t i = 0; i < l.in; ++i) prev[i] += d * w[i];
    }
    // Rectifier derivative, read off the stored post-activation.
    for (std::size_t i = 0; i < l.in; ++i) {
      if (!(a[i] > 0.0)) prev[i] = 0.0;
    }
    delta = std::move(prev);
  }
}

MlpModel grow_head(MlpModel model, std::size_t q_new, std::uint64_t seed) {
  if (q_new < 1) throw ConfigError("grow_head needs q_new >= 1");
  auto& head = model.layers().back();
  Rng rng(seed);
  std::uniform_real_distribution<double> u(-head_bound(head.in), head_bound(head.in));
  head.weights.reserve(head.weights.size() + q_new * head.in);
  for (std::size_t k = 0; k < q_new * head.in; ++k) head.weights.push_back(u(rng));
  head.bias.resize(head.out + q_new, 0.0);
  head.out += q_new;
  return model;
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw ShapeError("argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] > values[best]) best = k;
  }
  return best;
}

std::size_t predict(const MlpModel& model, std::span<const double> x) {
  return argmax(forward(model, x).logits);
}

}  // namespace cil::learner
