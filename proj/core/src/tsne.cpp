#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cil/error.hpp"
#include "cil/random.hpp"
#include "cil/reduce.hpp"

namespace cil::reduce {

namespace {

constexpr double kEntropyTolerance = 1e-5;
constexpr int kMaxBisectionSteps = 50;
constexpr double kMinGain = 0.01;
constexpr double kInitScale = 1e-4;
constexpr double kTiny = 1e-300;

Matrix pairwise_squared_distances(const Matrix& x) {
  Matrix d(x.rows, x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t j = i + 1; j < x.rows; ++j) {
      const double s = squared_distance(x.row(i), x.row(j));
      d(i, j) = s;
      d(j, i) = s;
    }
  }
  return d;
}

bool all_rows_equal(const Matrix& x) {
  for (std::size_t i = 1; i < x.rows; ++i) {
    if (!std::equal(x.row(i).begin(), x.row(i).end(), x.row(0).begin())) {
      return false;
    }
  }
  return true;
}

Matrix initial_layout(const FeatureMatrix& x, const TsneConfig& cfg) {
  const std::size_t n = x.rows;
  const std::size_t d = cfg.target_dim;
  if (cfg.init == TsneInit::pca && d <= std::min(n, x.cols)) {
    Matrix y = pca_reduce(x, d).points;
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += y(i, 0);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) var += (y(i, 0) - mean) * (y(i, 0) - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    if (sd > 0.0) {
      for (auto& v : y.data) v *= kInitScale / sd;
      return y;
    }
  }
  Rng rng(cfg.seed);
  std::normal_distribution<double> noise(0.0, kInitScale);
  Matrix y(n, d);
  for (auto& v : y.data) v = noise(rng);
  return y;
}

// Student-t numerators 1 / (1 + |y_i - y_j|^2) and their off-diagonal sum.
double student_numerators(const Matrix& y, Matrix& num) {
  const std::size_t n = y.rows;
  num = Matrix(n, n);
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 1.0 / (1.0 + squared_distance(y.row(i), y.row(j)));
      num(i, j) = v;
      num(j, i) = v;
      z += 2.0 * v;
    }
  }
  return z;
}

double kl_from(const Matrix& p, const Matrix& num, double z) {
  double kl = 0.0;
  for (std::size_t i = 0; i < p.rows; ++i) {
    for (std::size_t j = 0; j < p.cols; ++j) {
      if (i == j) continue;
      const double pij = p(i, j);
      if (pij <= 0.0) continue;
      const double qij = std::max(num(i, j) / z, kTiny);
      kl += pij * std::log(pij / qij);
    }
  }
  return kl;
}

void gradient_from(const Matrix& p, double p_scale, const Matrix& y,
                   const Matrix& num, double z, Matrix& grad) {
  const std::size_t n = y.rows;
  const std::size_t d = y.cols;
  grad = Matrix(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    auto gi = grad.row(i);
    const auto yi = y.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double coeff = 4.0 * (p_scale * p(i, j) - num(i, j) / z) * num(i, j);
      const auto yj = y.row(j);
      for (std::size_t k = 0; k < d; ++k) gi[k] += coeff * (yi[k] - yj[k]);
    }
  }
}

}  // namespace

void TsneConfig::validate() const {
  if (target_dim < 1) throw ConfigError("t-SNE target_dim must be >= 1");
  if (iterations < 1) throw ConfigError("t-SNE iterations must be >= 1");
  if (!(perplexity > 0.0)) throw ConfigError("t-SNE perplexity must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("t-SNE learning_rate must be positive");
  if (!(early_exaggeration >= 1.0)) {
    throw ConfigError("t-SNE early_exaggeration must be >= 1");
  }
  if (exaggeration_iterations < 0 || momentum_switch < 0) {
    throw ConfigError("t-SNE schedule boundaries must be non-negative");
  }
}

double effective_perplexity(std::size_t n, double requested) {
  const double cap = (static_cast<double>(n) - 1.0) / 3.0;
  return std::max(2.0, std::min(requested, cap));
}

Matrix conditional_affinities(const FeatureMatrix& x, double perplexity) {
  const std::size_t n = x.rows;
  if (n < 2) throw ConfigError("affinities need at least two rows");
  if (!(perplexity > 1.0) || perplexity > static_cast<double>(n - 1)) {
    throw ConfigError("perplexity " + std::to_string(perplexity) +
                      " is not attainable with " + std::to_string(n) + " rows");
  }
  const Matrix d2 = pairwise_squared_distances(x);
  const double target = std::log2(perplexity);
  Matrix p(n, n);
  std::vector<double> row(n);

  for (std::size_t i = 0; i < n; ++i) {
    // Shift by the nearest distance so the kernel never underflows.
    double dmin = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) dmin = std::min(dmin, d2(i, j));
    }
    double beta = 1.0;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    for (int step = 0; step < kMaxBisectionSteps; ++step) {
      double sum = 0.0;
      double weighted = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) {
          row[j] = 0.0;
          continue;
        }
        const double shifted = d2(i, j) - dmin;
        row[j] = std::exp(-beta * shifted);
        sum += row[j];
        weighted += shifted * row[j];
      }
      const double entropy_bits = (std::log(sum) + beta * weighted / sum) / std::log(2.0);
      for (std::size_t j = 0; j < n; ++j) row[j] /= sum;
      const double diff = entropy_bits - target;
      if (std::abs(diff) < kEntropyTolerance) break;
      if (diff > 0.0) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = 0.5 * (beta + lo);
      }
    }
    std::copy(row.begin(), row.end(), p.row(i).begin());
  }
  return p;
}

Matrix joint_affinities(const Matrix& conditional) {
  const std::size_t n = conditional.rows;
  Matrix p(n, n);
  const double scale = 1.0 / (2.0 * static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      p(i, j) = (conditional(i, j) + conditional(j, i)) * scale;
    }
  }
  return p;
}

double kl_divergence(const Matrix& p, const Matrix& y) {
  Matrix num;
  const double z = student_numerators(y, num);
  return kl_from(p, num, z);
}

Matrix kl_gradient(const Matrix& p, const Matrix& y) {
  Matrix num;
  const double z = student_numerators(y, num);
  Matrix grad;
  gradient_from(p, 1.0, y, num, z, grad);
  return grad;
}

TsneResult tsne_run(const FeatureMatrix& x, const TsneConfig& cfg) {
  cfg.validate();
  if (x.rows == 0) throw ConfigError("t-SNE on an empty matrix");
  if (!x.all_finite()) throw DataError("t-SNE input has non-finite entries");

  TsneResult result;
  const std::size_t n = x.rows;
  const bool too_small = n < 4;
  if (too_small || all_rows_equal(x)) {
    const std::size_t d = std::min({cfg.target_dim, n, x.cols});
    result.embedding = pca_reduce(x, d);
    if (d < cfg.target_dim) {
      Matrix padded(n, cfg.target_dim);
      for (std::size_t i = 0; i < n; ++i) {
        std::copy(result.embedding.points.row(i).begin(),
                  result.embedding.points.row(i).end(), padded.row(i).begin());
      }
      result.embedding.points = std::move(padded);
    }
    result.embedding.warnings.push_back(
        too_small ? "t-SNE needs at least 4 rows; used PCA"
                  : "t-SNE input has no distinct rows; used PCA");
    return result;
  }

  const double perplexity = effective_perplexity(n, cfg.perplexity);
  const Matrix p = joint_affinities(conditional_affinities(x, perplexity));
  Matrix y = initial_layout(x, cfg);
  const std::size_t d = cfg.target_dim;
  Matrix velocity(n, d);
  Matrix gains(n, d, 1.0);
  Matrix num;
  Matrix grad;
  result.kl_history.reserve(static_cast<std::size_t>(cfg.iterations));

  for (int it = 0; it < cfg.iterations; ++it) {
    const double exaggeration =
        it < cfg.exaggeration_iterations ? cfg.early_exaggeration : 1.0;
    const double momentum =
        it < cfg.momentum_switch ? cfg.initial_momentum : cfg.final_momentum;

    const double z = student_numerators(y, num);
    result.kl_history.push_back(kl_from(p, num, z));
    gradient_from(p, exaggeration, y, num, z, grad);

    for (std::size_t k = 0; k < y.data.size(); ++k) {
      const bool same_sign = (grad.data[k] > 0.0) == (velocity.data[k] > 0.0);
      gains.data[k] = same_sign ? std::max(gains.data[k] * 0.8, kMinGain)
                                : gains.data[k] + 0.2;
      velocity.data[k] =
          momentum * velocity.data[k] - cfg.learning_rate * gains.data[k] * grad.data[k];
      y.data[k] += velocity.data[k];
    }
    for (std::size_t c = 0; c < d; ++c) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += y(i, c);
      mean /= static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) y(i, c) -= mean;
    }
  }
  if (!y.all_finite()) throw DataError("t-SNE produced non-finite coordinates");
  result.embedding = Embedding::identity(std::move(y));
  return result;
}

Embedding tsne_reduce(const FeatureMatrix& x, const TsneConfig& cfg) {
  return tsne_run(x, cfg).embedding;
}

}  // namespace cil::reduce
