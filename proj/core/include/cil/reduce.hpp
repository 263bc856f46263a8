#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cil/dataset.hpp"
#include "cil/matrix.hpp"

namespace cil::reduce {

/// N x D input rows; row i is source example i.
using FeatureMatrix = Matrix;

/// N x d reduced points. Row i corresponds to source_indices[i].
struct Embedding {
  Matrix points;
  std::vector<std::size_t> source_indices;
  /// Set when a reducer fell back to a simpler method.
  std::vector<std::string> warnings;

  std::size_t rows() const noexcept { return points.rows; }
  std::size_t cols() const noexcept { return points.cols; }

  /// Wraps `points` with identity source indices.
  static Embedding identity(Matrix points);
};

FeatureMatrix to_feature_matrix(std::span<const LabeledExample> examples);

// ---------------------------------------------------------------- PCA

struct PcaFit {
  std::vector<double> mean;       // D
  Matrix components;              // d x D, unit rows (zero for null variance)
  std::vector<double> variances;  // d, descending
};

/// Principal directions from the sample covariance. Each component is
/// oriented so that its largest-magnitude loading is positive.
PcaFit pca_fit(const FeatureMatrix& x, std::size_t d);

/// Mean-centred projection onto the top-d principal directions.
/// Throws ConfigError unless 1 <= d <= min(N, D).
Embedding pca_reduce(const FeatureMatrix& x, std::size_t d);

// ---------------------------------------------------------------- t-SNE

enum class TsneInit { pca, random };

struct TsneConfig {
  std::size_t target_dim = 2;
  double perplexity = 30.0;
  int iterations = 500;
  double learning_rate = 200.0;
  double early_exaggeration = 12.0;
  int exaggeration_iterations = 100;
  double initial_momentum = 0.5;
  double final_momentum = 0.8;
  int momentum_switch = 250;
  std::uint64_t seed = 0;
  TsneInit init = TsneInit::pca;

  void validate() const;
  bool operator==(const TsneConfig&) const = default;
};

/// Requested perplexity capped at (N-1)/3, but never below 2.
double effective_perplexity(std::size_t n, double requested);

/// Row-stochastic P(j|i) with Gaussian bandwidths found by bisection so that
/// each row's entropy is log2(perplexity) bits (tolerance 1e-5, 50 steps).
Matrix conditional_affinities(const FeatureMatrix& x, double perplexity);

/// (P + P^T) / 2N; sums to one.
Matrix joint_affinities(const Matrix& conditional);

/// KL(P || Q) with Q from the Student-t kernel on the rows of y.
double kl_divergence(const Matrix& p, const Matrix& y);

/// d KL(P || Q) / d y.
Matrix kl_gradient(const Matrix& p, const Matrix& y);

struct TsneResult {
  Embedding embedding;
  /// KL(P || Q) against the unexaggerated P, before each update.
  std::vector<double> kl_history;
};

/// Exact O(N^2) t-SNE. Falls back to pca_reduce (with a warning) when N < 4
/// or all rows coincide.
TsneResult tsne_run(const FeatureMatrix& x, const TsneConfig& cfg);
Embedding tsne_reduce(const FeatureMatrix& x, const TsneConfig& cfg);

// ---------------------------------------------------------------- export

/// CSV with header `index,dim0,dim1,...`; index is the source index.
std::string embedding_csv(const Embedding& e);
void write_embedding_csv(const std::filesystem::path& path, const Embedding& e);

}  // namespace cil::reduce
