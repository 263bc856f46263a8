#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cil/error.hpp"
#include "cil/reduce.hpp"

namespace cil::reduce {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Eigenvalues below this fraction of the trace are treated as zero variance.
constexpr double kNullVariance = 1e-12;

void orient(std::span<double> v) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (std::abs(v[k]) > std::abs(v[best])) best = k;
  }
  if (v[best] < 0.0) {
    for (auto& x : v) x = -x;
  }
}

}  // namespace

Embedding Embedding::identity(Matrix points) {
  Embedding e;
  e.source_indices.resize(points.rows);
  std::iota(e.source_indices.begin(), e.source_indices.end(), std::size_t{0});
  e.points = std::move(points);
  return e;
}

FeatureMatrix to_feature_matrix(std::span<const LabeledExample> examples) {
  if (examples.empty()) return {};
  FeatureMatrix m(examples.size(), examples.front().features.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& f = examples[i].features;
    if (f.size() != m.cols) throw ShapeError("examples have mixed widths");
    std::copy(f.begin(), f.end(), m.row(i).begin());
  }
  return m;
}

PcaFit pca_fit(const FeatureMatrix& x, std::size_t d) {
  const std::size_t n = x.rows;
  const std::size_t dim = x.cols;
  if (n == 0 || dim == 0) throw ConfigError("pca on an empty matrix");
  if (d < 1 || d > std::min(n, dim)) {
    throw ConfigError("pca target dimension " + std::to_string(d) +
                      " outside [1, " + std::to_string(std::min(n, dim)) + "]");
  }
  if (!x.all_finite()) throw DataError("pca input has non-finite entries");

  Eigen::Map<const RowMatrix> raw(x.data.data(), static_cast<Eigen::Index>(n),
                                  static_cast<Eigen::Index>(dim));
  const Eigen::RowVectorXd mean = raw.colwise().mean();
  const RowMatrix centered = raw.rowwise() - mean;

  PcaFit fit;
  fit.mean.assign(mean.data(), mean.data() + dim);
  fit.components = Matrix(d, dim);
  fit.variances.assign(d, 0.0);

  // Eigenvalues come back ascending; walk from the top.
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  if (n <= dim) {
    const Eigen::MatrixXd gram = centered * centered.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const double trace = std::max(gram.trace(), 0.0);
    for (std::size_t k = 0; k < d; ++k) {
      const auto col = static_cast<Eigen::Index>(n - 1 - k);
      const double lambda = eig.eigenvalues()(col);
      if (!(lambda > kNullVariance * trace) || lambda <= 0.0) continue;
      const Eigen::VectorXd v =
          centered.transpose() * eig.eigenvectors().col(col) / std::sqrt(lambda);
      auto row = fit.components.row(k);
      for (std::size_t j = 0; j < dim; ++j) row[j] = v(static_cast<Eigen::Index>(j));
      orient(row);
      fit.variances[k] = lambda / denom;
    }
  } else {
    const Eigen::MatrixXd cov = centered.transpose() * centered;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    const double trace = std::max(cov.trace(), 0.0);
    for (std::size_t k = 0; k < d; ++k) {
      const auto col = static_cast<Eigen::Index>(dim - 1 - k);
      const double lambda = eig.eigenvalues()(col);
      if (!(lambda > kNullVariance * trace) || lambda <= 0.0) continue;
      auto row = fit.components.row(k);
      for (std::size_t j = 0; j < dim; ++j) {
        row[j] = eig.eigenvectors()(static_cast<Eigen::Index>(j), col);
      }
      orient(row);
      fit.variances[k] = lambda / denom;
    }
  }
  return fit;
}

Embedding pca_reduce(const FeatureMatrix& x, std::size_t d) {
  const PcaFit fit = pca_fit(x, d);
  Matrix out(x.rows, d);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto xi = x.row(i);
    for (std::size_t k = 0; k < d; ++k) {
      const auto v = fit.components.row(k);
      double s = 0.0;
      for (std::size_t j = 0; j < x.cols; ++j) s += (xi[j] - fit.mean[j]) * v[j];
      out(i, k) = s;
    }
  }
  return Embedding::identity(std::move(out));
}

}  // namespace cil::reduce
