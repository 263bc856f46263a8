#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cil/error.hpp"
#include "cil/oracles.hpp"
#include "cil/reduce.hpp"

using namespace cil;
using namespace cil::reduce;

namespace {

Matrix gaussian_clusters(std::size_t per, std::size_t dim, std::vector<int>& labels,
                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.3);
  std::vector<std::vector<double>> rows;
  for (int c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < per; ++i) {
      std::vector<double> x(dim);
      for (std::size_t d = 0; d < dim; ++d) x[d] = (d == static_cast<std::size_t>(c) ? 8.0 : 0.0) + noise(rng);
      rows.push_back(std::move(x));
      labels.push_back(c);
    }
  }
  return Matrix::from_rows(rows);
}

// Fraction of points whose nearest class centroid is their own class.
double centroid_purity(const Matrix& y, const std::vector<int>& labels) {
  std::vector<std::vector<double>> centroid(3, std::vector<double>(y.cols, 0.0));
  std::vector<int> count(3, 0);
  for (std::size_t i = 0; i < y.rows; ++i) {
    for (std::size_t d = 0; d < y.cols; ++d) centroid[labels[i]][d] += y(i, d);
    ++count[labels[i]];
  }
  for (int c = 0; c < 3; ++c) {
    for (auto& v : centroid[c]) v /= count[c];
  }
  int hits = 0;
  for (std::size_t i = 0; i < y.rows; ++i) {
    int best = 0;
    for (int c = 1; c < 3; ++c) {
      if (distance(y.row(i), centroid[c]) < distance(y.row(i), centroid[best])) best = c;
    }
    hits += best == labels[i];
  }
  return static_cast<double>(hits) / static_cast<double>(y.rows);
}

// KL(P || Q) straight from the definition, Q from the Student-t kernel.
double kl_reference(const Matrix& p, const Matrix& y) {
  const std::size_t n = y.rows;
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) z += 1.0 / (1.0 + squared_distance(y.row(i), y.row(j)));
    }
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || p(i, j) <= 0.0) continue;
      const double q = 1.0 / (1.0 + squared_distance(y.row(i), y.row(j))) / z;
      kl += p(i, j) * std::log(p(i, j) / q);
    }
  }
  return kl;
}

}  // namespace

TEST(Pca, IdenticalPointsGiveZeroEmbedding) {
  const Matrix x(6, 3, 2.5);
  for (std::size_t d = 1; d <= 3; ++d) {
    const auto e = pca_reduce(x, std::min<std::size_t>(d, 3));
    for (double v : e.points.data) EXPECT_EQ(v, 0.0);
  }
}

TEST(Pca, LineCapturesAllVariance) {
  std::vector<std::vector<double>> rows;
  for (double t : {-2.0, -0.5, 0.0, 1.0, 3.5, 4.0}) rows.push_back({t, 2 * t, 2 * t});
  const Matrix x = Matrix::from_rows(rows);
  const auto fit = pca_fit(x, 1);
  // Least-squares direction of the line, known in closed form.
  const double dir[3] = {1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0};
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(fit.components(0, k), dir[k], 1e-9);

  double total = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    double mean = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) mean += x(i, k);
    mean /= static_cast<double>(x.rows);
    for (std::size_t i = 0; i < x.rows; ++i) total += (x(i, k) - mean) * (x(i, k) - mean);
  }
  total /= static_cast<double>(x.rows - 1);
  EXPECT_NEAR(fit.variances[0], total, 1e-9 * total);

  const auto e = pca_reduce(x, 1);
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t k = 0; k < 3; ++k) {
      const double rebuilt = fit.mean[k] + e.points(i, 0) * fit.components(0, k);
      EXPECT_NEAR(rebuilt, x(i, k), 1e-9);
    }
  }
}

TEST(Pca, FullRankPreservesDistances) {
  const Matrix x = oracle::uniform_points(12, 4, 5.0, 3);
  const auto e = pca_reduce(x, 4);
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t j = 0; j < x.rows; ++j) {
      EXPECT_NEAR(distance(e.points.row(i), e.points.row(j)), distance(x.row(i), x.row(j)), 1e-9);
    }
  }
}

TEST(Pca, WideInputUsesFewRows) {
  // N < D exercises the Gram route; distances still preserved at d = N - 1.
  const Matrix x = oracle::uniform_points(5, 40, 1.0, 4);
  const auto e = pca_reduce(x, 4);
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t j = 0; j < x.rows; ++j) {
      EXPECT_NEAR(distance(e.points.row(i), e.points.row(j)), distance(x.row(i), x.row(j)), 1e-9);
    }
  }
}

TEST(Pca, SignConvention) {
  const Matrix x = oracle::uniform_points(30, 5, 3.0, 5);
  const auto fit = pca_fit(x, 3);
  for (std::size_t c = 0; c < 3; ++c) {
    double best = 0.0;
    for (std::size_t k = 0; k < 5; ++k) {
      if (std::abs(fit.components(c, k)) > std::abs(best)) best = fit.components(c, k);
    }
    EXPECT_GT(best, 0.0);
  }
  EXPECT_GE(fit.variances[0], fit.variances[1]);
  EXPECT_GE(fit.variances[1], fit.variances[2]);
}

TEST(Pca, RejectsBadTargetDim) {
  const Matrix x = oracle::uniform_points(5, 3, 1.0, 6);
  EXPECT_THROW(pca_reduce(x, 0), ConfigError);
  EXPECT_THROW(pca_reduce(x, 4), ConfigError);
}

TEST(Tsne, EffectivePerplexity) {
  EXPECT_EQ(effective_perplexity(1000, 30.0), 30.0);
  EXPECT_EQ(effective_perplexity(31, 30.0), 10.0);
  EXPECT_EQ(effective_perplexity(4, 30.0), 2.0);
}

TEST(Tsne, SquareAffinitiesNormalized) {
  const Matrix x = Matrix::from_rows({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const Matrix c = conditional_affinities(x, 2.0);
  for (std::size_t i = 0; i < 4; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < 4; ++j) sum += c(i, j);
    EXPECT_NEAR(sum, 1.0, 1e-9);
    EXPECT_EQ(c(i, i), 0.0);
  }
  const Matrix p = joint_affinities(c);
  double total = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_DOUBLE_EQ(p(i, j), p(j, i));
      total += p(i, j);
    }
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Tsne, ConditionalRowsHitTargetPerplexity) {
  const Matrix x = oracle::uniform_points(40, 5, 4.0, 7);
  const double perp = 8.0;
  const Matrix c = conditional_affinities(x, perp);
  for (std::size_t i = 0; i < x.rows; ++i) {
    double h = 0.0;
    for (std::size_t j = 0; j < x.rows; ++j) {
      if (c(i, j) > 0.0) h -= c(i, j) * std::log2(c(i, j));
    }
    EXPECT_NEAR(h, std::log2(perp), 1e-4) << "row " << i;
  }
}

TEST(Tsne, KlMatchesDefinition) {
  const Matrix x = oracle::uniform_points(10, 3, 2.0, 8);
  const Matrix p = joint_affinities(conditional_affinities(x, 3.0));
  const Matrix y = oracle::uniform_points(10, 2, 1.0, 9);
  EXPECT_NEAR(kl_divergence(p, y), kl_reference(p, y), 1e-12);
}

TEST(Tsne, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const std::size_t n = 6 + 3 * seed;  // up to 18 rows
    const Matrix x = oracle::uniform_points(n, 4, 3.0, 100 + seed);
    const Matrix p = joint_affinities(conditional_affinities(x, 3.0));
    const Matrix y = oracle::uniform_points(n, 2, 2.0, 200 + seed);
    const Matrix g = kl_gradient(p, y);
    const auto numeric = oracle::central_difference(
        [&](std::span<const double> flat) {
          Matrix probe = y;
          std::copy(flat.begin(), flat.end(), probe.data.begin());
          return kl_reference(p, probe);
        },
        y.data, 1e-6);
    EXPECT_LT(oracle::max_relative_error(g.data, numeric), 1e-4) << "n=" << n;
  }
}

TEST(Tsne, ShapeAndFiniteness) {
  const Matrix x = oracle::uniform_points(25, 6, 1.0, 10);
  TsneConfig cfg;
  cfg.iterations = 120;
  for (std::size_t d : {1u, 2u, 3u}) {
    cfg.target_dim = d;
    const auto e = tsne_reduce(x, cfg);
    EXPECT_EQ(e.rows(), 25u);
    EXPECT_EQ(e.cols(), d);
    EXPECT_TRUE(e.points.all_finite());
    EXPECT_TRUE(e.warnings.empty());
  }
}

TEST(Tsne, ClustersSeparateAndKlDrops) {
  std::vector<int> labels;
  const Matrix x = gaussian_clusters(20, 5, labels, 11);
  TsneConfig cfg;
  cfg.seed = 4;
  const auto run = tsne_run(x, cfg);
  ASSERT_EQ(run.kl_history.size(), 500u);
  EXPECT_LE(run.kl_history.back(), run.kl_history[100]);

  // Gaussian random projection to 2D under a fixed seed as the baseline.
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix proj(5, 2);
  for (auto& v : proj.data) v = g(rng);
  Matrix rp(x.rows, 2);
  for (std::size_t i = 0; i < x.rows; ++i) {
    for (std::size_t c = 0; c < 2; ++c) {
      for (std::size_t k = 0; k < 5; ++k) rp(i, c) += x(i, k) * proj(k, c);
    }
  }
  EXPECT_GE(centroid_purity(run.embedding.points, labels), centroid_purity(rp, labels));
  EXPECT_EQ(centroid_purity(run.embedding.points, labels), 1.0);
}

TEST(Tsne, Deterministic) {
  const Matrix x = oracle::uniform_points(20, 4, 1.0, 13);
  TsneConfig cfg;
  cfg.iterations = 150;
  cfg.init = TsneInit::random;
  cfg.seed = 77;
  EXPECT_EQ(tsne_reduce(x, cfg).points, tsne_reduce(x, cfg).points);
}

TEST(Tsne, TinyInputFallsBackToPca) {
  const Matrix x = Matrix::from_rows({{0, 0, 1}, {1, 2, 0}, {3, 1, 1}});
  const auto e = tsne_reduce(x, TsneConfig{});
  EXPECT_EQ(e.rows(), 3u);
  EXPECT_EQ(e.cols(), 2u);
  ASSERT_EQ(e.warnings.size(), 1u);
  EXPECT_EQ(e.points, pca_reduce(x, 2).points);
}

TEST(Tsne, DuplicateOnlyInputFallsBackToPca) {
  const Matrix x(10, 4, 1.5);
  const auto e = tsne_reduce(x, TsneConfig{});
  EXPECT_EQ(e.rows(), 10u);
  EXPECT_EQ(e.warnings.size(), 1u);
  for (double v : e.points.data) EXPECT_EQ(v, 0.0);
}

TEST(Tsne, ConfigValidation) {
  TsneConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.perplexity = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = TsneConfig{};
  cfg.target_dim = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(EmbeddingExport, CsvLayout) {
  Embedding e = Embedding::identity(Matrix::from_rows({{0.5, -1}, {2, 0.25}}));
  e.source_indices = {7, 3};
  EXPECT_EQ(embedding_csv(e), "index,dim0,dim1\n7,0.5,-1\n3,2,0.25\n");
}
