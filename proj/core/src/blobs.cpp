#include "cil/blobs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cil/error.hpp"
#include "cil/random.hpp"

namespace cil {

namespace {

constexpr double kOutlierMinSpreads = 10.0;
constexpr double kOutlierMaxSpreads = 15.0;
constexpr double kTrainFraction = 0.8;

}  // namespace

Dataset make_blobs(const BlobsParams& p) {
  if (p.num_classes < 2) throw ConfigError("blobs need at least 2 classes");
  if (p.dim == 0) throw ConfigError("blobs need dim >= 1");
  if (!(p.spread > 0.0) || !std::isfinite(p.spread)) {
    throw ConfigError("blobs spread must be positive");
  }
  if (!(p.outlier_fraction >= 0.0 && p.outlier_fraction < 0.5)) {
    throw ConfigError("outlier_fraction must be in [0, 0.5)");
  }
  std::vector<int> counts = p.per_class_counts;
  if (counts.empty()) {
    counts.assign(static_cast<std::size_t>(p.num_classes), p.per_class);
  } else if (counts.size() != static_cast<std::size_t>(p.num_classes)) {
    throw ConfigError("per_class_counts must list one count per class");
  }
  for (int n : counts) {
    if (n < 2) throw ConfigError("blobs need at least 2 points per class");
  }

  Dataset ds;
  ds.num_classes = p.num_classes;
  ds.dim = p.dim;

  Rng center_rng(derive_seed(p.seed, "blobs/centers"));
  std::uniform_real_distribution<double> box(-p.center_box * p.spread,
                                             p.center_box * p.spread);
  std::vector<std::vector<double>> centers(static_cast<std::size_t>(p.num_classes));
  for (auto& c : centers) {
    c.resize(p.dim);
    for (auto& v : c) v = box(center_rng);
  }

  for (int c = 0; c < p.num_classes; ++c) {
    const auto& center = centers[static_cast<std::size_t>(c)];
    const int n = counts[static_cast<std::size_t>(c)];
    Rng rng(derive_seed(p.seed, static_cast<std::uint64_t>(c), 1));
    std::normal_distribution<double> noise(0.0, p.spread);
    std::normal_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> far(kOutlierMinSpreads * p.spread,
                                               kOutlierMaxSpreads * p.spread);

    const auto outliers = static_cast<int>(std::llround(p.outlier_fraction * n));
    std::vector<LabeledExample> points(static_cast<std::size_t>(n));
    std::vector<bool> is_outlier(static_cast<std::size_t>(n), false);
    for (int i = 0; i < n; ++i) {
      auto& x = points[static_cast<std::size_t>(i)].features;
      points[static_cast<std::size_t>(i)].label = c;
      x.resize(p.dim);
      if (i < outliers) {
        std::vector<double> dir(p.dim);
        double norm = 0.0;
        while (norm < 1e-12) {
          norm = 0.0;
          for (auto& v : dir) {
            v = unit(rng);
            norm += v * v;
          }
          norm = std::sqrt(norm);
        }
        const double radius = far(rng);
        for (std::size_t d = 0; d < p.dim; ++d) {
          x[d] = center[d] + radius * dir[d] / norm;
        }
        is_outlier[static_cast<std::size_t>(i)] = true;
      } else {
        for (std::size_t d = 0; d < p.dim; ++d) x[d] = center[d] + noise(rng);
      }
    }

    std::vector<std::size_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const auto train_count =
        static_cast<std::size_t>(std::llround(kTrainFraction * n));
    for (std::size_t k = 0; k < order.size(); ++k) {
      auto& ex = points[order[k]];
      if (k < train_count) {
        ds.train.push_back(std::move(ex));
        ds.train_outlier.push_back(is_outlier[order[k]]);
      } else {
        ds.test.push_back(std::move(ex));
      }
    }
  }
  return ds;
}

Dataset make_blobs(int num_classes, int per_class, std::size_t dim,
                   double spread, double outlier_fraction, std::uint64_t seed) {
  BlobsParams p;
  p.num_classes = num_classes;
  p.per_class = per_class;
  p.dim = dim;
  p.spread = spread;
  p.outlier_fraction = outlier_fraction;
  p.seed = seed;
  return make_blobs(p);
}

}  // namespace cil
