#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "cil/blobs.hpp"
#include "cil/error.hpp"
#include "cil/matrix.hpp"
#include "cil/stream.hpp"

using namespace cil;
using stream::Mode;
using stream::StreamSpec;

namespace {

StreamSpec disjoint(int q, std::uint64_t seed = 3) {
  StreamSpec s;
  s.classes_per_task = q;
  s.seed = seed;
  return s;
}

StreamSpec fuzzy(int q, int z, std::uint64_t seed = 3) {
  StreamSpec s;
  s.mode = Mode::fuzzy;
  s.classes_per_task = q;
  s.fuzz_percent = z;
  s.seed = seed;
  return s;
}

// Count how many examples of a task carry a major-class label.
std::size_t count_major(const Dataset& ds, const stream::TaskBatch& t) {
  std::size_t n = 0;
  for (auto i : t.example_indices) {
    const int y = ds.train[i].label;
    if (std::find(t.major_classes.begin(), t.major_classes.end(), y) != t.major_classes.end()) ++n;
  }
  return n;
}

}  // namespace

TEST(Blobs, SplitArithmetic) {
  const auto ds = make_blobs(2, 10, 2, 1.0, 0.0, 7);
  EXPECT_EQ(ds.train.size(), 16u);
  EXPECT_EQ(ds.test.size(), 4u);
  EXPECT_EQ(ds.num_classes, 2);
  EXPECT_EQ(ds.dim, 2u);
}

TEST(Blobs, OutlierCountPerClass) {
  BlobsParams p;
  p.num_classes = 3;
  p.per_class = 20;
  p.outlier_fraction = 0.1;
  p.seed = 11;
  const auto ds = make_blobs(p);
  // Outliers sit >= 10 spreads out; a Gaussian inlier beyond 7 spreads has
  // probability ~e^-24, so distance to the inlier mean separates them.
  for (int c = 0; c < 3; ++c) {
    std::vector<double> mean(ds.dim, 0.0);
    int inliers = 0;
    for (std::size_t i = 0; i < ds.train.size(); ++i) {
      if (ds.train[i].label != c || ds.train_outlier[i]) continue;
      for (std::size_t d = 0; d < ds.dim; ++d) mean[d] += ds.train[i].features[d];
      ++inliers;
    }
    for (auto& v : mean) v /= inliers;
    int far = 0;
    auto tally = [&](const std::vector<LabeledExample>& pool) {
      for (const auto& ex : pool) {
        if (ex.label == c && distance(ex.features, mean) > 7.0 * p.spread) ++far;
      }
    };
    tally(ds.train);
    tally(ds.test);
    EXPECT_EQ(far, 2) << "class " << c;
  }
}

TEST(Blobs, OutliersAreFarFromClassCenter) {
  const auto ds = make_blobs(4, 50, 3, 0.5, 0.1, 5);
  for (int c = 0; c < 4; ++c) {
    // Robust center: mean of the non-outlier train points.
    std::vector<double> mean(3, 0.0);
    int n = 0;
    for (std::size_t i = 0; i < ds.train.size(); ++i) {
      if (ds.train[i].label != c || ds.train_outlier[i]) continue;
      for (int d = 0; d < 3; ++d) mean[d] += ds.train[i].features[d];
      ++n;
    }
    for (auto& v : mean) v /= n;
    for (std::size_t i = 0; i < ds.train.size(); ++i) {
      if (ds.train[i].label != c || !ds.train_outlier[i]) continue;
      double d2 = 0.0;
      for (int d = 0; d < 3; ++d) {
        const double diff = ds.train[i].features[d] - mean[d];
        d2 += diff * diff;
      }
      // 10 spreads minus slack for the sampled mean's error.
      EXPECT_GT(std::sqrt(d2), 9.0 * 0.5);
    }
  }
}

TEST(Blobs, Deterministic) {
  const auto a = make_blobs(5, 30, 4, 1.0, 0.1, 99);
  const auto b = make_blobs(5, 30, 4, 1.0, 0.1, 99);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  const auto c = make_blobs(5, 30, 4, 1.0, 0.1, 100);
  EXPECT_NE(a.train, c.train);
}

TEST(DisjointStream, PartitionsClasses) {
  const auto ds = make_blobs(10, 10, 2, 1.0, 0.0, 1);
  const auto tasks = stream::make_disjoint_stream(ds, disjoint(5));
  ASSERT_EQ(tasks.size(), 2u);
  std::vector<int> all;
  for (const auto& t : tasks) all.insert(all.end(), t.major_classes.begin(), t.major_classes.end());
  std::sort(all.begin(), all.end());
  std::vector<int> expect(10);
  std::iota(expect.begin(), expect.end(), 0);
  EXPECT_EQ(all, expect);
}

TEST(DisjointStream, HundredClassesTenPerTask) {
  const auto ds = make_blobs(100, 5, 2, 1.0, 0.0, 2);
  const auto tasks = stream::make_disjoint_stream(ds, disjoint(10));
  ASSERT_EQ(tasks.size(), 10u);
  const auto by_class = indices_by_class(ds.train, 100);
  std::set<std::size_t> seen;
  for (const auto& t : tasks) {
    EXPECT_EQ(t.major_classes.size(), 10u);
    std::size_t expected = 0;
    for (int c : t.major_classes) expected += by_class[c].size();
    EXPECT_EQ(t.size(), expected);
    EXPECT_EQ(count_major(ds, t), t.size());
    for (auto i : t.example_indices) EXPECT_TRUE(seen.insert(i).second);
  }
  EXPECT_EQ(seen.size(), ds.train.size());
}

TEST(DisjointStream, RejectsIndivisibleTaskSize) {
  const auto ds = make_blobs(10, 5, 2, 1.0, 0.0, 2);
  EXPECT_THROW(stream::make_disjoint_stream(ds, disjoint(3)), ConfigError);
}

TEST(DisjointStream, ExplicitClassOrder) {
  const auto ds = make_blobs(4, 5, 2, 1.0, 0.0, 2);
  auto spec = disjoint(2);
  spec.class_order = std::vector<int>{3, 1, 0, 2};
  const auto tasks = stream::make_disjoint_stream(ds, spec);
  EXPECT_EQ(tasks[0].major_classes, (std::vector<int>{3, 1}));
  EXPECT_EQ(tasks[1].major_classes, (std::vector<int>{0, 2}));
  spec.class_order = std::vector<int>{3, 1, 1, 2};
  EXPECT_THROW(stream::make_disjoint_stream(ds, spec), ConfigError);
}

TEST(DisjointStream, LabelsMatchDataset) {
  const auto ds = make_blobs(6, 10, 2, 1.0, 0.0, 4);
  for (const auto& t : stream::make_disjoint_stream(ds, disjoint(2))) {
    ASSERT_EQ(t.labels.size(), t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
      EXPECT_EQ(t.labels[k], ds.train[t.example_indices[k]].label);
    }
    const auto ex = stream::materialize(ds, t);
    ASSERT_EQ(ex.size(), t.size());
    EXPECT_EQ(ex.front(), ds.train[t.example_indices.front()]);
  }
}

TEST(FuzzyStream, NinetyTenOnThousandExampleTasks) {
  // 625 per class -> 500 train per class -> 1000 examples per 2-class task.
  const auto ds = make_blobs(10, 625, 2, 1.0, 0.0, 8);
  const auto tasks = stream::make_fuzzy_stream(ds, fuzzy(2, 10));
  ASSERT_EQ(tasks.size(), 5u);
  for (const auto& t : tasks) {
    EXPECT_EQ(t.size(), 1000u);
    EXPECT_EQ(count_major(ds, t), 900u);
    EXPECT_EQ(t.minor_count(), 100u);
    EXPECT_TRUE(t.warnings.empty());
  }
}

TEST(FuzzyStream, HalfMinorExhaustiveCount) {
  // per_class 6 -> 5 train examples per class -> 10 per task.
  const auto ds = make_blobs(4, 6, 2, 1.0, 0.0, 9);
  const auto tasks = stream::make_fuzzy_stream(ds, fuzzy(2, 50));
  ASSERT_EQ(tasks.size(), 2u);
  for (const auto& t : tasks) {
    std::map<bool, int> by_kind;
    for (auto i : t.example_indices) {
      const int y = ds.train[i].label;
      ++by_kind[std::count(t.major_classes.begin(), t.major_classes.end(), y) > 0];
    }
    EXPECT_EQ(by_kind[true], 5);
    EXPECT_EQ(by_kind[false], 5);
  }
}

TEST(FuzzyStream, EveryExampleInExactlyOneTask) {
  const auto ds = make_blobs(12, 40, 2, 1.0, 0.0, 10);
  const auto tasks = stream::make_fuzzy_stream(ds, fuzzy(3, 10));
  std::vector<int> hits(ds.train.size(), 0);
  for (const auto& t : tasks) {
    for (auto i : t.example_indices) ++hits[i];
  }
  EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
}

TEST(FuzzyStream, ZeroFuzzMatchesDisjointComposition) {
  const auto ds = make_blobs(6, 20, 2, 1.0, 0.0, 12);
  const auto f = stream::make_fuzzy_stream(ds, fuzzy(2, 0));
  const auto d = stream::make_disjoint_stream(ds, disjoint(2));
  ASSERT_EQ(f.size(), d.size());
  for (std::size_t t = 0; t < f.size(); ++t) {
    EXPECT_EQ(f[t].major_classes, d[t].major_classes);
    EXPECT_EQ(f[t].minor_count(), 0u);
    auto a = f[t].example_indices;
    auto b = d[t].example_indices;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, b);
  }
}

TEST(FuzzyStream, ExhaustedPoolFallsBackWithWarning) {
  BlobsParams p;
  p.num_classes = 4;
  p.per_class_counts = {100, 100, 5, 5};
  p.seed = 13;
  const auto ds = make_blobs(p);
  auto spec = fuzzy(2, 50);
  spec.class_order = std::vector<int>{0, 1, 2, 3};
  const auto tasks = stream::make_fuzzy_stream(ds, spec);
  bool warned = false;
  for (const auto& t : tasks) {
    warned = warned || !t.warnings.empty();
    EXPECT_EQ(t.minor_count(),
              static_cast<std::size_t>(std::llround(0.5 * static_cast<double>(t.size()))));
  }
  EXPECT_TRUE(warned);
}

TEST(FuzzyStream, Deterministic) {
  const auto ds = make_blobs(10, 30, 2, 1.0, 0.0, 14);
  const auto a = stream::make_fuzzy_stream(ds, fuzzy(2, 10, 5));
  const auto b = stream::make_fuzzy_stream(ds, fuzzy(2, 10, 5));
  EXPECT_EQ(stream::manifest_json(a), stream::manifest_json(b));
  const auto c = stream::make_fuzzy_stream(ds, fuzzy(2, 10, 6));
  EXPECT_NE(stream::manifest_json(a), stream::manifest_json(c));
}

TEST(StreamSpec, Validation) {
  EXPECT_THROW(disjoint(0).validate(10), ConfigError);
  auto bad = disjoint(2);
  bad.fuzz_percent = 10;
  EXPECT_THROW(bad.validate(10), ConfigError);
  EXPECT_THROW(fuzzy(2, 100).validate(10), ConfigError);
  EXPECT_NO_THROW(fuzzy(2, 10).validate(10));
}
