#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cil/blobs.hpp"
#include "cil/error.hpp"
#include "cil/exemplar_store.hpp"
#include "cil/oracles.hpp"
#include "cil/sampler.hpp"

using namespace cil;
using namespace cil::sampler;

namespace {

const Matrix kFour = Matrix::from_rows({{0, 0}, {1, 0}, {0.1, 0}, {10, 10}});

SamplerParams params(std::size_t m, int n, double r0 = 0.5) {
  SamplerParams p;
  p.m = m;
  p.n = n;
  p.r0 = r0;
  return p;
}

bool is_permutation_of_range(Selection s, std::size_t n) {
  std::sort(s.begin(), s.end());
  Selection expect(n);
  std::iota(expect.begin(), expect.end(), std::size_t{0});
  return s == expect;
}

std::vector<StoredExemplar> exemplars_of(const Dataset& ds, int cls, std::size_t count) {
  std::vector<StoredExemplar> out;
  for (std::size_t i = 0; i < ds.train.size() && out.size() < count; ++i) {
    if (ds.train[i].label == cls) out.push_back({i, ds.train[i]});
  }
  return out;
}

}  // namespace

TEST(NeighborCount, Examples) {
  const Matrix three = Matrix::from_rows({{0, 0}, {0.1, 0}, {10, 10}});
  EXPECT_EQ(neighbor_count(three, 0, 0.5), 1u);
  EXPECT_EQ(neighbor_count(three, 2, 0.5), 0u);
  EXPECT_EQ(neighbor_count(Matrix::from_rows({{3, 4}}), 0, 100.0), 0u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(neighbor_count(three, i, 20.0), 2u);
}

TEST(NeighborCount, RadiusIsInclusive) {
  const Matrix two = Matrix::from_rows({{0, 0}, {0.5, 0}});
  EXPECT_EQ(neighbor_count(two, 0, 0.5), 1u);
  EXPECT_EQ(neighbor_count(two, 0, 0.4999), 0u);
}

TEST(Dss, SkipsIsolatedFarthestRow) {
  EXPECT_EQ(mean_closest_row(kFour), 1u);
  EXPECT_EQ(dss_sample(kFour, params(2, 1)), (Selection{1, 0}));
}

TEST(Dss, SinglePoint) {
  EXPECT_EQ(dss_sample(Matrix::from_rows({{4, 2}}), params(1, 3)), (Selection{0}));
}

TEST(Dss, BudgetAtLeastRowsReturnsAll) {
  const auto s = dss_sample(kFour, params(10, 1));
  EXPECT_EQ(s.size(), 4u);
  EXPECT_EQ(s.front(), 1u);
  EXPECT_TRUE(is_permutation_of_range(s, 4));
}

TEST(Dss, NoFilterEqualsGonzalez) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto pts = oracle::uniform_points(40 + seed, 2, 5.0, seed);
    for (std::size_t m : {1u, 5u, 17u}) {
      EXPECT_EQ(dss_sample(pts, params(m, 0)), gonzalez_sample(pts, m));
    }
  }
}

TEST(Dss, RadiusGrowsWhenNothingQualifies) {
  // Points 1 apart on a line: with r0 = 0.5 nobody has a neighbor.
  const Matrix line = Matrix::from_rows({{0, 0}, {1, 0}, {2, 0}, {3, 0}, {4, 0}});
  auto p = params(3, 1, 0.5);
  const auto out = dss_sample_traced(line, p);
  EXPECT_EQ(out.selection.size(), 3u);
  EXPECT_GE(out.final_radius, 1.0);
  EXPECT_GT(out.adaptations, 0u);
  EXPECT_EQ(out.final_n, 1);
  EXPECT_TRUE(verify_dss(line, p, out.selection));
}

TEST(Dss, NeighborRequirementDecrementsAfterBudget) {
  // Nobody can ever have 4 neighbors among 4 rows; after max_adapt bumps n drops.
  const Matrix sq = Matrix::from_rows({{0, 0}, {1, 0}, {0, 1}, {1, 1}});
  auto p = params(3, 4, 0.1);
  p.max_adapt = 3;
  const auto out = dss_sample_traced(sq, p);
  EXPECT_EQ(out.selection.size(), 3u);
  EXPECT_LT(out.final_n, 4);
  EXPECT_TRUE(verify_dss(sq, p, out.selection));
}

TEST(Dss, Errors) {
  EXPECT_THROW(dss_sample(kFour, params(0, 1)), ConfigError);
  Matrix bad = kFour;
  bad(2, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(dss_sample(bad, params(2, 1)), DataError);
  EXPECT_THROW(gonzalez_sample(bad, 2), DataError);
  auto neg = params(2, -1);
  EXPECT_THROW(neg.validate(), ConfigError);
}

TEST(Gonzalez, FarthestPointOrder) {
  EXPECT_EQ(gonzalez_sample(kFour, 2), (Selection{1, 3}));
  EXPECT_EQ(gonzalez_sample(kFour, 3), (Selection{1, 3, 0}));
}

TEST(Gonzalez, FullBudgetIsPermutation) {
  const auto pts = oracle::uniform_points(9, 2, 1.0, 21);
  EXPECT_TRUE(is_permutation_of_range(gonzalez_sample(pts, 9), 9));
}

TEST(Gonzalez, DuplicatesNeverRepeatAnIndex) {
  const Matrix dup = Matrix::from_rows({{0, 0}, {0, 0}, {0, 0}, {1, 1}});
  EXPECT_TRUE(is_permutation_of_range(gonzalez_sample(dup, 4), 4));
  EXPECT_TRUE(is_permutation_of_range(dss_sample(dup, params(4, 2)), 4));
}

TEST(Gonzalez, TwoApproximationSmallInstances) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto pts = oracle::uniform_points(3 + seed % 10, 2, 10.0, seed);
    for (std::size_t m = 1; m <= 3; ++m) {
      const auto sel = gonzalez_sample(pts, m);
      EXPECT_LE(covering_radius(pts, sel), 2.0 * oracle::optimal_center_radius(pts, m));
      EXPECT_DOUBLE_EQ(covering_radius(pts, sel), oracle::covering_radius(pts, sel));
    }
  }
}

TEST(RandomSample, PermutationAndDeterminism) {
  EXPECT_TRUE(is_permutation_of_range(random_sample(12, 12, 5), 12));
  EXPECT_EQ(random_sample(100, 10, 9), random_sample(100, 10, 9));
  EXPECT_NE(random_sample(100, 10, 9), random_sample(100, 10, 10));
  EXPECT_THROW(random_sample(3, 4, 1), ConfigError);
}

TEST(RandomSample, SingleDrawIsUniform) {
  std::vector<int> freq(4, 0);
  for (std::uint64_t seed = 0; seed < 10000; ++seed) ++freq[random_sample(4, 1, seed)[0]];
  for (int f : freq) EXPECT_NEAR(f / 10000.0, 0.25, 0.25 * 0.04);
}

TEST(VerifyDss, AcceptsAndRejects) {
  EXPECT_TRUE(verify_dss(kFour, params(2, 1), Selection{1, 0}));
  const auto report = verify_dss(kFour, params(2, 1), Selection{1, 3});
  EXPECT_FALSE(report.ok);
  EXPECT_FALSE(report.violations.empty());
  EXPECT_FALSE(verify_dss(kFour, params(2, 1), Selection{0, 1}));
  EXPECT_FALSE(verify_dss(kFour, params(2, 1), Selection{1, 1}));
  EXPECT_FALSE(verify_dss(kFour, params(2, 1), Selection{1}));
}

TEST(VerifyDss, RoundTripOnRandomInstances) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto pts = oracle::uniform_points(5 + seed * 3, 2, 6.0, seed);
    auto p = params(1 + seed % 12, static_cast<int>(seed % 5), 0.05 + 0.01 * (seed % 7));
    p.max_adapt = seed % 3 == 0 ? 2 : 1000;
    EXPECT_TRUE(verify_dss(pts, p, dss_sample(pts, p))) << "seed " << seed;
  }
}

TEST(AllocateQuota, Examples) {
  EXPECT_EQ(allocate_quota(1000, 20), std::vector<std::size_t>(20, 50));
  EXPECT_EQ(allocate_quota(10, 3), (std::vector<std::size_t>{4, 3, 3}));
  EXPECT_THROW(allocate_quota(5, 6), ConfigError);
  const auto q = allocate_quota(101, 7);
  EXPECT_EQ(std::accumulate(q.begin(), q.end(), std::size_t{0}), 101u);
}

TEST(ExemplarStore, ShrinkKeepsPrefix) {
  const auto ds = make_blobs(2, 80, 2, 1.0, 0.0, 3);
  ExemplarStore store(100);
  const auto list = exemplars_of(ds, 0, 50);
  store.set_class(0, list);
  EXPECT_EQ(store.size_of(0), 50u);

  const auto same = shrink_class_exemplars(store, 0, 60);
  EXPECT_EQ(same, store);

  const auto smaller = shrink_class_exemplars(store, 0, 20);
  ASSERT_EQ(smaller.size_of(0), 20u);
  for (std::size_t k = 0; k < 20; ++k) {
    EXPECT_EQ(smaller.exemplars(0)[k].train_index, list[k].train_index);
  }
}

TEST(ExemplarStore, ShrinkAbsentClassWarns) {
  ExemplarStore store(10);
  std::vector<std::string> warnings;
  const auto out = shrink_class_exemplars(store, 4, 2, &warnings);
  EXPECT_EQ(out, store);
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(ExemplarStore, ShrunkGreedyEqualsSmallerGreedy) {
  const auto pts = oracle::uniform_points(120, 2, 10.0, 31);
  const auto big = gonzalez_sample(pts, 50);
  Dataset ds;
  ds.num_classes = 1;
  ds.dim = 2;
  for (std::size_t i = 0; i < pts.rows; ++i) {
    ds.train.push_back({{pts(i, 0), pts(i, 1)}, 0});
  }
  ExemplarStore store(50);
  std::vector<StoredExemplar> list;
  for (auto i : big) list.push_back({i, ds.train[i]});
  store.set_class(0, list);
  const auto shrunk = shrink_class_exemplars(store, 0, 20);
  Selection kept;
  for (const auto& e : shrunk.exemplars(0)) kept.push_back(e.train_index);
  EXPECT_EQ(kept, gonzalez_sample(pts, 20));
}

TEST(ExemplarStore, BudgetAndLabelsEnforced) {
  const auto ds = make_blobs(2, 40, 2, 1.0, 0.0, 4);
  ExemplarStore store(10);
  store.set_class(0, exemplars_of(ds, 0, 6));
  EXPECT_THROW(store.set_class(1, exemplars_of(ds, 1, 5)), ConfigError);
  EXPECT_THROW(store.set_class(1, exemplars_of(ds, 0, 2)), ConfigError);
  store.set_class(1, exemplars_of(ds, 1, 4));
  EXPECT_EQ(store.total(), 10u);
  EXPECT_EQ(store.class_order(), (std::vector<int>{0, 1}));
  EXPECT_EQ(store.all_examples().size(), 10u);
}

TEST(ExemplarStore, JsonRoundTrip) {
  const auto ds = make_blobs(3, 40, 2, 1.0, 0.0, 5);
  ExemplarStore store(30);
  store.set_class(2, exemplars_of(ds, 2, 7));
  store.set_class(0, exemplars_of(ds, 0, 5));
  const auto text = store.to_json();
  const auto back = ExemplarStore::from_json(text, ds);
  EXPECT_EQ(back, store);
  EXPECT_EQ(back.to_json(), text);
}
