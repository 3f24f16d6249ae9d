#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "generators.hpp"
#include "oracles.hpp"
#include "valuecert/pareto.hpp"

using namespace valuecert;

namespace {

PointCloud cloud_of(std::vector<Vec> pts) {
  PointCloud c;
  c.criterion_dim = pts.empty() ? 2 : pts[0].size();
  c.points = std::move(pts);
  return c;
}

}  // namespace

TEST(Dominance, Examples) {
  EXPECT_TRUE(dominates(Vec{1, 0}, Vec{0, 0}));
  EXPECT_FALSE(dominates(Vec{1, -1}, Vec{0, 0}));
  EXPECT_FALSE(dominates(Vec{0, 0}, Vec{0, 0}));
}

TEST(Dominance, Verdicts) {
  EXPECT_EQ(compare(Vec{1, 0}, Vec{0, 0}), DominanceVerdict::Dominates);
  EXPECT_EQ(compare(Vec{0, 0}, Vec{1, 0}), DominanceVerdict::Dominated);
  EXPECT_EQ(compare(Vec{1, -1}, Vec{0, 0}), DominanceVerdict::Incomparable);
  EXPECT_EQ(compare(Vec{2, 3}, Vec{2, 3}), DominanceVerdict::Equal);
}

TEST(Dominance, AntisymmetricOnRandomPairs) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 2000; ++t) {
    const auto pts = gen::random_points(rng, 2, 3);
    const auto ab = compare(pts[0], pts[1]);
    const auto ba = compare(pts[1], pts[0]);
    EXPECT_EQ(ab == DominanceVerdict::Dominates, ba == DominanceVerdict::Dominated);
    EXPECT_EQ(ab == DominanceVerdict::Equal, ba == DominanceVerdict::Equal);
  }
}

TEST(Dominance, DimensionMismatch) {
  try {
    dominates(Vec{1, 2}, Vec{1, 2, 3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Dimension);
  }
}

TEST(ParetoFilter, ExampleSampleAllEfficient) {
  EXPECT_EQ(pareto_filter(cloud_of({{0, 0}, {1, -1}, {4, -8}})), (std::vector<std::size_t>{0, 1, 2}));
}

TEST(ParetoFilter, DominatedPointRemoved) {
  EXPECT_EQ(pareto_filter(cloud_of({{0, 0}, {1, 0}})), (std::vector<std::size_t>{1}));
}

TEST(ParetoFilter, DuplicatesSurvive) {
  EXPECT_EQ(pareto_filter(cloud_of({{1, 1}, {1, 1}, {0, 0}})), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(pareto_filter(cloud_of({{1, 1, 1}, {1, 1, 1}})), (std::vector<std::size_t>{0, 1}));
}

TEST(ParetoFilter, EmptyCloudRejected) {
  try {
    pareto_filter(PointCloud{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Schema);
  }
}

TEST(ParetoFilter, MatchesBruteForce) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> size(1, 500);
  for (int t = 0; t < 200; ++t) {
    const std::size_t p = 2 + static_cast<std::size_t>(t % 3);
    const auto pts = gen::random_points(rng, size(rng), p);
    ASSERT_EQ(pareto_filter(cloud_of(pts)), oracle::efficient_indices(pts)) << "trial " << t;
  }
}

TEST(ParetoFilter, ThreeDimensionalCloudOfTwoHundred) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::vector<Vec> pts(200, Vec(3));
  for (auto& y : pts) {
    for (auto& v : y) v = g(rng);
  }
  EXPECT_EQ(pareto_filter(cloud_of(pts)), oracle::efficient_indices(pts));
}

TEST(ParetoFilter, PermutationInvariant) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const std::size_t p = 2 + static_cast<std::size_t>(t % 3);
    const auto pts = gen::random_points(rng, 120, p);
    std::vector<std::size_t> perm(pts.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Vec> shuffled;
    for (auto k : perm) shuffled.push_back(pts[k]);

    std::vector<std::size_t> mapped;
    for (auto k : pareto_filter(cloud_of(shuffled))) mapped.push_back(perm[k]);
    std::sort(mapped.begin(), mapped.end());
    EXPECT_EQ(mapped, pareto_filter(cloud_of(pts)));
  }
}

TEST(ParetoFilter, SweepAgreesWithPairwiseInTwoDimensions) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 300; ++t) {
    const auto pts = gen::random_points(rng, 1 + static_cast<std::size_t>(t), 2);
    ASSERT_EQ(detail::pareto_filter_sweep2d(pts), detail::pareto_filter_pairwise(pts)) << "trial " << t;
  }
}
