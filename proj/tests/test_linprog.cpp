#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "generators.hpp"
#include "oracles.hpp"
#include "valuecert/linprog.hpp"

using namespace valuecert;
using namespace valuecert::lp;

namespace {

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void expect_feasible(const LpInstance& in, const Vec& x, double tol) {
  for (std::size_t j = 0; j < in.num_vars(); ++j) {
    EXPECT_GE(x[j], in.lower_bound(j) - tol);
    EXPECT_LE(x[j], in.upper_bound(j) + tol);
  }
  for (std::size_t i = 0; i < in.num_rows(); ++i) {
    const double a = dot(in.rows[i], x);
    const double s = tol * (1.0 + std::fabs(in.rhs[i]));
    if (in.relations[i] != Relation::GreaterEq) { EXPECT_LE(a, in.rhs[i] + s) << "row " << i; }
    if (in.relations[i] != Relation::LessEq) { EXPECT_GE(a, in.rhs[i] - s) << "row " << i; }
  }
}

}  // namespace

TEST(LinProg, SingleUpperBoundRow) {
  LpInstance in;
  in.objective = {1.0};
  in.add_row({1.0}, Relation::LessEq, 3.0);
  const auto out = solve_lp(in);
  ASSERT_EQ(out.status, LpStatus::Optimal);
  EXPECT_DOUBLE_EQ(out.x[0], 3.0);
  EXPECT_DOUBLE_EQ(out.value, 3.0);
  EXPECT_DOUBLE_EQ(out.duals[0], 1.0);
}

TEST(LinProg, InfeasibleWithFarkasCertificate) {
  LpInstance in;
  in.objective = {1.0};
  in.add_row({1.0}, Relation::LessEq, -1.0);
  const auto out = solve_lp(in);
  ASSERT_EQ(out.status, LpStatus::Infeasible);
  ASSERT_EQ(out.farkas.size(), 1u);
  EXPECT_GT(out.farkas[0], 0.0);
  // z * x <= z * (-1) with z > 0 and x >= 0 gives 0 <= -z
  EXPECT_LT(out.farkas[0] * in.rhs[0], 0.0);
  EXPECT_TRUE(verify_certificate(in, out).ok);
}

TEST(LinProg, Unbounded) {
  LpInstance in;
  in.objective = {1.0, 1.0};
  in.add_row({1.0, -1.0}, Relation::LessEq, 1.0);
  const auto out = solve_lp(in);
  ASSERT_EQ(out.status, LpStatus::Unbounded);
  EXPECT_GT(dot(in.objective, out.ray), 0.0);
  EXPECT_LE(dot(in.rows[0], out.ray), 1e-12);
  for (double r : out.ray) EXPECT_GE(r, 0.0);
  EXPECT_TRUE(verify_certificate(in, out).ok);
}

TEST(LinProg, FreeAndNegativeVariables) {
  // max -|x - 2| style: max -t s.t. t >= x - 2, t >= 2 - x, x free, t free
  LpInstance in;
  in.objective = {0.0, -1.0};
  in.lower = {-kInf, -kInf};
  in.upper = {kInf, kInf};
  in.add_row({-1.0, 1.0}, Relation::GreaterEq, -2.0);
  in.add_row({1.0, 1.0}, Relation::GreaterEq, 2.0);
  const auto out = solve_lp(in);
  ASSERT_EQ(out.status, LpStatus::Optimal);
  EXPECT_NEAR(out.value, 0.0, 1e-12);
  EXPECT_NEAR(out.x[0], 2.0, 1e-12);

  LpInstance flip;  // variable bounded only from above
  flip.objective = {-1.0};
  flip.lower = {-kInf};
  flip.upper = {-4.0};
  flip.add_row({1.0}, Relation::GreaterEq, -10.0);
  const auto f = solve_lp(flip);
  ASSERT_EQ(f.status, LpStatus::Optimal);
  EXPECT_DOUBLE_EQ(f.x[0], -10.0);
}

TEST(LinProg, EqualityRowsAndDegeneracy) {
  // Degenerate vertex: three constraints tight at (1,1)
  LpInstance in;
  in.objective = {1.0, 1.0};
  in.add_row({1.0, 0.0}, Relation::LessEq, 1.0);
  in.add_row({0.0, 1.0}, Relation::LessEq, 1.0);
  in.add_row({1.0, 1.0}, Relation::LessEq, 2.0);
  in.add_row({1.0, -1.0}, Relation::Equal, 0.0);
  const auto out = solve_lp(in);
  ASSERT_EQ(out.status, LpStatus::Optimal);
  EXPECT_NEAR(out.value, 2.0, 1e-12);
}

TEST(LinProg, MatchesVertexEnumeration) {
  std::mt19937_64 rng(424242);
  int feasible = 0, infeasible = 0;
  for (int t = 0; t < 500; ++t) {
    const LpInstance in = gen::random_bounded_lp(rng);
    const auto want = oracle::vertex_enumeration(in);
    const auto out = solve_lp(in);
    if (!want.feasible) {
      ++infeasible;
      ASSERT_EQ(out.status, LpStatus::Infeasible) << "trial " << t;
      EXPECT_TRUE(verify_certificate(in, out).ok) << "trial " << t;
      continue;
    }
    ++feasible;
    ASSERT_EQ(out.status, LpStatus::Optimal) << "trial " << t;
    EXPECT_NEAR(out.value, want.value, 1e-7) << "trial " << t;
    EXPECT_NEAR(dot(in.objective, out.x), out.value, 1e-9);
    expect_feasible(in, out.x, 1e-8);
    EXPECT_TRUE(verify_certificate(in, out).ok) << "trial " << t;
  }
  EXPECT_GT(feasible, 100);
  EXPECT_GT(infeasible, 20);
}

TEST(LinProg, RandomUnboundedRaysVerify) {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> coef(-4, 4);
  int unbounded = 0;
  for (int t = 0; t < 300; ++t) {
    LpInstance in;
    const int n = 3;
    for (int j = 0; j < n; ++j) in.objective.push_back(coef(rng));
    for (int i = 0; i < 3; ++i) {
      Vec a(n);
      for (auto& v : a) v = coef(rng);
      in.add_row(a, Relation::LessEq, std::abs(coef(rng)) + 1.0);
    }
    const auto out = solve_lp(in);
    EXPECT_TRUE(verify_certificate(in, out).ok);
    if (out.status != LpStatus::Unbounded) continue;
    ++unbounded;
    EXPECT_GT(dot(in.objective, out.ray), 0.0);
    for (std::size_t i = 0; i < in.num_rows(); ++i) EXPECT_LE(dot(in.rows[i], out.ray), 1e-9);
  }
  EXPECT_GT(unbounded, 10);
}

TEST(LinProg, TallInstanceUsesRowGeneration) {
  // max x + y over the polygon of 2000 tangents to the unit circle
  LpInstance in;
  in.objective = {1.0, 1.0};
  in.lower = {-kInf, -kInf};
  in.upper = {kInf, kInf};
  const double pi = std::acos(-1.0);
  for (int k = 0; k < 2000; ++k) {
    const double a = 2.0 * pi * k / 2000.0;
    in.add_row({std::cos(a), std::sin(a)}, Relation::LessEq, 1.0);
  }
  const auto out = solve_lp(in);
  ASSERT_EQ(out.status, LpStatus::Optimal);
  EXPECT_NEAR(out.value, std::sqrt(2.0), 1e-6);
  EXPECT_LT(out.working_rows, 200);
  EXPECT_TRUE(verify_certificate(in, out).ok);
}

TEST(LinProg, Deterministic) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 50; ++t) {
    const LpInstance in = gen::random_bounded_lp(rng);
    const auto a = solve_lp(in);
    const auto b = solve_lp(in);
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.basis, b.basis);
    EXPECT_EQ(a.farkas, b.farkas);
  }
}

TEST(LinProg, VerifierRejectsForgedCertificates) {
  LpInstance in;
  in.objective = {1.0};
  in.add_row({1.0}, Relation::LessEq, 3.0);
  auto out = solve_lp(in);
  out.value = 4.0;
  out.x = {4.0};
  EXPECT_FALSE(verify_certificate(in, out).ok);

  LpInstance feas;
  feas.objective = {1.0};
  feas.add_row({1.0}, Relation::LessEq, 1.0);
  LpOutcome fake;
  fake.status = LpStatus::Infeasible;
  fake.farkas = {1.0};
  EXPECT_FALSE(verify_certificate(feas, fake).ok);
}

TEST(LinProg, MalformedInstanceRejected) {
  LpInstance in;
  in.objective = {1.0, 2.0};
  in.add_row({1.0}, Relation::LessEq, 1.0);
  try {
    solve_lp(in);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Dimension);
  }
}
