// Copyright 2026 The FUSE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fuse/objective.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fuse/error.hpp"
#include "fuse/linalg.hpp"
#include "support/oracles.hpp"

namespace fuse {
namespace {

Graph triangle() {
  const std::vector<Edge> e{{0, 1}, {1, 2}, {2, 0}};
  return Graph::from_edges(3, e);
}

DenseMatrix block_indicator(std::size_t blocks, std::size_t size) {
  DenseMatrix s(blocks * size, blocks);
  for (std::size_t i = 0; i < blocks * size; ++i) s(i, i / size) = 1.0;
  return s;
}

TEST(Modularity, HandExamples) {
  EXPECT_DOUBLE_EQ(modularity_value(triangle(), DenseMatrix(3, 1, 1.0)), 0.0);

  const std::vector<Edge> two_triangles{{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}};
  const Graph g6 = Graph::from_edges(6, two_triangles);
  EXPECT_EQ(modularity_value(g6, block_indicator(2, 3)), 0.5);

  const Graph k5 = Graph::from_edges(10, oracle::two_disjoint_cliques(5));
  EXPECT_EQ(modularity_value(k5, block_indicator(2, 5)), 0.5);
}

TEST(Modularity, MatchesBruteForceDoubleSum) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 29;
    const Graph g = oracle::random_graph(n, 0.25, rng);
    const auto s = oracle::random_matrix(n, 1 + rng() % 4, rng);
    EXPECT_NEAR(modularity_value(g, s), oracle::modularity(oracle::adjacency(g), s), 1e-10);
  }
}

TEST(Modularity, ConstantColumnIsZero) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 3 + rng() % 30;
    const Graph g = oracle::random_graph(n, 0.3, rng);
    EXPECT_NEAR(modularity_value(g, DenseMatrix(n, 2, 0.7)), 0.0, 1e-14);
  }
}

TEST(Modularity, EdgelessGraphRejected) {
  EXPECT_THROW(modularity_value(Graph::from_edges(3, {}), DenseMatrix(3, 1, 1.0)),
               InvalidArgument);
}

TEST(GradExact, HandExamples) {
  const auto flat = grad_modularity_exact(triangle(), DenseMatrix(3, 1, 1.0));
  for (double v : flat.values()) {
    EXPECT_NEAR(v, 0.0, 1e-15);
  }
  const std::vector<Edge> path{{0, 1}, {1, 2}};
  DenseMatrix s(3, 1);
  s(0, 0) = 1.0;
  const auto g = grad_modularity_exact(Graph::from_edges(3, path), s);
  EXPECT_DOUBLE_EQ(g(0, 0), -1.0 / 8.0);
  EXPECT_DOUBLE_EQ(g(1, 0), 1.0 / 4.0);
  EXPECT_DOUBLE_EQ(g(2, 0), -1.0 / 8.0);

  const auto zero = grad_modularity_exact(triangle(), DenseMatrix(3, 2));
  for (double v : zero.values()) EXPECT_EQ(v, 0.0);
}

TEST(GradExact, MatchesFiniteDifferencesAndDenseOracle) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 4 + rng() % 37;
    const std::size_t k = 1 + rng() % 4;
    const Graph g = oracle::random_graph(n, 0.2, rng);
    auto s = oracle::random_matrix(n, k, rng);
    const auto analytic = grad_modularity_exact(g, s);
    const auto dense = oracle::modularity_derivative(oracle::adjacency(g), s);
    EXPECT_LE(max_abs_diff(analytic, dense), 1e-12);

    const double h = 1e-5;
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < k; ++c) {
        const double keep = s(i, c);
        s(i, c) = keep + h;
        const double up = modularity_value(g, s);
        s(i, c) = keep - h;
        const double down = modularity_value(g, s);
        s(i, c) = keep;
        const double fd = (up - down) / (2.0 * h);
        worst = std::max(worst, std::abs(fd - analytic(i, c)));
      }
    }
    EXPECT_LE(worst / std::max(frobenius_norm(analytic), 1e-12), 1e-5);
  }
}

TEST(GradProposed, HandExamples) {
  const auto g = grad_modularity_proposed(triangle(), DenseMatrix(3, 1, 1.0));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(g(i, 0), 1.0 / 6.0);

  // Cycle C6 is 2-regular; a zero-sum column kills the global term.
  std::vector<Edge> cycle;
  for (NodeId i = 0; i < 6; ++i) cycle.emplace_back(i, (i + 1) % 6);
  const Graph c6 = Graph::from_edges(6, cycle);
  DenseMatrix s(6, 1);
  for (std::size_t i = 0; i < 6; ++i) s(i, 0) = (i % 2 == 0) ? 1.0 : -1.0;
  auto expected = spmm(c6, s);
  for (double& v : expected.values()) v /= 12.0;
  EXPECT_EQ(grad_modularity_proposed(c6, s), expected);
}

TEST(GradProposed, DiffersFromExactOnIrregularGraphs) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 10; ++trial) {
    const Graph g = oracle::random_graph(20, 0.2, rng);
    const auto s = oracle::random_matrix(20, 3, rng);
    EXPECT_GT(max_abs_diff(grad_modularity_proposed(g, s), grad_modularity_exact(g, s)), 1e-6);
  }
}

TEST(GradProposed, DispatchAndPrecomputedProductAgree) {
  std::mt19937_64 rng(31);
  const Graph g = oracle::random_graph(25, 0.2, rng);
  const auto s = oracle::random_matrix(25, 3, rng);
  const auto as = spmm(g, s);
  EXPECT_EQ(grad_modularity(g, s, GradientKind::kProposed), grad_modularity_proposed(g, s));
  EXPECT_EQ(grad_modularity(g, s, as, GradientKind::kExact), grad_modularity_exact(g, s));
  EXPECT_EQ(modularity_value(g, s, as), modularity_value(g, s));
}

TEST(GradSupervised, HandExamples) {
  DenseMatrix s(2, 2);
  s(0, 0) = 1.0;
  s(1, 1) = 1.0;
  const auto g = grad_supervised(s, LabelSet::fully_observed({0, 0}));
  EXPECT_DOUBLE_EQ(g(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(g(0, 1), -0.5);
  EXPECT_DOUBLE_EQ(g(1, 0), -0.5);
  EXPECT_DOUBLE_EQ(g(1, 1), 0.5);

  const auto single = grad_supervised(s, LabelSet::fully_observed({0, 1}));
  for (double v : single.values()) EXPECT_EQ(v, 0.0);

  const LabelSet none({0, 1}, Mask{false, false}, 2);
  const auto unlabeled = grad_supervised(s, none);
  for (double v : unlabeled.values()) EXPECT_EQ(v, 0.0);
}

LabelSet random_labels(std::size_t n, std::size_t classes, std::mt19937_64& rng) {
  std::vector<std::int32_t> labels(n);
  Mask observed(n);
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = static_cast<std::int32_t>(rng() % classes);
    observed[i] = rng() % 3 != 0;
  }
  return LabelSet(labels, observed, classes);
}

TEST(GradSupervised, ClassBlocksSumToZeroAndUnobservedRowsVanish) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 10 + rng() % 40;
    const auto ls = random_labels(n, 4, rng);
    const auto s = oracle::random_matrix(n, 3, rng);
    const auto g = grad_supervised(s, ls);
    for (std::int32_t c = 0; c < 4; ++c) {
      for (std::size_t col = 0; col < 3; ++col) {
        double total = 0.0;
        for (NodeId i = 0; i < n; ++i) {
          if (ls.observed(i) && ls.label(i) == c) total += g(i, col);
        }
        EXPECT_NEAR(total, 0.0, 1e-12);
      }
    }
    for (NodeId i = 0; i < n; ++i) {
      if (ls.observed(i)) continue;
      for (double v : g.row(i)) EXPECT_EQ(v, 0.0);
    }
  }
}

TEST(GradSupervised, EulerStepDecreasesLoss) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 10 + rng() % 40;
    const auto ls = random_labels(n, 3, rng);
    auto s = oracle::random_matrix(n, 4, rng);
    const double before = supervised_loss(s, ls);
    if (before == 0.0) continue;
    s.add_scaled(grad_supervised(s, ls), -0.1);
    EXPECT_LT(supervised_loss(s, ls), before);
  }
}

}  // namespace
}  // namespace fuse
