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

#include "fuse/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fuse/error.hpp"
#include "fuse/linalg.hpp"
#include "support/oracles.hpp"

namespace fuse {
namespace {

// Determinant by partial-pivot Gaussian elimination.
double determinant(DenseMatrix a) {
  const std::size_t n = a.rows();
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a(r, c)) > std::abs(a(pivot, c))) pivot = r;
    }
    if (pivot != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(c, j), a(pivot, j));
      det = -det;
    }
    det *= a(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a(r, c) / a(c, c);
      for (std::size_t j = c; j < n; ++j) a(r, j) -= f * a(c, j);
    }
  }
  return det;
}

// Fraction of nodes whose nearest class centroid (in S) is their own class.
double nearest_centroid_accuracy(const EmbeddingMatrix& s, const LabelSet& ls) {
  const std::size_t c = ls.num_classes();
  DenseMatrix centroid(c, s.cols());
  std::vector<double> count(c, 0.0);
  for (NodeId i = 0; i < s.rows(); ++i) {
    const auto y = static_cast<std::size_t>(ls.label(i));
    for (std::size_t j = 0; j < s.cols(); ++j) centroid(y, j) += s(i, j);
    count[y] += 1.0;
  }
  for (std::size_t y = 0; y < c; ++y) {
    for (std::size_t j = 0; j < s.cols(); ++j) centroid(y, j) /= count[y];
  }
  std::size_t correct = 0;
  for (NodeId i = 0; i < s.rows(); ++i) {
    std::size_t best = 0;
    double best_d = INFINITY;
    for (std::size_t y = 0; y < c; ++y) {
      double d = 0.0;
      for (std::size_t j = 0; j < s.cols(); ++j) d += std::pow(s(i, j) - centroid(y, j), 2);
      if (d < best_d) {
        best_d = d;
        best = y;
      }
    }
    correct += best == static_cast<std::size_t>(ls.label(i));
  }
  return static_cast<double>(correct) / static_cast<double>(s.rows());
}

LabeledGraph two_k5() {
  const std::vector<std::size_t> sizes{5, 5};
  return generate_sbm(sizes, 1.0, 0.0, 0);
}

LabeledGraph partially_labeled_sbm(std::uint64_t seed) {
  const std::vector<std::size_t> sizes{50, 50};
  auto sbm = generate_sbm(sizes, 0.3, 0.02, seed);
  Mask keep(100);
  for (std::size_t i = 0; i < 100; ++i) keep[i] = i % 4 == 0;
  sbm.labels = mask_labels(sbm.labels, keep);
  return sbm;
}

TEST(InitEmbedding, OrthonormalAndDeterministic) {
  const auto s = init_embedding(10, 3, 42);
  EXPECT_LE(orthonormality_error(s), 1e-10);
  EXPECT_EQ(s, init_embedding(10, 3, 42));
  EXPECT_NE(s, init_embedding(10, 3, 43));
}

TEST(InitEmbedding, SquareIsOrthogonal) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    EXPECT_NEAR(std::abs(determinant(init_embedding(6, 6, seed))), 1.0, 1e-8);
  }
}

TEST(InitEmbedding, RejectsKAboveN) { EXPECT_THROW(init_embedding(2, 3, 0), InvalidArgument); }

TEST(Config, Validation) {
  FuseConfig ok;
  EXPECT_NO_THROW(ok.validate());
  auto bad = ok;
  bad.k = 0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = ok;
  bad.eta = 0.0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = ok;
  bad.iterations = 0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = ok;
  bad.lambda_semi = -1.0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad = ok;
  bad.walks.length = 0;
  EXPECT_THROW(bad.validate(), InvalidArgument);
  bad.mode = Mode::kUnsupervisedOnly;  // walks unused, so not checked
  EXPECT_NO_THROW(bad.validate());
  EXPECT_EQ(parse_mode("semi_only"), Mode::kSemiOnly);
  EXPECT_THROW(parse_mode("all"), InvalidArgument);
  EXPECT_EQ(parse_gradient_kind("exact"), GradientKind::kExact);
}

TEST(RunFuse, SeparatesDisjointCliques) {
  const auto g = two_k5();
  FuseConfig cfg;
  cfg.k = 2;
  cfg.seed = 0;
  for (Mode mode : {Mode::kBoth, Mode::kUnsupervisedOnly}) {
    cfg.mode = mode;
    const auto res = run_fuse(g.graph, g.labels, cfg);
    EXPECT_EQ(nearest_centroid_accuracy(res.embedding, g.labels), 1.0) << to_string(mode);
    EXPECT_LE(orthonormality_error(res.embedding), 1e-8);
  }
}

TEST(RunFuse, ZeroLambdasEqualUnsupervisedOnly) {
  const auto g = partially_labeled_sbm(3);
  FuseConfig both;
  both.k = 4;
  both.iterations = 30;
  both.seed = 9;
  both.lambda_sup = 0.0;
  both.lambda_semi = 0.0;
  both.eta_unsupervised = both.eta;
  auto unsup = both;
  unsup.mode = Mode::kUnsupervisedOnly;
  EXPECT_EQ(run_fuse(g.graph, g.labels, both).embedding,
            run_fuse(g.graph, g.labels, unsup).embedding);
}

TEST(RunFuse, OrthonormalAfterEveryIteration) {
  const auto g = partially_labeled_sbm(4);
  FuseConfig cfg;
  cfg.k = 8;
  cfg.iterations = 50;
  cfg.track_orthonormality = true;
  for (Mode mode : {Mode::kBoth, Mode::kSemiOnly, Mode::kUnsupervisedOnly}) {
    cfg.mode = mode;
    const auto res = run_fuse(g.graph, g.labels, cfg);
    ASSERT_EQ(res.report.iterations.size(), cfg.iterations);
    for (const auto& it : res.report.iterations) EXPECT_LE(it.orthonormality_error, 1e-8);
  }
}

TEST(RunFuse, ReportIsDeterministicAndWellFormed) {
  const auto g = partially_labeled_sbm(5);
  FuseConfig cfg;
  cfg.k = 6;
  cfg.iterations = 25;
  cfg.seed = 123;
  const auto a = run_fuse(g.graph, g.labels, cfg);
  const auto b = run_fuse(g.graph, g.labels, cfg);
  EXPECT_EQ(a.embedding, b.embedding);
  ASSERT_EQ(a.report.iterations.size(), 25u);
  double last = 0.0;
  for (std::size_t t = 0; t < 25; ++t) {
    const auto& x = a.report.iterations[t];
    const auto& y = b.report.iterations[t];
    EXPECT_EQ(x.iteration, t + 1);
    EXPECT_EQ(x.modularity, y.modularity);
    EXPECT_EQ(x.supervised_loss, y.supervised_loss);
    EXPECT_EQ(x.semi_residual, y.semi_residual);
    EXPECT_EQ(x.grad_norm, y.grad_norm);
    EXPECT_GE(x.cum_seconds, last);
    last = x.cum_seconds;
  }
  EXPECT_GT(a.report.walk_sources, 0u);
}

TEST(RunFuse, ModularityRisesOverRun) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const std::vector<std::size_t> sizes{50, 50};
    const auto sbm = generate_sbm(sizes, 0.3, 0.02, seed);
    FuseConfig cfg;
    cfg.k = 2;
    cfg.seed = seed;
    cfg.mode = Mode::kUnsupervisedOnly;
    const auto res = run_fuse(sbm.graph, sbm.labels, cfg);
    EXPECT_GT(res.report.iterations.back().modularity, res.report.iterations.front().modularity);

    const auto part = partially_labeled_sbm(seed);
    cfg.mode = Mode::kBoth;
    const auto both = run_fuse(part.graph, part.labels, cfg);
    EXPECT_GT(both.report.iterations.back().modularity, both.report.initial_modularity);
  }
}

TEST(RunFuse, AttentionRefreshKeepsInvariants) {
  const auto g = partially_labeled_sbm(6);
  FuseConfig cfg;
  cfg.k = 4;
  cfg.iterations = 20;
  cfg.attention_refresh = 5;
  const auto refreshed = run_fuse(g.graph, g.labels, cfg);
  cfg.attention_refresh = 0;
  const auto fixed = run_fuse(g.graph, g.labels, cfg);
  EXPECT_LE(orthonormality_error(refreshed.embedding), 1e-8);
  EXPECT_NE(refreshed.embedding, fixed.embedding);
}

TEST(RunFuse, RankCollapseReportedWithIteration) {
  // eta·lambda_sup = 1 snaps every observed row onto its class mean, leaving
  // rank 2 for k = 3.
  const auto g = two_k5();
  FuseConfig cfg;
  cfg.k = 3;
  cfg.eta = 1.0;
  cfg.mode = Mode::kSemiOnly;
  try {
    run_fuse(g.graph, g.labels, cfg);
    FAIL() << "expected RankDeficiencyError";
  } catch (const RankDeficiencyError& e) {
    EXPECT_NE(std::string(e.what()).find("iteration 1"), std::string::npos) << e.what();
  }
  cfg.rank_recovery = true;
  cfg.iterations = 3;
  const auto res = run_fuse(g.graph, g.labels, cfg);
  EXPECT_GT(res.report.recovered_columns, 0u);
  EXPECT_LE(orthonormality_error(res.embedding), 1e-8);
}

TEST(RunFuse, NonFiniteUpdateNamesPhase) {
  const auto g = two_k5();
  FuseConfig cfg;
  cfg.k = 2;
  cfg.eta = 1e300;
  cfg.lambda_sup = 1e300;
  try {
    run_fuse(g.graph, g.labels, cfg);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("iteration"), std::string::npos);
  }
}

TEST(RunFuse, InputErrors) {
  const auto g = two_k5();
  FuseConfig cfg;
  cfg.k = 11;
  EXPECT_THROW(run_fuse(g.graph, g.labels, cfg), InvalidArgument);
  cfg.k = 2;
  EXPECT_THROW(run_fuse(Graph::from_edges(10, {}), g.labels, cfg), InvalidArgument);
  EXPECT_THROW(run_fuse(g.graph, LabelSet::fully_observed({0, 1}), cfg), DimensionError);
}

TEST(RunFuse, FullyLabeledSkipsWalks) {
  const auto g = two_k5();
  FuseConfig cfg;
  cfg.k = 2;
  cfg.iterations = 5;
  const auto res = run_fuse(g.graph, g.labels, cfg);
  EXPECT_EQ(res.report.walk_sources, 0u);
  EXPECT_EQ(res.report.phases.walks, 0.0);
  for (const auto& it : res.report.iterations) EXPECT_EQ(it.semi_residual, 0.0);
}

TEST(RunFuse, PerIterationCostTracksEdges) {
  // Same n and k, twice the expected edges: per-iteration time may at most
  // grow by 2.5x.
  const std::vector<std::size_t> sizes{2000, 2000};
  const auto sparse = generate_sbm(sizes, 0.02, 0.002, 1);
  const auto dense = generate_sbm(sizes, 0.04, 0.004, 1);
  ASSERT_NEAR(static_cast<double>(dense.graph.num_edges()) / sparse.graph.num_edges(), 2.0, 0.1);
  FuseConfig cfg;
  cfg.k = 16;
  cfg.iterations = 10;
  cfg.mode = Mode::kUnsupervisedOnly;
  auto per_iter = [&](const LabeledGraph& g) {
    double best = INFINITY;
    for (int rep = 0; rep < 3; ++rep) {
      best = std::min(best, run_fuse(g.graph, g.labels, cfg).report.phases.loop / 10.0);
    }
    return best;
  };
  EXPECT_LE(per_iter(dense) / per_iter(sparse), 2.5);
}

}  // namespace
}  // namespace fuse
