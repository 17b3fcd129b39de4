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

#include "fuse/graph.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fuse/error.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

namespace fuse {
namespace {

using testing::TempDir;

void expect_csr_invariants(const Graph& g) {
  const auto off = g.row_offsets();
  const auto col = g.col_indices();
  ASSERT_EQ(off.size(), g.num_nodes() + 1);
  ASSERT_EQ(col.size(), 2 * g.num_edges());
  std::size_t degree_sum = 0;
  for (NodeId i = 0; i < g.num_nodes(); ++i) {
    EXPECT_EQ(g.degree(i), off[i + 1] - off[i]);
    degree_sum += g.degree(i);
    const auto nbrs = g.neighbors(i);
    for (std::size_t e = 0; e < nbrs.size(); ++e) {
      EXPECT_NE(nbrs[e], i);
      if (e > 0) EXPECT_LT(nbrs[e - 1], nbrs[e]);
      EXPECT_TRUE(g.has_edge(nbrs[e], i));
    }
  }
  EXPECT_EQ(degree_sum, 2 * g.num_edges());
}

TEST(EdgeList, TriangleLoads) {
  TempDir dir;
  const auto loaded = load_edge_list(dir.write("t.tsv", "0 1\n1 2\n2 0\n"), EdgeListFormat::kTsv);
  EXPECT_EQ(loaded.graph.num_nodes(), 3u);
  EXPECT_EQ(loaded.graph.num_edges(), 3u);
  for (NodeId i = 0; i < 3; ++i) EXPECT_EQ(loaded.graph.degree(i), 2u);
  expect_csr_invariants(loaded.graph);
}

TEST(EdgeList, DuplicatesAndSelfLoopsNormalized) {
  TempDir dir;
  const auto loaded = load_edge_list(dir.write("d.tsv", "0 1\n1 0\n0 0\n"), EdgeListFormat::kTsv);
  EXPECT_EQ(loaded.graph.num_nodes(), 2u);
  EXPECT_EQ(loaded.graph.num_edges(), 1u);
  EXPECT_EQ(loaded.stats.records, 3u);
  EXPECT_EQ(loaded.stats.self_loops, 1u);
  EXPECT_EQ(loaded.stats.duplicates, 1u);
}

TEST(EdgeList, SparseIdsCompactedInFirstSeenOrder) {
  TempDir dir;
  const auto loaded =
      load_edge_list(dir.write("s.csv", "# comment\n900,17\n17,5\n"), EdgeListFormat::kCsv);
  ASSERT_EQ(loaded.ids.size(), 3u);
  EXPECT_EQ(loaded.ids.original(0), 900u);
  EXPECT_EQ(loaded.ids.original(1), 17u);
  EXPECT_EQ(loaded.ids.original(2), 5u);
  EXPECT_EQ(loaded.ids.find(5), NodeId{2});
  EXPECT_FALSE(loaded.ids.find(4).has_value());
  EXPECT_TRUE(loaded.graph.has_edge(0, 1));
  EXPECT_TRUE(loaded.graph.has_edge(1, 2));
  EXPECT_FALSE(loaded.graph.has_edge(0, 2));
}

TEST(EdgeList, NodeDeclarationAdmitsIsolatedNode) {
  TempDir dir;
  const auto loaded = load_edge_list(dir.write("i.tsv", "0\n1\n2\n0 1\n"), EdgeListFormat::kTsv);
  EXPECT_EQ(loaded.graph.num_nodes(), 3u);
  EXPECT_EQ(loaded.graph.degree(2), 0u);
  EXPECT_EQ(loaded.stats.isolated, 1u);
}

TEST(EdgeList, ParseErrorReportsLine) {
  TempDir dir;
  const auto p = dir.write("bad.tsv", "0 1\n1 x\n");
  try {
    load_edge_list(p, EdgeListFormat::kTsv);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(load_edge_list(dir.write("three.tsv", "0 1 2\n"), EdgeListFormat::kTsv), ParseError);
  EXPECT_THROW(load_edge_list(dir.write("neg.tsv", "0 -1\n"), EdgeListFormat::kTsv), ParseError);
}

TEST(EdgeList, EmptyAndOverflowRejected) {
  TempDir dir;
  EXPECT_THROW(load_edge_list(dir.write("e.tsv", "# nothing\n"), EdgeListFormat::kTsv), ParseError);
  try {
    load_edge_list(dir.write("o.tsv", "0 99999999999999999999999\n"), EdgeListFormat::kTsv);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("overflow"), std::string::npos);
  }
  EXPECT_THROW(load_edge_list(dir.path() / "missing.tsv", EdgeListFormat::kTsv), Error);
}

TEST(EdgeList, RoundTripOnRandomGraphs) {
  std::mt19937_64 rng(11);
  TempDir dir;
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = oracle::random_graph(5 + trial * 3, 0.2, rng);
    const auto ids = IdMap::identity(g.num_nodes());
    const auto path = dir.path() / ("g" + std::to_string(trial) + ".tsv");
    write_edge_list(g, ids, path);
    const auto back = load_edge_list(path, EdgeListFormat::kTsv);
    EXPECT_EQ(back.graph, g);
    expect_csr_invariants(back.graph);
  }
}

TEST(Graph, OutOfRangeEdgeRejected) {
  const std::vector<Edge> edges{{0, 3}};
  EXPECT_THROW(Graph::from_edges(3, edges), InvalidArgument);
}

TEST(Labels, LoadMarksListedNodesObserved) {
  TempDir dir;
  const auto ls = load_labels(dir.write("l.csv", "0,0\n2,1\n"), 3);
  EXPECT_EQ(ls.num_classes(), 2u);
  EXPECT_TRUE(ls.observed(0));
  EXPECT_FALSE(ls.observed(1));
  EXPECT_TRUE(ls.observed(2));
  EXPECT_EQ(ls.label(0), 0);
  EXPECT_EQ(ls.label(1), LabelSet::kUnknown);
  EXPECT_EQ(ls.label(2), 1);
}

TEST(Labels, EmptyFileIsFullyUnlabeled) {
  TempDir dir;
  const auto ls = load_labels(dir.write("l.csv", ""), 3);
  EXPECT_EQ(ls.num_classes(), 0u);
  EXPECT_EQ(ls.observed_count(), 0u);
}

TEST(Labels, InvalidRowsRejected) {
  TempDir dir;
  EXPECT_THROW(load_labels(dir.write("a.csv", "3,0\n"), 3), Error);
  EXPECT_THROW(load_labels(dir.write("b.csv", "0,-2\n"), 3), Error);
  EXPECT_THROW(LabelSet({5}, Mask{true}, 2), InvalidArgument);
}

TEST(Labels, MaskLabels) {
  const auto ls = LabelSet::fully_observed({0, 1, 0});
  const auto masked = mask_labels(ls, {true, false, true});
  EXPECT_EQ(masked.observed_mask(), (Mask{true, false, true}));
  EXPECT_EQ(masked.labels()[1], 1);  // ground truth retained
  EXPECT_EQ(mask_labels(ls, Mask(3, true)), ls);
  EXPECT_EQ(mask_labels(ls, Mask(3, false)).observed_count(), 0u);
  EXPECT_THROW(mask_labels(ls, Mask(2, true)), DimensionError);
}

TEST(Sbm, DeterministicExtremes) {
  const std::vector<std::size_t> two{5, 5};
  const auto sbm = generate_sbm(two, 1.0, 0.0, 3);
  const Graph expected = Graph::from_edges(10, oracle::two_disjoint_cliques(5));
  EXPECT_EQ(sbm.graph, expected);
  for (NodeId i = 0; i < 10; ++i) EXPECT_EQ(sbm.labels.label(i), i < 5 ? 0 : 1);

  const std::vector<std::size_t> one{3};
  const auto tri = generate_sbm(one, 1.0, 0.0, 0);
  EXPECT_EQ(tri.graph.num_edges(), 3u);
  for (NodeId i = 0; i < 3; ++i) EXPECT_EQ(tri.labels.label(i), 0);
}

TEST(Sbm, EdgeCountWithinFourSigma) {
  const std::vector<std::size_t> sizes{100, 100};
  const auto sbm = generate_sbm(sizes, 0.3, 0.01, 7);
  const double in_pairs = 2.0 * 100 * 99 / 2, out_pairs = 100.0 * 100;
  const double mean = 0.3 * in_pairs + 0.01 * out_pairs;
  const double sigma = std::sqrt(0.3 * 0.7 * in_pairs + 0.01 * 0.99 * out_pairs);
  EXPECT_LE(std::abs(static_cast<double>(sbm.graph.num_edges()) - mean), 4.0 * sigma);
  expect_csr_invariants(sbm.graph);
}

TEST(Sbm, PureFunctionOfSeed) {
  const std::vector<std::size_t> sizes{30, 20, 10};
  const auto a = generate_sbm(sizes, 0.4, 0.05, 21);
  const auto b = generate_sbm(sizes, 0.4, 0.05, 21);
  const auto c = generate_sbm(sizes, 0.4, 0.05, 22);
  EXPECT_EQ(a.graph, b.graph);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_NE(a.graph, c.graph);
}

TEST(Sbm, WithinBlockPairsAreUniform) {
  // Every within-block pair should appear with frequency near p_in across seeds.
  const std::vector<std::size_t> sizes{6};
  std::vector<std::vector<int>> hits(6, std::vector<int>(6, 0));
  const int trials = 4000;
  for (int s = 0; s < trials; ++s) {
    const auto sbm = generate_sbm(sizes, 0.5, 0.0, static_cast<std::uint64_t>(s));
    for (auto [u, v] : sbm.graph.edge_list()) ++hits[u][v];
  }
  const double sigma = std::sqrt(0.25 * trials);
  for (int i = 0; i < 6; ++i) {
    for (int j = i + 1; j < 6; ++j) EXPECT_LE(std::abs(hits[i][j] - 0.5 * trials), 4.5 * sigma);
  }
}

TEST(Sbm, InvalidProbabilitiesRejected) {
  const std::vector<std::size_t> sizes{4, 4};
  EXPECT_THROW(generate_sbm(sizes, 0.1, 0.2, 0), InvalidArgument);
  EXPECT_THROW(generate_sbm(sizes, 1.5, 0.2, 0), InvalidArgument);
  EXPECT_THROW(generate_sbm(sizes, 0.5, -0.1, 0), InvalidArgument);
}

}  // namespace
}  // namespace fuse
