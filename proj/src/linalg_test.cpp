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

#include "fuse/linalg.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fuse/error.hpp"
#include "support/oracles.hpp"

namespace fuse {
namespace {

Graph path3() {
  const std::vector<Edge> e{{0, 1}, {1, 2}};
  return Graph::from_edges(3, e);
}

Graph triangle() {
  const std::vector<Edge> e{{0, 1}, {1, 2}, {2, 0}};
  return Graph::from_edges(3, e);
}

TEST(Spmm, HandExamples) {
  const auto ones = spmm(triangle(), DenseMatrix(3, 1, 1.0));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(ones(i, 0), 2.0);

  DenseMatrix s(3, 1);
  s(0, 0) = 1;
  s(1, 0) = 10;
  s(2, 0) = 100;
  const auto out = spmm(path3(), s);
  EXPECT_EQ(out(0, 0), 10.0);
  EXPECT_EQ(out(1, 0), 101.0);
  EXPECT_EQ(out(2, 0), 10.0);

  const Graph empty = Graph::from_edges(4, {});
  std::mt19937_64 rng(1);
  const auto z = spmm(empty, oracle::random_matrix(4, 3, rng));
  for (double v : z.values()) EXPECT_EQ(v, 0.0);
}

TEST(Spmm, MatchesDenseProduct) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + rng() % 49;
    const Graph g = oracle::random_graph(n, 0.15, rng);
    const auto s = oracle::random_matrix(n, 1 + rng() % 6, rng);
    EXPECT_LE(max_abs_diff(spmm(g, s), oracle::dense_times(oracle::adjacency(g), s)), 1e-12);
  }
}

TEST(Spmm, DimensionMismatch) {
  EXPECT_THROW(spmm(triangle(), DenseMatrix(4, 1)), DimensionError);
}

TEST(RankOneUpdate, HandExamples) {
  const std::vector<std::uint32_t> d{2, 2, 2};
  const std::vector<double> three{3.0};
  const auto a = rank_one_update(d, three, 1.0 / 6.0);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(a(i, 0), 1.0);

  const auto zero = rank_one_update(d, three, 0.0);
  for (double v : zero.values()) EXPECT_EQ(v, 0.0);

  const std::vector<std::uint32_t> d2{1, 0};
  const std::vector<double> rs{5.0, 7.0};
  const auto b = rank_one_update(d2, rs, 1.0);
  EXPECT_EQ(b(0, 0), 5.0);
  EXPECT_EQ(b(0, 1), 7.0);
  EXPECT_EQ(b(1, 0), 0.0);
  EXPECT_EQ(b(1, 1), 0.0);
}

TEST(ThinQr, SingleColumnNormalized) {
  DenseMatrix s(2, 1);
  s(0, 0) = 3;
  s(1, 0) = 4;
  const auto q = thin_qr_orthonormalize(s);
  EXPECT_NEAR(q(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(q(1, 0), 0.8, 1e-15);
}

TEST(ThinQr, FactorizationResidual) {
  std::mt19937_64 rng(1);
  const auto s = oracle::random_matrix(100, 8, rng);
  const auto qr = thin_qr(s);
  EXPECT_LE(orthonormality_error(qr.q), 1e-10);
  EXPECT_LE(max_abs_diff(multiply(qr.q, qr.r), s), 1e-9);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_GE(qr.r(i, i), 0.0);
    for (std::size_t j = 0; j < i; ++j) EXPECT_EQ(qr.r(i, j), 0.0);
  }
}

TEST(ThinQr, IdempotentOnOrthonormalInput) {
  std::mt19937_64 rng(2);
  const auto q = thin_qr_orthonormalize(oracle::random_matrix(40, 6, rng));
  EXPECT_LE(max_abs_diff(thin_qr_orthonormalize(q), q), 1e-12);
}

TEST(ThinQr, MatchesGramSchmidtAndPreservesSpan) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 10 + rng() % 40;
    const std::size_t k = 1 + rng() % 8;
    const auto s = oracle::random_matrix(n, k, rng);
    const auto q = thin_qr_orthonormalize(s);
    // Gram-Schmidt yields the positive-diagonal Q, so the two must agree.
    EXPECT_LE(max_abs_diff(q, oracle::gram_schmidt(s)), 1e-9);
    const auto coeff = transpose_times(q, s);
    const auto projected = multiply(q, coeff);
    EXPECT_LE(max_abs_diff(projected, s), 1e-9);
  }
}

TEST(ThinQr, TiledFactorizationOfTallInput) {
  // Tall enough to be split into row tiles, with a remainder tile.
  std::mt19937_64 rng(8);
  for (std::size_t k : {4u, 16u, 32u}) {
    const auto s = oracle::random_matrix(20000 + 37, k, rng);
    const auto qr = thin_qr(s);
    EXPECT_LE(orthonormality_error(qr.q), 1e-12);
    EXPECT_LE(max_abs_diff(multiply(qr.q, qr.r), s), 1e-9);
    for (std::size_t j = 0; j < k; ++j) {
      EXPECT_GT(qr.r(j, j), 0.0);
      for (std::size_t i = j + 1; i < k; ++i) EXPECT_EQ(qr.r(i, j), 0.0);
    }
    EXPECT_LE(max_abs_diff(qr.q, oracle::gram_schmidt(s)), 1e-9);
  }
}

TEST(ThinQr, BitIdenticalAcrossCalls) {
  std::mt19937_64 rng(4);
  const auto s = oracle::random_matrix(60, 5, rng);
  EXPECT_EQ(thin_qr_orthonormalize(s), thin_qr_orthonormalize(s));
}

TEST(ThinQr, SquareInputGivesOrthogonalMatrix) {
  std::mt19937_64 rng(6);
  const auto q = thin_qr_orthonormalize(oracle::random_matrix(5, 5, rng));
  EXPECT_LE(orthonormality_error(q), 1e-12);
}

TEST(ThinQr, RankDeficiencyNamesColumn) {
  std::mt19937_64 rng(7);
  auto s = oracle::random_matrix(20, 4, rng);
  for (std::size_t i = 0; i < 20; ++i) s(i, 2) = 2.0 * s(i, 0) - s(i, 1);
  try {
    thin_qr(s);
    FAIL() << "expected RankDeficiencyError";
  } catch (const RankDeficiencyError& e) {
    EXPECT_EQ(e.column(), 2u);
    EXPECT_LT(e.diagonal(), kRankTolerance);
  }
  EXPECT_THROW(thin_qr(DenseMatrix(2, 3, 1.0)), DimensionError);
}

}  // namespace
}  // namespace fuse
