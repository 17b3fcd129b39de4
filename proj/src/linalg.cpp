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

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fuse/error.hpp"
#include "fuse/parallel.hpp"

namespace fuse {

DenseMatrix spmm(const Graph& g, const DenseMatrix& s) {
  if (s.rows() != g.num_nodes()) {
    throw DimensionError("spmm: embedding has " + std::to_string(s.rows()) +
                         " rows, graph has " + std::to_string(g.num_nodes()) + " nodes");
  }
  DenseMatrix out(s.rows(), s.cols());
  const std::size_t k = s.cols();
  parallel_for(0, g.num_nodes(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) {
      double* dst = out.row(i).data();
      for (NodeId j : g.neighbors(static_cast<NodeId>(i))) {
        const double* src = s.row(j).data();
        for (std::size_t c = 0; c < k; ++c) dst[c] += src[c];
      }
    }
  });
  return out;
}

DenseMatrix rank_one_update(std::span<const std::uint32_t> d, std::span<const double> rowsum,
                            double scale) {
  DenseMatrix out(d.size(), rowsum.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double w = scale * static_cast<double>(d[i]);
    auto r = out.row(i);
    for (std::size_t c = 0; c < rowsum.size(); ++c) r[c] = w * rowsum[c];
  }
  return out;
}

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Row tiles of about this many entries stay cache resident during their factorization.
// Tiles are at least 16k rows tall so the stacked R stage stays small.
constexpr Eigen::Index kTileEntries = 32768;

// Householder factorization of a tall block: thin Q and R without sign fixing.
void householder_thin(const Eigen::MatrixXd& a, Eigen::MatrixXd& q, Eigen::MatrixXd& r) {
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  r = qr.matrixQR().topRows(a.cols()).template triangularView<Eigen::Upper>();
  q = Eigen::MatrixXd::Identity(a.rows(), a.cols());
  q.applyOnTheLeft(qr.householderQ());
}

}  // namespace

ThinQr thin_qr(const DenseMatrix& s) {
  const auto n = static_cast<Eigen::Index>(s.rows());
  const auto k = static_cast<Eigen::Index>(s.cols());
  if (n < k) {
    throw DimensionError("thin_qr: need rows >= cols, got " + std::to_string(n) + "x" +
                         std::to_string(k));
  }
  Eigen::Map<const RowMajor> in(s.values().data(), n, k);
  const Eigen::Index tile = std::max<Eigen::Index>(16 * k, kTileEntries / std::max<Eigen::Index>(k, 1));
  const Eigen::Index tiles = n >= 2 * tile ? n / tile : 1;

  // Tall-skinny QR: factor each row tile, then factor the stacked tile R
  // factors. The last tile absorbs the remainder rows.
  std::vector<Eigen::MatrixXd> tile_q(static_cast<std::size_t>(tiles));
  Eigen::MatrixXd stacked(tiles * k, k);
  Eigen::MatrixXd r;
  for (Eigen::Index t = 0; t < tiles; ++t) {
    const Eigen::Index begin = t * tile;
    const Eigen::Index rows = t + 1 == tiles ? n - begin : tile;
    householder_thin(in.middleRows(begin, rows), tile_q[static_cast<std::size_t>(t)], r);
    stacked.middleRows(t * k, k) = r;
  }
  Eigen::MatrixXd top;
  if (tiles > 1) {
    householder_thin(stacked, top, r);
  } else {
    top = Eigen::MatrixXd::Identity(k, k);
  }

  for (Eigen::Index j = 0; j < k; ++j) {
    if (!(std::abs(r(j, j)) >= kRankTolerance)) {
      throw RankDeficiencyError(static_cast<std::size_t>(j), std::abs(r(j, j)));
    }
    if (r(j, j) < 0.0) {
      top.col(j) = -top.col(j);
      r.row(j) = -r.row(j);
    }
  }

  ThinQr out{DenseMatrix(s.rows(), s.cols()), DenseMatrix(s.cols(), s.cols())};
  Eigen::Map<RowMajor> q(out.q.values().data(), n, k);
  for (Eigen::Index t = 0; t < tiles; ++t) {
    const Eigen::Index begin = t * tile;
    const Eigen::Index rows = t + 1 == tiles ? n - begin : tile;
    q.middleRows(begin, rows).noalias() =
        tile_q[static_cast<std::size_t>(t)] * top.middleRows(t * k, k);
  }
  Eigen::Map<RowMajor>(out.r.values().data(), k, k) = r;
  return out;
}

EmbeddingMatrix thin_qr_orthonormalize(const EmbeddingMatrix& s) { return thin_qr(s).q; }

}  // namespace fuse
