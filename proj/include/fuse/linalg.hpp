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

#pragma once

#include <cstdint>
#include <span>

#include "fuse/dense_matrix.hpp"
#include "fuse/graph.hpp"

namespace fuse {

// out[i,:] = sum over neighbors j of i of s[j,:]  (A·S without forming A).
DenseMatrix spmm(const Graph& g, const DenseMatrix& s);

// out[i,c] = scale * d[i] * rowsum[c]; the n×n outer product is never formed.
DenseMatrix rank_one_update(std::span<const std::uint32_t> d, std::span<const double> rowsum,
                            double scale);

// |R[j,j]| below this marks column j as linearly dependent on columns 0..j-1.
inline constexpr double kRankTolerance = 1e-12;

struct ThinQr {
  DenseMatrix q;  // n×k, orthonormal columns
  DenseMatrix r;  // k×k, upper triangular with non-negative diagonal
};

/// Householder thin QR of an n×k matrix (n ≥ k).
///
/// Signs are fixed so that diag(R) ≥ 0, which makes Q unique for full-rank
/// input and the result reproducible bit-for-bit. Throws RankDeficiencyError
/// naming the first column with |R[j,j]| < kRankTolerance.
ThinQr thin_qr(const DenseMatrix& s);

// Q factor of thin_qr(s).
EmbeddingMatrix thin_qr_orthonormalize(const EmbeddingMatrix& s);

}  // namespace fuse
