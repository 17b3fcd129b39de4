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

#include "fuse/dense_matrix.hpp"
#include "fuse/graph.hpp"

namespace fuse {

// The modularity matrix B = A − d·dᵀ/2m is dense, so nothing here forms it.
// Every quantity is expressed through spmm (A·S) and the degree vector.

/// Relaxed modularity Q(S) = (1/2m)·Tr(Sᵀ B S).
///
/// Computed as (1/2m)·[Tr(Sᵀ·A·S) − (1/2m)·‖dᵀS‖²]. Throws InvalidArgument
/// when the graph has no edges.
double modularity_value(const Graph& g, const EmbeddingMatrix& s);

// Same value, reusing a precomputed A·S.
double modularity_value(const Graph& g, const EmbeddingMatrix& s, const DenseMatrix& as);

// (1/m)·(A·S − (1/2m)·d·(dᵀS)) = (1/m)·B·S, the full derivative dQ/dS.
DenseMatrix grad_modularity_exact(const Graph& g, const EmbeddingMatrix& s);

// (1/2m)·(A·S − (1/2m)·d·(1ᵀS)): the degree-weighted column mean of the exact
// form replaced by the plain column sum. O(|E|·k + n·k).
DenseMatrix grad_modularity_proposed(const Graph& g, const EmbeddingMatrix& s);

enum class GradientKind { kProposed, kExact };

DenseMatrix grad_modularity(const Graph& g, const EmbeddingMatrix& s, GradientKind kind);
// Variant that takes A·S when the caller already has it.
DenseMatrix grad_modularity(const Graph& g, const EmbeddingMatrix& s, const DenseMatrix& as,
                            GradientKind kind);

// Class-compactness loss: sum over observed i of ‖s_i − μ_c(i)‖², where μ_c
// is the mean of the observed rows of class c.
double supervised_loss(const EmbeddingMatrix& s, const LabelSet& ls);

// Row i = s_i − μ_c(i) for observed i, zero otherwise. Classes without
// observed members contribute nothing.
DenseMatrix grad_supervised(const EmbeddingMatrix& s, const LabelSet& ls);

struct GradientBundle {
  DenseMatrix grad_mod;
  DenseMatrix grad_sup;
  DenseMatrix grad_semi;
};

}  // namespace fuse
