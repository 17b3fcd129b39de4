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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "fuse/dense_matrix.hpp"
#include "fuse/graph.hpp"

namespace fuse {

struct WalkParams {
  std::size_t walks_per_node = 10;  // r
  std::size_t length = 5;           // L
  std::size_t labeled_cap = 3;      // L′: labeled visits recorded per walk
  // Selection weight of an observed neighbor relative to an unobserved one.
  // 1 draws neighbors uniformly.
  double labeled_bias = 1.0;

  void validate() const;
};

struct VisitCount {
  NodeId node;
  std::uint32_t count;
  friend bool operator==(const VisitCount&, const VisitCount&) = default;
};

/// Labeled nodes reached from each source, with visit multiplicity.
///
/// Rows are sorted by node id. Observed sources have empty rows because their
/// walks are never consumed downstream.
class WalkRecord {
 public:
  WalkRecord() = default;
  WalkRecord(std::vector<std::size_t> offsets, std::vector<VisitCount> visits);

  std::size_t num_sources() const noexcept { return offsets_.size() - 1; }
  std::span<const VisitCount> visits(NodeId source) const {
    return {visits_.data() + offsets_[source], offsets_[source + 1] - offsets_[source]};
  }
  std::size_t total_visits(NodeId source) const;

  friend bool operator==(const WalkRecord&, const WalkRecord&) = default;

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<VisitCount> visits_;
};

// Per-walk recorded-visit counts, indexed [source * walks_per_node + walk].
struct WalkTrace {
  std::size_t walks_per_node = 0;
  std::vector<std::uint32_t> recorded;
};

// r walks of L steps from every unobserved node; each step moves to a neighbor
// of the current node. Observed nodes stepped on are recorded until L′ of them
// have been recorded in that walk; the walk itself runs its full length.
// Source i draws from its own stream derived from (seed, i), so the result
// does not depend on the worker count.
WalkRecord labeled_random_walks(const Graph& g, const LabelSet& ls, const WalkParams& params,
                                std::uint64_t seed, WalkTrace* trace = nullptr);

// "source,visited,count" rows, ids translated through `ids`.
void write_walk_record_csv(const WalkRecord& w, const IdMap& ids,
                           const std::filesystem::path& path);

struct AttentionEntry {
  NodeId node;
  double weight;
};

/// Softmax attention of each unobserved node over the labeled nodes its walks reached.
class AttentionTable {
 public:
  AttentionTable() = default;
  AttentionTable(std::vector<std::size_t> offsets, std::vector<AttentionEntry> entries);

  std::size_t num_sources() const noexcept { return offsets_.size() - 1; }
  std::span<const AttentionEntry> row(NodeId source) const {
    return {entries_.data() + offsets_[source], offsets_[source + 1] - offsets_[source]};
  }
  std::size_t num_entries() const noexcept { return entries_.size(); }

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<AttentionEntry> entries_;
};

// w_ij = c_j·exp(s_i·s_j) / Σ_k c_k·exp(s_i·s_k) over the distinct recorded
// nodes j of source i, c_j being the visit count (the same as a softmax over
// the visit multiset). The row maximum is subtracted before exponentiation.
AttentionTable compute_attention(const EmbeddingMatrix& s, const WalkRecord& walks,
                                 const LabelSet& ls);

// Row i = s_i − Σ_j w_ij·s_j for sources with a non-empty attention row; zero elsewhere.
DenseMatrix grad_semi(const EmbeddingMatrix& s, const AttentionTable& att);

// Σ_i ‖s_i − Σ_j w_ij·s_j‖² (squared Frobenius norm of grad_semi).
double semi_residual(const EmbeddingMatrix& s, const AttentionTable& att);

}  // namespace fuse
