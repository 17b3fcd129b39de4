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
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fuse {

using NodeId = std::uint32_t;
using Edge = std::pair<NodeId, NodeId>;
using Mask = std::vector<bool>;

// Counters collected while normalizing raw edge records into a simple graph.
struct EdgeListStats {
  std::size_t records = 0;     // edge lines read (node declarations excluded)
  std::size_t self_loops = 0;  // dropped
  std::size_t duplicates = 0;  // repeated undirected pairs collapsed
  std::size_t isolated = 0;    // nodes with degree 0
};

/// Immutable undirected simple graph in CSR form.
///
/// Every undirected edge {u, v} is stored twice (v in row u, u in row v).
/// Rows are sorted ascending with no duplicates and no self-loops.
class Graph {
 public:
  Graph() = default;

  // Normalizes `edges` (symmetrize, dedup, drop self-loops) over nodes 0..n-1.
  static Graph from_edges(std::size_t n, std::span<const Edge> edges,
                          EdgeListStats* stats = nullptr);

  std::size_t num_nodes() const noexcept { return degrees_.size(); }
  std::size_t num_edges() const noexcept { return num_edges_; }

  std::span<const std::size_t> row_offsets() const noexcept { return row_offsets_; }
  std::span<const NodeId> col_indices() const noexcept { return col_indices_; }
  std::span<const std::uint32_t> degrees() const noexcept { return degrees_; }

  std::uint32_t degree(NodeId i) const { return degrees_[i]; }
  std::span<const NodeId> neighbors(NodeId i) const {
    return {col_indices_.data() + row_offsets_[i], degrees_[i]};
  }
  bool has_edge(NodeId i, NodeId j) const;
  std::uint32_t max_degree() const noexcept;

  // Each undirected edge once, as (u, v) with u < v, in row order.
  std::vector<Edge> edge_list() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::size_t num_edges_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<NodeId> col_indices_;
  std::vector<std::uint32_t> degrees_;
};

/// Bidirectional mapping between ids found in input files and internal ids 0..n-1.
class IdMap {
 public:
  IdMap() = default;
  explicit IdMap(std::vector<std::uint64_t> original_ids);

  static IdMap identity(std::size_t n);

  std::size_t size() const noexcept { return original_.size(); }
  std::uint64_t original(NodeId internal) const { return original_[internal]; }
  std::span<const std::uint64_t> originals() const noexcept { return original_; }
  std::optional<NodeId> find(std::uint64_t original) const;

 private:
  std::vector<std::uint64_t> original_;
  std::unordered_map<std::uint64_t, NodeId> to_internal_;
};

enum class EdgeListFormat { kTsv, kCsv };

struct LoadedGraph {
  Graph graph;
  IdMap ids;
  EdgeListStats stats;
};

// Edge-list text: one "u<sep>v" record per line, '#' comments ignored. A line
// holding a single id declares that node without an edge, which is how
// isolated nodes and a fixed id order are expressed. Ids are compacted to
// 0..n-1 in first-seen order. kTsv splits on whitespace, kCsv on commas.
LoadedGraph load_edge_list(const std::filesystem::path& path,
                           EdgeListFormat format = EdgeListFormat::kTsv);
// Format from extension: ".csv" selects kCsv, anything else kTsv.
EdgeListFormat edge_format_for(const std::filesystem::path& path);

// Writes node declarations for 0..n-1 (as original ids) followed by each edge
// once, so load_edge_list reproduces the same internal numbering.
void write_edge_list(const Graph& g, const IdMap& ids, const std::filesystem::path& path);
void write_id_map(const IdMap& ids, const std::filesystem::path& path);

/// Per-node class labels plus the observed mask.
///
/// Ground truth can be present for unobserved nodes (after mask_labels); only
/// observed labels may be used for training signals.
class LabelSet {
 public:
  static constexpr std::int32_t kUnknown = -1;

  LabelSet() = default;
  // Throws InvalidArgument when an observed node has no valid class id.
  LabelSet(std::vector<std::int32_t> labels, Mask observed, std::size_t num_classes);

  // All nodes observed.
  static LabelSet fully_observed(std::vector<std::int32_t> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t num_classes() const noexcept { return num_classes_; }
  std::int32_t label(NodeId i) const { return labels_[i]; }
  bool observed(NodeId i) const { return observed_[i]; }
  bool has_truth(NodeId i) const { return labels_[i] != kUnknown; }
  std::span<const std::int32_t> labels() const noexcept { return labels_; }
  const Mask& observed_mask() const noexcept { return observed_; }
  std::size_t observed_count() const;
  bool any_unobserved() const;

  friend bool operator==(const LabelSet&, const LabelSet&) = default;

 private:
  std::vector<std::int32_t> labels_;
  Mask observed_;
  std::size_t num_classes_ = 0;
};

// "node_id,class_id" lines with internal node ids (< n).
LabelSet load_labels(const std::filesystem::path& path, std::size_t n);
// Same format, node ids interpreted as original ids from an edge file.
LabelSet load_labels(const std::filesystem::path& path, const IdMap& ids);
void write_labels(const LabelSet& ls, const IdMap& ids, const std::filesystem::path& path);

// observed' = observed AND keep; labels are untouched.
LabelSet mask_labels(const LabelSet& ls, const Mask& keep);

struct LabeledGraph {
  Graph graph;
  LabelSet labels;
};

// Stochastic block model with block index as fully observed label.
// Pure function of its arguments.
LabeledGraph generate_sbm(std::span<const std::size_t> sizes, double p_in, double p_out,
                          std::uint64_t seed);

}  // namespace fuse
