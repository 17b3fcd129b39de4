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

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <string>
#include <string_view>

#include <spdlog/spdlog.h>

#include "fuse/error.hpp"
#include "fuse/rng.hpp"
#include "text_util.hpp"

namespace fuse {

using detail::open_input;
using detail::open_output;
using detail::parse_integer;
using detail::skip_line;
using detail::split_fields;
using detail::trim;

Graph Graph::from_edges(std::size_t n, std::span<const Edge> edges, EdgeListStats* stats) {
  if (n > std::numeric_limits<NodeId>::max()) {
    throw InvalidArgument("node count exceeds the 32-bit node id range");
  }
  std::vector<Edge> directed;
  directed.reserve(2 * edges.size());
  std::size_t self_loops = 0;
  for (auto [u, v] : edges) {
    if (u >= n || v >= n) {
      throw InvalidArgument("edge (" + std::to_string(u) + ", " + std::to_string(v) +
                            ") references a node outside 0.." + std::to_string(n - 1));
    }
    if (u == v) {
      ++self_loops;
      continue;
    }
    directed.emplace_back(u, v);
    directed.emplace_back(v, u);
  }
  std::sort(directed.begin(), directed.end());
  directed.erase(std::unique(directed.begin(), directed.end()), directed.end());

  Graph g;
  g.degrees_.assign(n, 0);
  for (auto [u, v] : directed) ++g.degrees_[u];
  g.row_offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) g.row_offsets_[i + 1] = g.row_offsets_[i] + g.degrees_[i];
  g.col_indices_.resize(directed.size());
  for (std::size_t e = 0; e < directed.size(); ++e) g.col_indices_[e] = directed[e].second;
  g.num_edges_ = directed.size() / 2;

  if (stats != nullptr) {
    stats->records = edges.size();
    stats->self_loops = self_loops;
    stats->duplicates = edges.size() - self_loops - g.num_edges_;
    stats->isolated = static_cast<std::size_t>(
        std::count(g.degrees_.begin(), g.degrees_.end(), 0U));
  }
  return g;
}

bool Graph::has_edge(NodeId i, NodeId j) const {
  auto row = neighbors(i);
  return std::binary_search(row.begin(), row.end(), j);
}

std::uint32_t Graph::max_degree() const noexcept {
  return degrees_.empty() ? 0 : *std::max_element(degrees_.begin(), degrees_.end());
}

std::vector<Edge> Graph::edge_list() const {
  std::vector<Edge> out;
  out.reserve(num_edges_);
  for (NodeId u = 0; u < num_nodes(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

IdMap::IdMap(std::vector<std::uint64_t> original_ids) : original_(std::move(original_ids)) {
  to_internal_.reserve(original_.size());
  for (std::size_t i = 0; i < original_.size(); ++i) {
    if (!to_internal_.emplace(original_[i], static_cast<NodeId>(i)).second) {
      throw InvalidArgument("duplicate original id " + std::to_string(original_[i]));
    }
  }
}

IdMap IdMap::identity(std::size_t n) {
  std::vector<std::uint64_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = i;
  return IdMap(std::move(ids));
}

std::optional<NodeId> IdMap::find(std::uint64_t original) const {
  auto it = to_internal_.find(original);
  if (it == to_internal_.end()) return std::nullopt;
  return it->second;
}


EdgeListFormat edge_format_for(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? EdgeListFormat::kCsv : EdgeListFormat::kTsv;
}

LoadedGraph load_edge_list(const std::filesystem::path& path, EdgeListFormat format) {
  auto in = open_input(path);
  const char sep = format == EdgeListFormat::kCsv ? ',' : ' ';

  std::vector<std::uint64_t> originals;
  std::unordered_map<std::uint64_t, NodeId> index;
  auto intern = [&](std::uint64_t id, std::size_t line_no) -> NodeId {
    auto [it, inserted] = index.emplace(id, static_cast<NodeId>(originals.size()));
    if (inserted) {
      if (originals.size() == std::numeric_limits<NodeId>::max()) {
        throw ParseError("node id overflow: more distinct nodes than fit in 32 bits", line_no);
      }
      originals.push_back(id);
    }
    return it->second;
  };

  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    auto fields = split_fields(trim(line), sep);
    if (fields.size() == 1) {
      intern(parse_integer<std::uint64_t>(fields[0], line_no, "node id"), line_no);
    } else if (fields.size() == 2) {
      const NodeId u = intern(parse_integer<std::uint64_t>(fields[0], line_no, "node id"), line_no);
      const NodeId v = intern(parse_integer<std::uint64_t>(fields[1], line_no, "node id"), line_no);
      edges.emplace_back(u, v);
    } else {
      throw ParseError("expected 'u<sep>v' but found " + std::to_string(fields.size()) +
                           " fields",
                       line_no);
    }
  }
  if (originals.empty()) throw ParseError("empty graph in '" + path.string() + "'", 0);

  LoadedGraph out;
  out.graph = Graph::from_edges(originals.size(), edges, &out.stats);
  out.ids = IdMap(std::move(originals));
  const auto& st = out.stats;
  spdlog::info("loaded {}: n={} m={} ({} records, {} duplicates collapsed, {} self-loops dropped)",
               path.string(), out.graph.num_nodes(), out.graph.num_edges(), st.records,
               st.duplicates, st.self_loops);
  if (st.isolated > 0) spdlog::info("{} isolated nodes admitted", st.isolated);
  return out;
}

void write_edge_list(const Graph& g, const IdMap& ids, const std::filesystem::path& path) {
  if (ids.size() != g.num_nodes()) throw DimensionError("write_edge_list: id map size mismatch");
  auto out = open_output(path);
  for (NodeId i = 0; i < g.num_nodes(); ++i) out << ids.original(i) << '\n';
  for (auto [u, v] : g.edge_list()) out << ids.original(u) << '\t' << ids.original(v) << '\n';
}

void write_id_map(const IdMap& ids, const std::filesystem::path& path) {
  auto out = open_output(path);
  out << "original_id,internal_id\n";
  for (NodeId i = 0; i < ids.size(); ++i) out << ids.original(i) << ',' << i << '\n';
}

LabelSet::LabelSet(std::vector<std::int32_t> labels, Mask observed, std::size_t num_classes)
    : labels_(std::move(labels)), observed_(std::move(observed)), num_classes_(num_classes) {
  if (labels_.size() != observed_.size()) {
    throw DimensionError("LabelSet: labels and observed mask differ in length");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const auto c = labels_[i];
    if (c != kUnknown && (c < 0 || static_cast<std::size_t>(c) >= num_classes_)) {
      throw InvalidArgument("LabelSet: class id " + std::to_string(c) + " at node " +
                            std::to_string(i) + " is outside 0.." +
                            std::to_string(num_classes_));
    }
    if (observed_[i] && c == kUnknown) {
      throw InvalidArgument("LabelSet: node " + std::to_string(i) +
                            " is observed but has no label");
    }
  }
}

LabelSet LabelSet::fully_observed(std::vector<std::int32_t> labels) {
  std::int32_t max_class = -1;
  for (auto c : labels) max_class = std::max(max_class, c);
  Mask observed(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) observed[i] = labels[i] != kUnknown;
  return LabelSet(std::move(labels), std::move(observed),
                  static_cast<std::size_t>(max_class + 1));
}

std::size_t LabelSet::observed_count() const {
  return static_cast<std::size_t>(std::count(observed_.begin(), observed_.end(), true));
}

bool LabelSet::any_unobserved() const {
  return std::find(observed_.begin(), observed_.end(), false) != observed_.end();
}

namespace {

template <typename Resolve>
LabelSet read_labels(const std::filesystem::path& path, std::size_t n, Resolve&& resolve) {
  auto in = open_input(path);
  std::vector<std::int32_t> labels(n, LabelSet::kUnknown);
  Mask observed(n, false);
  std::int64_t max_class = -1;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    auto fields = split_fields(trim(line), ',');
    if (fields.size() != 2) throw ParseError("expected 'node_id,class_id'", line_no);
    if (!fields[1].empty() && fields[1].front() == '-') {
      throw ParseError("negative class id '" + std::string(fields[1]) + "'", line_no);
    }
    const NodeId node = resolve(fields[0], line_no);
    const auto cls = parse_integer<std::int64_t>(fields[1], line_no, "class id");
    if (cls > std::numeric_limits<std::int32_t>::max()) {
      throw ParseError("class id overflow", line_no);
    }
    labels[node] = static_cast<std::int32_t>(cls);
    observed[node] = true;
    max_class = std::max(max_class, cls);
  }
  return LabelSet(std::move(labels), std::move(observed),
                  static_cast<std::size_t>(max_class + 1));
}

}  // namespace

LabelSet load_labels(const std::filesystem::path& path, std::size_t n) {
  return read_labels(path, n, [n](std::string_view tok, std::size_t line_no) {
    if (!tok.empty() && tok.front() == '-') {
      throw ParseError("out-of-range node id '" + std::string(tok) + "'", line_no);
    }
    const auto id = parse_integer<std::uint64_t>(tok, line_no, "node id");
    if (id >= n) {
      throw ParseError("out-of-range node id " + std::to_string(id) + " (n = " +
                           std::to_string(n) + ")",
                       line_no);
    }
    return static_cast<NodeId>(id);
  });
}

LabelSet load_labels(const std::filesystem::path& path, const IdMap& ids) {
  return read_labels(path, ids.size(), [&ids](std::string_view tok, std::size_t line_no) {
    if (!tok.empty() && tok.front() == '-') {
      throw ParseError("out-of-range node id '" + std::string(tok) + "'", line_no);
    }
    const auto id = parse_integer<std::uint64_t>(tok, line_no, "node id");
    auto internal = ids.find(id);
    if (!internal) {
      throw ParseError("node id " + std::to_string(id) + " does not occur in the graph",
                       line_no);
    }
    return *internal;
  });
}

void write_labels(const LabelSet& ls, const IdMap& ids, const std::filesystem::path& path) {
  if (ids.size() != ls.size()) throw DimensionError("write_labels: id map size mismatch");
  auto out = open_output(path);
  for (NodeId i = 0; i < ls.size(); ++i) {
    if (ls.observed(i)) out << ids.original(i) << ',' << ls.label(i) << '\n';
  }
}

LabelSet mask_labels(const LabelSet& ls, const Mask& keep) {
  if (keep.size() != ls.size()) {
    throw DimensionError("mask_labels: keep has length " + std::to_string(keep.size()) +
                         ", expected " + std::to_string(ls.size()));
  }
  Mask observed(ls.size());
  for (std::size_t i = 0; i < ls.size(); ++i) observed[i] = ls.observed(i) && keep[i];
  return LabelSet(std::vector<std::int32_t>(ls.labels().begin(), ls.labels().end()),
                  std::move(observed), ls.num_classes());
}

namespace {

// Gap to the next success in a Bernoulli(p) sequence, 0-based.
std::uint64_t geometric_skip(std::mt19937_64& rng, double p) {
  if (p >= 1.0) return 0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double u = unit(rng);
  const double skip = std::floor(std::log1p(-u) / std::log1p(-p));
  if (skip >= static_cast<double>(std::numeric_limits<std::uint64_t>::max() / 2)) {
    return std::numeric_limits<std::uint64_t>::max() / 2;
  }
  return static_cast<std::uint64_t>(skip);
}

// Visits each index in [0, total) independently with probability p.
template <typename Visit>
void sample_indices(std::mt19937_64& rng, double p, std::uint64_t total, Visit&& visit) {
  if (p <= 0.0 || total == 0) return;
  std::uint64_t idx = geometric_skip(rng, p);
  while (idx < total) {
    visit(idx);
    const std::uint64_t step = geometric_skip(rng, p) + 1;
    if (step > total - idx) break;
    idx += step;
  }
}

}  // namespace

LabeledGraph generate_sbm(std::span<const std::size_t> sizes, double p_in, double p_out,
                          std::uint64_t seed) {
  if (!(0.0 <= p_out && p_out <= p_in && p_in <= 1.0)) {
    throw InvalidArgument("generate_sbm requires 0 <= p_out <= p_in <= 1");
  }
  std::vector<std::size_t> start(sizes.size() + 1, 0);
  for (std::size_t b = 0; b < sizes.size(); ++b) start[b + 1] = start[b] + sizes[b];
  const std::size_t n = start.back();

  std::mt19937_64 rng(derive_seed(seed, SeedStream::kGraph));
  std::vector<Edge> edges;
  for (std::size_t a = 0; a < sizes.size(); ++a) {
    const std::uint64_t sa = sizes[a];
    // Pairs (i, j), j < i, within block a; row i holds i pairs.
    sample_indices(rng, p_in, sa * (sa - (sa > 0 ? 1 : 0)) / 2, [&](std::uint64_t idx) {
      auto i = static_cast<std::uint64_t>(
          std::floor((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(idx))) / 2.0));
      while (i * (i - 1) / 2 > idx) --i;
      while ((i + 1) * i / 2 <= idx) ++i;
      const std::uint64_t j = idx - i * (i - 1) / 2;
      edges.emplace_back(static_cast<NodeId>(start[a] + i), static_cast<NodeId>(start[a] + j));
    });
    for (std::size_t b = a + 1; b < sizes.size(); ++b) {
      const std::uint64_t sb = sizes[b];
      sample_indices(rng, p_out, sa * sb, [&](std::uint64_t idx) {
        edges.emplace_back(static_cast<NodeId>(start[a] + idx / sb),
                           static_cast<NodeId>(start[b] + idx % sb));
      });
    }
  }

  std::vector<std::int32_t> labels(n);
  for (std::size_t b = 0; b < sizes.size(); ++b) {
    std::fill(labels.begin() + static_cast<std::ptrdiff_t>(start[b]),
              labels.begin() + static_cast<std::ptrdiff_t>(start[b + 1]),
              static_cast<std::int32_t>(b));
  }
  LabelSet ls(std::move(labels), Mask(n, true), sizes.size());
  return {Graph::from_edges(n, edges), std::move(ls)};
}

}  // namespace fuse
