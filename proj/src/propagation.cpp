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

#include "fuse/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <string>

#include "fuse/error.hpp"
#include "fuse/parallel.hpp"
#include "fuse/rng.hpp"

namespace fuse {

void WalkParams::validate() const {
  if (walks_per_node < 1) throw InvalidArgument("walks per node (r) must be >= 1");
  if (length < 1) throw InvalidArgument("walk length (L) must be >= 1");
  if (labeled_cap < 1) throw InvalidArgument("labeled step cap (L_cap) must be >= 1");
  if (!(labeled_bias >= 1.0) || !std::isfinite(labeled_bias)) {
    throw InvalidArgument("labeled-walk bias (beta) must be a finite value >= 1");
  }
}

WalkRecord::WalkRecord(std::vector<std::size_t> offsets, std::vector<VisitCount> visits)
    : offsets_(std::move(offsets)), visits_(std::move(visits)) {
  if (offsets_.empty() || offsets_.back() != visits_.size()) {
    throw InvalidArgument("WalkRecord: offsets do not cover the visit list");
  }
}

std::size_t WalkRecord::total_visits(NodeId source) const {
  std::size_t total = 0;
  for (const auto& v : visits(source)) total += v.count;
  return total;
}

namespace {

NodeId pick_neighbor(const Graph& g, const LabelSet& ls, NodeId current, double bias,
                     std::mt19937_64& rng) {
  auto nbrs = g.neighbors(current);
  if (bias == 1.0) {
    std::uniform_int_distribution<std::size_t> pick(0, nbrs.size() - 1);
    return nbrs[pick(rng)];
  }
  double total = 0.0;
  for (NodeId v : nbrs) total += ls.observed(v) ? bias : 1.0;
  std::uniform_real_distribution<double> unit(0.0, total);
  double target = unit(rng);
  for (NodeId v : nbrs) {
    target -= ls.observed(v) ? bias : 1.0;
    if (target < 0.0) return v;
  }
  return nbrs.back();
}

}  // namespace

WalkRecord labeled_random_walks(const Graph& g, const LabelSet& ls, const WalkParams& params,
                                std::uint64_t seed, WalkTrace* trace) {
  params.validate();
  if (ls.size() != g.num_nodes()) {
    throw DimensionError("labeled_random_walks: label set size does not match the graph");
  }
  const std::size_t n = g.num_nodes();
  const std::size_t r = params.walks_per_node;
  if (trace != nullptr) {
    trace->walks_per_node = r;
    trace->recorded.assign(n * r, 0);
  }
  const bool any_labeled = ls.observed_count() > 0;

  std::vector<std::vector<VisitCount>> rows(n);
  parallel_for(
      0, n,
      [&](std::size_t lo, std::size_t hi) {
        std::vector<NodeId> hits;
        for (std::size_t src = lo; src < hi; ++src) {
          const auto source = static_cast<NodeId>(src);
          if (!any_labeled || ls.observed(source) || g.degree(source) == 0) continue;
          std::mt19937_64 rng(derive_seed(seed, src));
          hits.clear();
          for (std::size_t walk = 0; walk < r; ++walk) {
            NodeId current = source;
            std::uint32_t recorded = 0;
            for (std::size_t step = 0; step < params.length; ++step) {
              current = pick_neighbor(g, ls, current, params.labeled_bias, rng);
              if (ls.observed(current) && recorded < params.labeled_cap) {
                ++recorded;
                hits.push_back(current);
              }
            }
            if (trace != nullptr) trace->recorded[src * r + walk] = recorded;
          }
          std::sort(hits.begin(), hits.end());
          auto& row = rows[src];
          for (std::size_t a = 0; a < hits.size();) {
            std::size_t b = a;
            while (b < hits.size() && hits[b] == hits[a]) ++b;
            row.push_back({hits[a], static_cast<std::uint32_t>(b - a)});
            a = b;
          }
        }
      },
      16);

  std::vector<std::size_t> offsets(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] = offsets[i] + rows[i].size();
  std::vector<VisitCount> visits;
  visits.reserve(offsets.back());
  for (auto& row : rows) visits.insert(visits.end(), row.begin(), row.end());
  return WalkRecord(std::move(offsets), std::move(visits));
}

void write_walk_record_csv(const WalkRecord& w, const IdMap& ids,
                           const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << "source,visited,count\n";
  for (NodeId i = 0; i < w.num_sources(); ++i) {
    for (const auto& v : w.visits(i)) {
      out << ids.original(i) << ',' << ids.original(v.node) << ',' << v.count << '\n';
    }
  }
}

AttentionTable::AttentionTable(std::vector<std::size_t> offsets,
                               std::vector<AttentionEntry> entries)
    : offsets_(std::move(offsets)), entries_(std::move(entries)) {
  if (offsets_.empty() || offsets_.back() != entries_.size()) {
    throw InvalidArgument("AttentionTable: offsets do not cover the entry list");
  }
}

AttentionTable compute_attention(const EmbeddingMatrix& s, const WalkRecord& walks,
                                 const LabelSet& ls) {
  const std::size_t n = s.rows();
  if (walks.num_sources() != n || ls.size() != n) {
    throw DimensionError("compute_attention: embedding, walk record and labels disagree on n");
  }
  std::vector<std::size_t> offsets(n + 1, 0);
  for (NodeId i = 0; i < n; ++i) {
    offsets[i + 1] = offsets[i] + (ls.observed(i) ? 0 : walks.visits(i).size());
  }
  std::vector<AttentionEntry> entries(offsets.back());
  parallel_for(0, n, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> logits;
    for (std::size_t src = lo; src < hi; ++src) {
      const auto i = static_cast<NodeId>(src);
      if (ls.observed(i)) continue;
      auto visits = walks.visits(i);
      if (visits.empty()) continue;
      auto si = s.row(i);
      logits.resize(visits.size());
      double peak = -std::numeric_limits<double>::infinity();
      for (std::size_t e = 0; e < visits.size(); ++e) {
        auto sj = s.row(visits[e].node);
        double dot = 0.0;
        for (std::size_t c = 0; c < si.size(); ++c) dot += si[c] * sj[c];
        logits[e] = dot;
        peak = std::max(peak, dot);
      }
      double denom = 0.0;
      for (std::size_t e = 0; e < visits.size(); ++e) {
        logits[e] = static_cast<double>(visits[e].count) * std::exp(logits[e] - peak);
        denom += logits[e];
      }
      AttentionEntry* dst = entries.data() + offsets[i];
      for (std::size_t e = 0; e < visits.size(); ++e) {
        dst[e] = {visits[e].node, logits[e] / denom};
      }
    }
  });
  return AttentionTable(std::move(offsets), std::move(entries));
}

DenseMatrix grad_semi(const EmbeddingMatrix& s, const AttentionTable& att) {
  if (att.num_sources() != s.rows()) {
    throw DimensionError("grad_semi: attention table does not match the embedding");
  }
  DenseMatrix out(s.rows(), s.cols());
  const std::size_t k = s.cols();
  parallel_for(0, s.rows(), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t src = lo; src < hi; ++src) {
      auto row = att.row(static_cast<NodeId>(src));
      if (row.empty()) continue;
      double* dst = out.row(src).data();
      const double* si = s.row(src).data();
      for (std::size_t c = 0; c < k; ++c) dst[c] = si[c];
      for (const auto& e : row) {
        const double* sj = s.row(e.node).data();
        for (std::size_t c = 0; c < k; ++c) dst[c] -= e.weight * sj[c];
      }
    }
  });
  return out;
}

double semi_residual(const EmbeddingMatrix& s, const AttentionTable& att) {
  const DenseMatrix g = grad_semi(s, att);
  double total = 0.0;
  for (double v : g.values()) total += v * v;
  return total;
}

}  // namespace fuse
