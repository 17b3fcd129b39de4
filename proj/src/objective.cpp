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

#include "fuse/objective.hpp"

#include <string>
#include <vector>

#include "fuse/error.hpp"
#include "fuse/linalg.hpp"

namespace fuse {

namespace {

void require_edges(const Graph& g, const char* op) {
  if (g.num_edges() == 0) throw InvalidArgument(std::string(op) + ": graph has no edges");
}

void require_rows(const Graph& g, const DenseMatrix& s, const char* op) {
  if (s.rows() != g.num_nodes()) {
    throw DimensionError(std::string(op) + ": embedding has " + std::to_string(s.rows()) +
                         " rows, graph has " + std::to_string(g.num_nodes()) + " nodes");
  }
}

// dᵀS as a k-vector.
std::vector<double> degree_weighted_sums(const Graph& g, const DenseMatrix& s) {
  std::vector<double> out(s.cols(), 0.0);
  auto d = g.degrees();
  for (std::size_t i = 0; i < s.rows(); ++i) {
    const double w = d[i];
    if (w == 0.0) continue;
    auto r = s.row(i);
    for (std::size_t c = 0; c < r.size(); ++c) out[c] += w * r[c];
  }
  return out;
}

// scale_as·A·S − scale_rank·d·vᵀ
DenseMatrix combine(const Graph& g, const DenseMatrix& as, double scale_as,
                    const std::vector<double>& v, double scale_rank) {
  DenseMatrix out = rank_one_update(g.degrees(), v, -scale_rank);
  out.add_scaled(as, scale_as);
  return out;
}

// Per-class means over observed rows; counts[c] == 0 for classes without members.
void class_means(const EmbeddingMatrix& s, const LabelSet& ls, DenseMatrix& means,
                 std::vector<std::size_t>& counts) {
  means = DenseMatrix(ls.num_classes(), s.cols());
  counts.assign(ls.num_classes(), 0);
  for (NodeId i = 0; i < s.rows(); ++i) {
    if (!ls.observed(i)) continue;
    const auto c = static_cast<std::size_t>(ls.label(i));
    ++counts[c];
    auto src = s.row(i);
    auto dst = means.row(c);
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] += src[j];
  }
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) continue;
    const double inv = 1.0 / static_cast<double>(counts[c]);
    for (double& v : means.row(c)) v *= inv;
  }
}

void require_labels(const EmbeddingMatrix& s, const LabelSet& ls, const char* op) {
  if (ls.size() != s.rows()) {
    throw DimensionError(std::string(op) + ": label set has " + std::to_string(ls.size()) +
                         " nodes, embedding has " + std::to_string(s.rows()) + " rows");
  }
}

}  // namespace

double modularity_value(const Graph& g, const EmbeddingMatrix& s) {
  require_rows(g, s, "modularity_value");
  require_edges(g, "modularity_value");
  return modularity_value(g, s, spmm(g, s));
}

double modularity_value(const Graph& g, const EmbeddingMatrix& s, const DenseMatrix& as) {
  require_rows(g, s, "modularity_value");
  require_edges(g, "modularity_value");
  const double two_m = 2.0 * static_cast<double>(g.num_edges());
  double trace = 0.0;
  auto sv = s.values();
  auto av = as.values();
  for (std::size_t i = 0; i < sv.size(); ++i) trace += sv[i] * av[i];
  double weighted = 0.0;
  for (double v : degree_weighted_sums(g, s)) weighted += v * v;
  return (trace - weighted / two_m) / two_m;
}

DenseMatrix grad_modularity_exact(const Graph& g, const EmbeddingMatrix& s) {
  require_rows(g, s, "grad_modularity_exact");
  require_edges(g, "grad_modularity_exact");
  return grad_modularity(g, s, spmm(g, s), GradientKind::kExact);
}

DenseMatrix grad_modularity_proposed(const Graph& g, const EmbeddingMatrix& s) {
  require_rows(g, s, "grad_modularity_proposed");
  require_edges(g, "grad_modularity_proposed");
  return grad_modularity(g, s, spmm(g, s), GradientKind::kProposed);
}

DenseMatrix grad_modularity(const Graph& g, const EmbeddingMatrix& s, GradientKind kind) {
  require_rows(g, s, "grad_modularity");
  require_edges(g, "grad_modularity");
  return grad_modularity(g, s, spmm(g, s), kind);
}

DenseMatrix grad_modularity(const Graph& g, const EmbeddingMatrix& s, const DenseMatrix& as,
                            GradientKind kind) {
  require_rows(g, s, "grad_modularity");
  require_edges(g, "grad_modularity");
  const double m = static_cast<double>(g.num_edges());
  const double two_m = 2.0 * m;
  if (kind == GradientKind::kExact) {
    return combine(g, as, 1.0 / m, degree_weighted_sums(g, s), 1.0 / (m * two_m));
  }
  return combine(g, as, 1.0 / two_m, column_sums(s), 1.0 / (two_m * two_m));
}

double supervised_loss(const EmbeddingMatrix& s, const LabelSet& ls) {
  require_labels(s, ls, "supervised_loss");
  DenseMatrix means;
  std::vector<std::size_t> counts;
  class_means(s, ls, means, counts);
  double total = 0.0;
  for (NodeId i = 0; i < s.rows(); ++i) {
    if (!ls.observed(i)) continue;
    auto r = s.row(i);
    auto mu = means.row(static_cast<std::size_t>(ls.label(i)));
    for (std::size_t j = 0; j < r.size(); ++j) {
      const double dlt = r[j] - mu[j];
      total += dlt * dlt;
    }
  }
  return total;
}

DenseMatrix grad_supervised(const EmbeddingMatrix& s, const LabelSet& ls) {
  require_labels(s, ls, "grad_supervised");
  DenseMatrix means;
  std::vector<std::size_t> counts;
  class_means(s, ls, means, counts);
  DenseMatrix out(s.rows(), s.cols());
  for (NodeId i = 0; i < s.rows(); ++i) {
    if (!ls.observed(i)) continue;
    auto r = s.row(i);
    auto mu = means.row(static_cast<std::size_t>(ls.label(i)));
    auto dst = out.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) dst[j] = r[j] - mu[j];
  }
  return out;
}

}  // namespace fuse
