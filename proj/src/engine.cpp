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

#include "fuse/engine.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <spdlog/spdlog.h>

#include "fuse/error.hpp"
#include "fuse/linalg.hpp"
#include "fuse/rng.hpp"

namespace fuse {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::kBoth: return "both";
    case Mode::kUnsupervisedOnly: return "unsupervised_only";
    case Mode::kSemiOnly: return "semi_only";
  }
  return "?";
}

Mode parse_mode(std::string_view text) {
  if (text == "both") return Mode::kBoth;
  if (text == "unsupervised_only") return Mode::kUnsupervisedOnly;
  if (text == "semi_only") return Mode::kSemiOnly;
  throw InvalidArgument("unknown mode '" + std::string(text) +
                        "' (expected both, unsupervised_only or semi_only)");
}

std::string_view to_string(GradientKind kind) {
  return kind == GradientKind::kExact ? "exact" : "proposed";
}

GradientKind parse_gradient_kind(std::string_view text) {
  if (text == "proposed") return GradientKind::kProposed;
  if (text == "exact") return GradientKind::kExact;
  throw InvalidArgument("unknown gradient '" + std::string(text) +
                        "' (expected proposed or exact)");
}

void FuseConfig::validate() const {
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidArgument("eta must be > 0");
  if (!(eta_unsupervised > 0.0) || !std::isfinite(eta_unsupervised)) {
    throw InvalidArgument("eta_unsupervised must be > 0");
  }
  if (!(lambda_sup >= 0.0) || !std::isfinite(lambda_sup)) {
    throw InvalidArgument("lambda_sup must be >= 0");
  }
  if (!(lambda_semi >= 0.0) || !std::isfinite(lambda_semi)) {
    throw InvalidArgument("lambda_semi must be >= 0");
  }
  if (iterations < 1) throw InvalidArgument("T must be >= 1");
  if (mode != Mode::kUnsupervisedOnly) walks.validate();
}

EmbeddingMatrix init_embedding(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (n < k) {
    throw InvalidArgument("init_embedding: n (" + std::to_string(n) + ") < k (" +
                          std::to_string(k) + ")");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  EmbeddingMatrix s(n, k);
  for (double& v : s.values()) v = normal(rng);
  return thin_qr_orthonormalize(s);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void require_finite(const DenseMatrix& m, std::size_t iteration, const char* phase) {
  if (!m.all_finite()) {
    throw NumericalError("non-finite values in " + std::string(phase) + " at iteration " +
                         std::to_string(iteration));
  }
}

// Orthonormalizes in place. With recovery on, a collapsed column is replaced by
// fresh Gaussian noise and the factorization retried.
void reorthonormalize(EmbeddingMatrix& s, std::size_t iteration, bool recovery,
                      std::mt19937_64& recovery_rng, std::size_t& recovered) {
  for (std::size_t attempt = 0;; ++attempt) {
    try {
      s = thin_qr_orthonormalize(s);
      return;
    } catch (const RankDeficiencyError& e) {
      if (!recovery || attempt >= s.cols()) {
        throw RankDeficiencyError(e.column(), e.diagonal(),
                                  "iteration " + std::to_string(iteration));
      }
      spdlog::warn("iteration {}: column {} collapsed (|R| = {:.3g}); re-drawing it", iteration,
                   e.column(), e.diagonal());
      std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(s.rows())));
      for (std::size_t i = 0; i < s.rows(); ++i) s(i, e.column()) = normal(recovery_rng);
      ++recovered;
    }
  }
}

}  // namespace

FuseResult run_fuse(const Graph& g, const LabelSet& ls, const FuseConfig& cfg) {
  cfg.validate();
  const std::size_t n = g.num_nodes();
  if (g.num_edges() == 0) throw InvalidArgument("run_fuse: graph has no edges");
  if (ls.size() != n) {
    throw DimensionError("run_fuse: label set has " + std::to_string(ls.size()) +
                         " nodes, graph has " + std::to_string(n));
  }
  if (n < cfg.k) {
    throw InvalidArgument("run_fuse: k (" + std::to_string(cfg.k) + ") exceeds n (" +
                          std::to_string(n) + ")");
  }

  const bool unsupervised = cfg.mode == Mode::kUnsupervisedOnly;
  const bool use_modularity = cfg.mode != Mode::kSemiOnly;
  const double eta = cfg.effective_eta();
  const double lambda_sup = unsupervised ? 0.0 : cfg.lambda_sup;
  const double lambda_semi = unsupervised ? 0.0 : cfg.lambda_semi;
  const bool any_observed = ls.observed_count() > 0;
  const bool semi_active = !unsupervised && any_observed && ls.any_unobserved();

  const auto start = Clock::now();
  FuseResult result;
  RunReport& report = result.report;
  EmbeddingMatrix& s = result.embedding;

  auto phase_start = Clock::now();
  s = init_embedding(n, cfg.k, derive_seed(cfg.seed, SeedStream::kInit));
  report.phases.init = seconds_since(phase_start);

  WalkRecord walks;
  AttentionTable attention(std::vector<std::size_t>(n + 1, 0), {});
  if (semi_active) {
    phase_start = Clock::now();
    walks = labeled_random_walks(g, ls, cfg.walks, derive_seed(cfg.seed, SeedStream::kWalks));
    report.phases.walks = seconds_since(phase_start);
    for (NodeId i = 0; i < n; ++i) report.walk_sources += walks.visits(i).empty() ? 0 : 1;

    phase_start = Clock::now();
    attention = compute_attention(s, walks, ls);
    report.phases.attention = seconds_since(phase_start);
  }

  DenseMatrix as = spmm(g, s);
  report.initial_modularity = modularity_value(g, s, as);
  if (spdlog::should_log(spdlog::level::debug)) {
    // How much the degree-weighted and plain column sums differ at the start.
    const auto plain = column_sums(s);
    std::vector<double> weighted(s.cols(), 0.0);
    for (NodeId i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < s.cols(); ++c) weighted[c] += g.degree(i) * s(i, c);
    }
    double np = 0.0, nw = 0.0;
    for (std::size_t c = 0; c < s.cols(); ++c) {
      np += plain[c] * plain[c];
      nw += weighted[c] * weighted[c];
    }
    spdlog::debug("global term norms: |1ᵀS| = {:.4g}, |dᵀS| = {:.4g}, max degree {}",
                  std::sqrt(np), std::sqrt(nw), g.max_degree());
  }

  std::mt19937_64 recovery_rng(derive_seed(cfg.seed, SeedStream::kRecovery));
  report.iterations.reserve(cfg.iterations);
  phase_start = Clock::now();
  for (std::size_t t = 1; t <= cfg.iterations; ++t) {
    if (semi_active && cfg.attention_refresh > 0 && t > 1 && (t - 1) % cfg.attention_refresh == 0) {
      attention = compute_attention(s, walks, ls);
    }

    DenseMatrix step = use_modularity ? grad_modularity(g, s, as, cfg.gradient)
                                      : DenseMatrix(n, cfg.k);
    require_finite(step, t, "modularity gradient");
    if (lambda_sup > 0.0 && any_observed) {
      DenseMatrix sup = grad_supervised(s, ls);
      require_finite(sup, t, "supervised gradient");
      step.add_scaled(sup, -lambda_sup);
    }
    if (lambda_semi > 0.0 && semi_active) {
      DenseMatrix semi = grad_semi(s, attention);
      require_finite(semi, t, "semi-supervised gradient");
      step.add_scaled(semi, -lambda_semi);
    }

    IterationStats stats;
    stats.iteration = t;
    stats.grad_norm = frobenius_norm(step);
    s.add_scaled(step, eta);
    require_finite(s, t, "update");
    reorthonormalize(s, t, cfg.rank_recovery, recovery_rng, report.recovered_columns);

    as = spmm(g, s);
    stats.modularity = modularity_value(g, s, as);
    stats.supervised_loss = any_observed ? supervised_loss(s, ls) : 0.0;
    stats.semi_residual = semi_active ? semi_residual(s, attention) : 0.0;
    stats.orthonormality_error = cfg.track_orthonormality
                                     ? orthonormality_error(s)
                                     : std::numeric_limits<double>::quiet_NaN();
    stats.cum_seconds = seconds_since(start);
    report.iterations.push_back(stats);
  }
  report.phases.loop = seconds_since(phase_start);

  spdlog::debug("run_fuse mode={} n={} k={} T={}: Q {:.5f} -> {:.5f} in {:.2f}s",
                to_string(cfg.mode), n, cfg.k, cfg.iterations, report.initial_modularity,
                report.iterations.back().modularity, report.phases.total());
  return result;
}

}  // namespace fuse
