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
#include <string>
#include <string_view>
#include <vector>

#include "fuse/dense_matrix.hpp"
#include "fuse/graph.hpp"
#include "fuse/objective.hpp"
#include "fuse/propagation.hpp"

namespace fuse {

enum class Mode {
  kBoth,              // modularity + supervised + semi-supervised
  kUnsupervisedOnly,  // modularity only; no walks
  kSemiOnly,          // supervised + semi-supervised; modularity gradient zeroed
};

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);
std::string_view to_string(GradientKind kind);
GradientKind parse_gradient_kind(std::string_view text);

/// Optimizer settings. Defaults are the reference hyperparameters.
struct FuseConfig {
  std::size_t k = 150;
  double eta = 0.05;
  // Step size used instead of `eta` when mode == kUnsupervisedOnly. The
  // modularity gradient carries a 1/2m factor, so it needs a far larger step
  // than the label terms to move S.
  double eta_unsupervised = 1e3;
  double lambda_sup = 1.0;
  double lambda_semi = 2.0;
  std::size_t iterations = 200;  // T
  WalkParams walks;              // r, L, L′, beta
  Mode mode = Mode::kBoth;
  GradientKind gradient = GradientKind::kProposed;
  std::uint64_t seed = 0;
  // Recompute attention from the current S every this many iterations; 0 = never.
  std::size_t attention_refresh = 0;
  // On rank collapse, re-draw the offending column instead of failing.
  bool rank_recovery = false;
  // Record max|SᵀS − I| after every iteration (costs an extra n·k² product).
  bool track_orthonormality = false;

  void validate() const;
  double effective_eta() const { return mode == Mode::kUnsupervisedOnly ? eta_unsupervised : eta; }
};

struct IterationStats {
  std::size_t iteration = 0;
  double modularity = 0.0;
  double supervised_loss = 0.0;
  double semi_residual = 0.0;
  double grad_norm = 0.0;
  double orthonormality_error = 0.0;  // NaN unless tracked
  double cum_seconds = 0.0;           // since the start of run_fuse
};

struct PhaseTimes {
  double init = 0.0;
  double walks = 0.0;
  double attention = 0.0;
  double loop = 0.0;
  double total() const { return init + walks + attention + loop; }
};

struct RunReport {
  std::vector<IterationStats> iterations;
  PhaseTimes phases;
  double initial_modularity = 0.0;
  std::size_t recovered_columns = 0;
  std::size_t walk_sources = 0;  // unobserved nodes with a non-empty walk record
};

struct FuseResult {
  EmbeddingMatrix embedding;
  RunReport report;
};

// i.i.d. standard normal n×k matrix, thin-QR orthonormalized.
EmbeddingMatrix init_embedding(std::size_t n, std::size_t k, std::uint64_t seed);

/// Runs the full optimization: walks and attention once from the initial S,
/// then `iterations` rounds of
///   S ← S + eta·(∇Q_mod − λ_sup·∇Q_sup − λ_semi·∇Q_semi),  S ← Q of thin-QR(S).
///
/// Walks are skipped when the semi-supervised term cannot contribute (mode
/// kUnsupervisedOnly, no observed labels, or every node observed).
/// Throws RankDeficiencyError (with the iteration) on rank collapse unless
/// rank_recovery is set, and NumericalError naming the phase on NaN/Inf.
FuseResult run_fuse(const Graph& g, const LabelSet& ls, const FuseConfig& cfg);

}  // namespace fuse
