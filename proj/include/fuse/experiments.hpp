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
#include <string>
#include <vector>

#include "fuse/engine.hpp"
#include "fuse/eval.hpp"

namespace fuse {

// Seed of run r in a sweep started from `base`.
std::uint64_t run_seed(std::uint64_t base, std::size_t run);

struct PipelineOutcome {
  Metrics metrics;
  double embed_seconds = 0.0;
  double total_seconds = 0.0;
  std::vector<NodeId> test_idx;
  std::vector<std::int32_t> truth;
  std::vector<std::int32_t> pred;
  RunReport report;
};

/// Split the labeled nodes, embed with only the training labels visible,
/// train the MLP on the training rows of S and score it on the test rows.
/// `cfg.seed` is ignored; every stream derives from `seed`.
PipelineOutcome run_split_pipeline(const Graph& g, const LabelSet& truth, const FuseConfig& cfg,
                                   double train_fraction, const MlpParams& mlp,
                                   std::uint64_t seed);

/// Mask labels per `spec`, embed with the kept labels, train the MLP on the
/// kept nodes and score it on the masked ones. `spec.seed` and `cfg.seed`
/// are replaced by streams derived from `seed`.
PipelineOutcome run_mask_pipeline(const Graph& g, const LabelSet& truth,
                                  const DenseMatrix* features, MaskSpec spec,
                                  const FuseConfig& cfg, const MlpParams& mlp,
                                  std::uint64_t seed);

struct AblationRow {
  Mode mode;
  Metrics metrics;
  double embed_seconds = 0.0;
};

// The three modes on one shared split, in the order semi_only, both,
// unsupervised_only.
std::vector<AblationRow> ablation_suite(const Graph& g, const LabelSet& truth,
                                        const FuseConfig& cfg, double train_fraction,
                                        const MlpParams& mlp, std::uint64_t seed);

struct BenchParams {
  std::vector<std::size_t> sizes;  // node counts, ascending
  std::size_t blocks = 4;
  double mean_degree = 10.0;
  double within_share = 0.8;  // expected fraction of a node's edges inside its block
  std::size_t k = 32;
  std::size_t iterations = 10;
  std::size_t repeats = 3;  // per-iteration time is the minimum over repeats
  std::uint64_t seed = 0;
};

struct BenchRow {
  std::size_t n = 0;
  std::size_t edges = 0;
  double seconds_per_iter = 0.0;
};

// SBM graphs at fixed expected degree, so |E| grows in proportion to n.
std::vector<BenchRow> bench_scaling(const BenchParams& params);

// Least-squares slope of log y against log x; empty with fewer than two points.
std::optional<double> fit_loglog_slope(std::span<const double> x, std::span<const double> y);

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for a single value
};
Summary summarize(std::span<const double> values);

// One row of "run,mechanism,rate,classifier,accuracy,macro_f1,seconds".
struct MetricsRow {
  std::string run;
  std::string mechanism = "none";
  double rate = 0.0;
  std::string classifier = "mlp";
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double seconds = 0.0;
};

/// Renders per-run rows followed by one summary row per (mechanism, rate)
/// group, in first-seen order. Summary cells read "mean±std". With timings
/// off the seconds column is empty. `comment`, when non-empty, becomes a
/// leading "# ..." line.
std::string format_metrics_csv(std::span<const MetricsRow> rows, bool timings,
                               const std::string& comment = {});

}  // namespace fuse
