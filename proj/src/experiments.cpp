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

#include "fuse/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "fuse/error.hpp"
#include "fuse/rng.hpp"

namespace fuse {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Embeds with `visible` labels, then trains on `train` and scores `test`.
PipelineOutcome embed_and_classify(const Graph& g, const LabelSet& truth,
                                   const LabelSet& visible, FuseConfig cfg,
                                   std::span<const NodeId> train, std::span<const NodeId> test,
                                   const MlpParams& mlp, std::uint64_t seed,
                                   Clock::time_point start) {
  if (train.empty() || test.empty()) {
    throw InvalidArgument("pipeline needs non-empty train and test sets");
  }
  cfg.seed = derive_seed(seed, SeedStream::kEmbed);
  PipelineOutcome out;
  auto fused = run_fuse(g, visible, cfg);
  out.embed_seconds = fused.report.phases.total();
  out.report = std::move(fused.report);
  const auto model = train_mlp(fused.embedding, truth, train, mlp, derive_seed(seed, SeedStream::kMlp));
  out.test_idx.assign(test.begin(), test.end());
  out.pred = model.predict(fused.embedding, test);
  for (NodeId i : test) out.truth.push_back(truth.label(i));
  out.metrics = score_predictions(out.truth, out.pred);
  out.total_seconds = seconds_since(start);
  return out;
}

}  // namespace

std::uint64_t run_seed(std::uint64_t base, std::size_t run) { return derive_seed(base, run); }

PipelineOutcome run_split_pipeline(const Graph& g, const LabelSet& truth, const FuseConfig& cfg,
                                   double train_fraction, const MlpParams& mlp,
                                   std::uint64_t seed) {
  const auto start = Clock::now();
  const Split split = stratified_split(truth, train_fraction, derive_seed(seed, SeedStream::kSplit));
  Mask keep(truth.size(), false);
  for (NodeId i : split.train_idx) keep[i] = true;
  const LabelSet visible = mask_labels(truth, keep);
  return embed_and_classify(g, truth, visible, cfg, split.train_idx, split.test_idx, mlp, seed,
                            start);
}

PipelineOutcome run_mask_pipeline(const Graph& g, const LabelSet& truth,
                                  const DenseMatrix* features, MaskSpec spec,
                                  const FuseConfig& cfg, const MlpParams& mlp,
                                  std::uint64_t seed) {
  const auto start = Clock::now();
  spec.seed = derive_seed(seed, SeedStream::kMask);
  const Mask keep = generate_mask(features, truth, spec);
  const LabelSet visible = mask_labels(truth, keep);
  std::vector<NodeId> train, test;
  for (NodeId i = 0; i < truth.size(); ++i) {
    if (!truth.observed(i)) continue;
    (keep[i] ? train : test).push_back(i);
  }
  return embed_and_classify(g, truth, visible, cfg, train, test, mlp, seed, start);
}

std::vector<AblationRow> ablation_suite(const Graph& g, const LabelSet& truth,
                                        const FuseConfig& cfg, double train_fraction,
                                        const MlpParams& mlp, std::uint64_t seed) {
  std::vector<AblationRow> rows;
  for (Mode mode : {Mode::kSemiOnly, Mode::kBoth, Mode::kUnsupervisedOnly}) {
    FuseConfig c = cfg;
    c.mode = mode;
    const auto outcome = run_split_pipeline(g, truth, c, train_fraction, mlp, seed);
    rows.push_back({mode, outcome.metrics, outcome.embed_seconds});
    spdlog::info("ablation {}: accuracy {:.4f}, macro-F1 {:.4f}, {:.2f}s", to_string(mode),
                 outcome.metrics.accuracy, outcome.metrics.macro_f1, outcome.embed_seconds);
  }
  return rows;
}

std::vector<BenchRow> bench_scaling(const BenchParams& params) {
  if (params.sizes.empty()) throw InvalidArgument("bench: no sizes given");
  if (!std::is_sorted(params.sizes.begin(), params.sizes.end())) {
    throw InvalidArgument("bench: sizes must be ascending");
  }
  if (params.blocks == 0 || params.repeats == 0) {
    throw InvalidArgument("bench: blocks and repeats must be positive");
  }
  std::vector<BenchRow> rows;
  for (std::size_t n : params.sizes) {
    if (n < 2 * params.blocks || n < params.k) {
      throw InvalidArgument("bench: size " + std::to_string(n) + " too small for the block/k setup");
    }
    std::vector<std::size_t> block_sizes(params.blocks, n / params.blocks);
    block_sizes.back() += n % params.blocks;
    const double within = static_cast<double>(n / params.blocks);
    const double p_in = std::min(1.0, params.mean_degree * params.within_share / (within - 1.0));
    const double p_out = std::min(
        p_in, params.mean_degree * (1.0 - params.within_share) / (static_cast<double>(n) - within));
    const auto sbm = generate_sbm(block_sizes, p_in, p_out, derive_seed(params.seed, n));

    FuseConfig cfg;
    cfg.k = params.k;
    cfg.iterations = params.iterations;
    cfg.mode = Mode::kUnsupervisedOnly;
    cfg.seed = params.seed;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t rep = 0; rep < params.repeats; ++rep) {
      const auto res = run_fuse(sbm.graph, sbm.labels, cfg);
      best = std::min(best, res.report.phases.loop / static_cast<double>(params.iterations));
    }
    rows.push_back({n, sbm.graph.num_edges(), best});
    spdlog::info("bench n={} |E|={} {:.3e} s/iter", n, sbm.graph.num_edges(), best);
  }
  return rows;
}

std::optional<double> fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("fit_loglog_slope: length mismatch");
  if (x.size() < 2) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw InvalidArgument("fit_loglog_slope: values must be > 0");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() < 2) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return s;
}

std::string format_metrics_csv(std::span<const MetricsRow> rows, bool timings,
                               const std::string& comment) {
  std::string out;
  if (!comment.empty()) out += "# " + comment + "\n";
  out += "run,mechanism,rate,classifier,accuracy,macro_f1,seconds\n";
  struct Group {
    std::string mechanism;
    double rate;
    std::string classifier;
    std::vector<double> acc, f1, secs;
  };
  std::vector<Group> groups;
  for (const auto& r : rows) {
    out += fmt::format("{},{},{:g},{},{:.6f},{:.6f},", r.run, r.mechanism, r.rate, r.classifier,
                       r.accuracy, r.macro_f1);
    if (timings) out += fmt::format("{:.3f}", r.seconds);
    out += '\n';
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
      return g.mechanism == r.mechanism && g.rate == r.rate && g.classifier == r.classifier;
    });
    if (it == groups.end()) {
      groups.push_back({r.mechanism, r.rate, r.classifier, {}, {}, {}});
      it = groups.end() - 1;
    }
    it->acc.push_back(r.accuracy);
    it->f1.push_back(r.macro_f1);
    it->secs.push_back(r.seconds);
  }
  for (const auto& g : groups) {
    const auto a = summarize(g.acc);
    const auto f = summarize(g.f1);
    out += fmt::format("mean±std,{},{:g},{},{:.6f}±{:.6f},{:.6f}±{:.6f},", g.mechanism, g.rate,
                       g.classifier, a.mean, a.stddev, f.mean, f.stddev);
    if (timings) {
      const auto t = summarize(g.secs);
      out += fmt::format("{:.3f}±{:.3f}", t.mean, t.stddev);
    }
    out += '\n';
  }
  return out;
}

}  // namespace fuse
