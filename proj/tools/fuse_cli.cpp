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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "fuse/engine.hpp"
#include "fuse/error.hpp"
#include "fuse/eval.hpp"
#include "fuse/experiments.hpp"
#include "fuse/io.hpp"
#include "fuse/propagation.hpp"
#include "fuse/rng.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Bad flag values or combinations caught after CLI11 has parsed.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Optimizer flags shared by every subcommand that embeds.
struct ConfigFlags {
  std::string config;
  std::optional<std::size_t> k, iters, walks, walk_len, label_cap, attention_refresh;
  std::optional<double> eta, eta_unsupervised, lambda_sup, lambda_semi, beta;
  std::optional<std::string> mode, gradient;
  bool rank_recovery = false;

  void attach(CLI::App& app) {
    app.add_option("--config", config, "key = value config file")->check(CLI::ExistingFile);
    app.add_option("--k", k, "embedding dimension");
    app.add_option("--eta", eta, "learning rate");
    app.add_option("--eta-unsupervised", eta_unsupervised, "learning rate in unsupervised_only mode");
    app.add_option("--lambda-sup", lambda_sup, "supervised weight");
    app.add_option("--lambda-semi", lambda_semi, "semi-supervised weight");
    app.add_option("--iters", iters, "iterations T");
    app.add_option("--walks", walks, "walks per node r");
    app.add_option("--walk-len", walk_len, "walk length L");
    app.add_option("--label-cap", label_cap, "labeled visits recorded per walk");
    app.add_option("--beta", beta, "selection bias toward labeled neighbors (>= 1)");
    app.add_option("--mode", mode, "both | unsupervised_only | semi_only");
    app.add_option("--gradient", gradient, "proposed | exact");
    app.add_option("--attention-refresh", attention_refresh, "recompute attention every N iterations");
    app.add_flag("--rank-recovery", rank_recovery, "re-draw collapsed columns instead of failing");
  }

  fuse::FuseConfig build() const {
    fuse::FuseConfig cfg;
    if (!config.empty()) fuse::apply_config_file(config, cfg);
    try {
      if (k) cfg.k = *k;
      if (eta) cfg.eta = *eta;
      if (eta_unsupervised) cfg.eta_unsupervised = *eta_unsupervised;
      if (lambda_sup) cfg.lambda_sup = *lambda_sup;
      if (lambda_semi) cfg.lambda_semi = *lambda_semi;
      if (iters) cfg.iterations = *iters;
      if (walks) cfg.walks.walks_per_node = *walks;
      if (walk_len) cfg.walks.length = *walk_len;
      if (label_cap) cfg.walks.labeled_cap = *label_cap;
      if (beta) cfg.walks.labeled_bias = *beta;
      if (mode) cfg.mode = fuse::parse_mode(*mode);
      if (gradient) cfg.gradient = fuse::parse_gradient_kind(*gradient);
      if (attention_refresh) cfg.attention_refresh = *attention_refresh;
      if (rank_recovery) cfg.rank_recovery = true;
      cfg.validate();
    } catch (const fuse::InvalidArgument& e) {
      throw UsageError(e.what());
    }
    return cfg;
  }
};

struct MlpFlags {
  fuse::MlpParams params;
  void attach(CLI::App& app) {
    app.add_option("--mlp-hidden", params.hidden, "MLP hidden width")->capture_default_str();
    app.add_option("--mlp-epochs", params.epochs, "MLP epochs")->capture_default_str();
    app.add_option("--mlp-lr", params.lr, "MLP learning rate")->capture_default_str();
    app.add_option("--mlp-batch", params.batch, "MLP batch size")->capture_default_str();
  }
};

struct Inputs {
  fuse::LoadedGraph graph;
  fuse::LabelSet labels;
};

Inputs load_inputs(const std::string& edges, const std::string& labels) {
  Inputs in;
  in.graph = fuse::load_edge_list(edges, fuse::edge_format_for(edges));
  const std::size_t n = in.graph.graph.num_nodes();
  in.labels = labels.empty()
                  ? fuse::LabelSet(std::vector<std::int32_t>(n, fuse::LabelSet::kUnknown),
                                   fuse::Mask(n, false), 0)
                  : fuse::load_labels(labels, in.graph.ids);
  return in;
}

std::string header_comment(const std::string& command, std::uint64_t seed) {
  const auto now = std::chrono::system_clock::now();
  return fmt::format("fuse {} seed={} generated {:%Y-%m-%dT%H:%M:%S}Z", command, seed,
                     fmt::gmtime(std::chrono::system_clock::to_time_t(now)));
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out || !(out << text)) throw fuse::Error("cannot write '" + path.string() + "'");
}

fs::path run_suffixed(const fs::path& path, std::size_t run, std::size_t runs) {
  if (runs <= 1) return path;
  fs::path out = path;
  out.replace_filename(path.stem().string() + "_run" + std::to_string(run) +
                       path.extension().string());
  return out;
}

void check_split(double split) {
  if (!(split > 0.0 && split < 1.0)) throw UsageError("--split must lie in (0, 1)");
}

}  // namespace

int main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("fuse");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"FUSE semi-supervised node embedding"};
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace | debug | info | warn | error | off")
      ->capture_default_str();

  std::string edges, labels, features, out, binary_out, report_out, id_map_out, walk_dump,
      predictions_out, embedding_in, feature_source = "given";
  std::uint64_t seed = 0;
  std::size_t runs = 5;
  double split = 0.7;
  bool no_timings = false;
  std::vector<double> rates{0.2, 0.5, 0.8};
  std::vector<std::string> mechanisms{"MCAR"};
  ConfigFlags cfg_flags;
  MlpFlags mlp_flags;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "base seed; every random stream derives from it")
        ->capture_default_str();
    sub->add_flag("--no-timings", no_timings, "leave timing columns empty");
  };

  auto* embed = app.add_subcommand("embed", "compute an embedding");
  embed->add_option("--edges", edges, "edge list (.tsv or .csv)")->required();
  embed->add_option("--labels", labels, "node,class CSV");
  embed->add_option("--out", out, "embedding TSV path")->required();
  embed->add_option("--binary", binary_out, "also write the raw binary embedding here");
  embed->add_option("--report", report_out, "run report CSV (default: <out>.report.csv)");
  embed->add_option("--id-map", id_map_out, "write original_id,internal_id here");
  embed->add_option("--walk-dump", walk_dump, "write source,visited,count here");
  cfg_flags.attach(*embed);
  add_common(embed);

  auto* eval = app.add_subcommand("eval", "train and score the MLP on an existing embedding");
  eval->add_option("--embedding", embedding_in, "embedding TSV")->required()->check(CLI::ExistingFile);
  eval->add_option("--labels", labels, "node,class CSV")->required();
  eval->add_option("--split", split, "train fraction")->capture_default_str();
  eval->add_option("--out", out, "metrics CSV (default: stdout)");
  eval->add_option("--predictions", predictions_out, "node_id,true,pred CSV");
  mlp_flags.attach(*eval);
  add_common(eval);

  auto* pipeline = app.add_subcommand("pipeline", "embed, split, classify over several seeds");
  pipeline->add_option("--edges", edges, "edge list")->required();
  pipeline->add_option("--labels", labels, "node,class CSV")->required();
  pipeline->add_option("--split", split, "train fraction")->capture_default_str();
  pipeline->add_option("--runs,--seeds", runs, "number of seeds")->capture_default_str();
  pipeline->add_option("--out", out, "metrics CSV (default: stdout)");
  pipeline->add_option("--predictions", predictions_out, "node_id,true,pred CSV per run");
  cfg_flags.attach(*pipeline);
  mlp_flags.attach(*pipeline);
  add_common(pipeline);

  auto* ablate = app.add_subcommand("ablate", "compare semi_only, both and unsupervised_only");
  ablate->add_option("--edges", edges, "edge list")->required();
  ablate->add_option("--labels", labels, "node,class CSV")->required();
  ablate->add_option("--split", split, "train fraction")->capture_default_str();
  ablate->add_option("--out", out, "CSV (default: stdout)");
  cfg_flags.attach(*ablate);
  mlp_flags.attach(*ablate);
  add_common(ablate);

  auto* mask = app.add_subcommand("mask-study", "mask labels, embed, classify the masked nodes");
  mask->add_option("--edges", edges, "edge list")->required();
  mask->add_option("--labels", labels, "node,class CSV")->required();
  mask->add_option("--features", features, "node,col,value CSV");
  mask->add_option("--feature-source", feature_source, "given | structural")->capture_default_str();
  mask->add_option("--mechanisms", mechanisms, "MCAR MAR MNAR")->delimiter(',');
  mask->add_option("--rates", rates, "masking rates in (0, 1)")->delimiter(',');
  mask->add_option("--runs,--seeds", runs, "seeds per (mechanism, rate)")->capture_default_str();
  mask->add_option("--out", out, "metrics CSV (default: stdout)");
  cfg_flags.attach(*mask);
  mlp_flags.attach(*mask);
  add_common(mask);

  fuse::BenchParams bench_params;
  bench_params.sizes = {2000, 4000, 8000, 16000, 32000};
  auto* bench = app.add_subcommand("bench", "per-iteration time on SBM graphs of growing size");
  bench->add_option("--sizes", bench_params.sizes, "node counts, ascending")->delimiter(',');
  bench->add_option("--k", bench_params.k, "embedding dimension")->capture_default_str();
  bench->add_option("--iters", bench_params.iterations, "timed iterations")->capture_default_str();
  bench->add_option("--repeats", bench_params.repeats, "repeats per size")->capture_default_str();
  bench->add_option("--degree", bench_params.mean_degree, "expected degree")->capture_default_str();
  bench->add_option("--out", out, "CSV (default: stdout)");
  add_common(bench);

  std::vector<std::size_t> block_sizes{50, 50};
  double p_in = 0.3, p_out = 0.02;
  std::string labels_out;
  auto* gen = app.add_subcommand("gen-sbm", "write a stochastic block model graph");
  gen->add_option("--sizes", block_sizes, "block sizes")->delimiter(',');
  gen->add_option("--p-in", p_in, "within-block edge probability")->capture_default_str();
  gen->add_option("--p-out", p_out, "between-block edge probability")->capture_default_str();
  gen->add_option("--out", out, "edge list path")->required();
  gen->add_option("--labels-out", labels_out, "block labels CSV");
  add_common(gen);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    const bool timings = !no_timings;
    if (*embed) {
      const auto cfg_base = cfg_flags.build();
      auto in = load_inputs(edges, labels);
      auto cfg = cfg_base;
      cfg.seed = seed;
      auto result = fuse::run_fuse(in.graph.graph, in.labels, cfg);
      fuse::write_embedding_tsv(result.embedding, in.graph.ids, out);
      if (!binary_out.empty()) fuse::write_embedding_binary(result.embedding, binary_out);
      fs::path report = report_out.empty() ? fs::path(out).replace_extension(".report.csv")
                                           : fs::path(report_out);
      fuse::write_run_report_csv(result.report, report, timings);
      if (!id_map_out.empty()) fuse::write_id_map(in.graph.ids, id_map_out);
      if (!walk_dump.empty()) {
        const auto walks = fuse::labeled_random_walks(
            in.graph.graph, in.labels, cfg.walks,
            fuse::derive_seed(cfg.seed, fuse::SeedStream::kWalks));
        fuse::write_walk_record_csv(walks, in.graph.ids, walk_dump);
      }
      spdlog::info("wrote {}x{} embedding to {}", result.embedding.rows(), result.embedding.cols(),
                   out);
    } else if (*eval) {
      check_split(split);
      fuse::IdMap ids;
      const auto s = fuse::read_embedding_tsv(embedding_in, &ids);
      const auto truth = fuse::load_labels(labels, ids);
      const auto rs = fuse::run_seed(seed, 0);
      const auto sp = fuse::stratified_split(truth, split,
                                             fuse::derive_seed(rs, fuse::SeedStream::kSplit));
      const auto start = std::chrono::steady_clock::now();
      const auto model = fuse::train_mlp(s, truth, sp.train_idx, mlp_flags.params,
                                         fuse::derive_seed(rs, fuse::SeedStream::kMlp));
      const auto pred = model.predict(s, sp.test_idx);
      std::vector<std::int32_t> t;
      for (auto i : sp.test_idx) t.push_back(truth.label(i));
      const auto m = fuse::score_predictions(t, pred);
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::vector<fuse::MetricsRow> rows(1);
      rows[0] = {"0", "none", 0.0, "mlp", m.accuracy, m.macro_f1, secs};
      write_text(out, fuse::format_metrics_csv(rows, timings, header_comment("eval", seed)));
      if (!predictions_out.empty()) {
        fuse::write_predictions_csv(sp.test_idx, t, pred, ids, predictions_out);
      }
    } else if (*pipeline) {
      check_split(split);
      if (runs == 0) throw UsageError("--runs must be >= 1");
      const auto cfg = cfg_flags.build();
      auto in = load_inputs(edges, labels);
      std::vector<fuse::MetricsRow> rows;
      for (std::size_t r = 0; r < runs; ++r) {
        const auto o = fuse::run_split_pipeline(in.graph.graph, in.labels, cfg, split,
                                                mlp_flags.params, fuse::run_seed(seed, r));
        rows.push_back({std::to_string(r), "none", 0.0, "mlp", o.metrics.accuracy,
                        o.metrics.macro_f1, o.total_seconds});
        spdlog::info("run {}: accuracy {:.4f}, macro-F1 {:.4f} (embed {:.2f}s)", r,
                     o.metrics.accuracy, o.metrics.macro_f1, o.embed_seconds);
        if (!predictions_out.empty()) {
          fuse::write_predictions_csv(o.test_idx, o.truth, o.pred, in.graph.ids,
                                      run_suffixed(predictions_out, r, runs));
        }
      }
      write_text(out, fuse::format_metrics_csv(rows, timings, header_comment("pipeline", seed)));
    } else if (*ablate) {
      check_split(split);
      const auto cfg = cfg_flags.build();
      auto in = load_inputs(edges, labels);
      const auto table = fuse::ablation_suite(in.graph.graph, in.labels, cfg, split,
                                              mlp_flags.params, fuse::run_seed(seed, 0));
      std::string text = "# " + header_comment("ablate", seed) + "\nmode,accuracy,macro_f1,seconds\n";
      for (const auto& row : table) {
        text += fmt::format("{},{:.6f},{:.6f},", fuse::to_string(row.mode), row.metrics.accuracy,
                            row.metrics.macro_f1);
        if (timings) text += fmt::format("{:.3f}", row.embed_seconds);
        text += '\n';
      }
      write_text(out, text);
    } else if (*mask) {
      if (runs == 0) throw UsageError("--runs must be >= 1");
      std::vector<fuse::MaskMechanism> mechs;
      for (const auto& m : mechanisms) {
        try {
          mechs.push_back(fuse::parse_mask_mechanism(m));
        } catch (const fuse::InvalidArgument& e) {
          throw UsageError(e.what());
        }
      }
      for (double rate : rates) {
        if (!(rate > 0.0 && rate < 1.0)) {
          throw UsageError(fmt::format("masking rate {} outside (0, 1)", rate));
        }
      }
      fuse::FeatureSource source;
      try {
        source = fuse::parse_feature_source(feature_source);
      } catch (const fuse::InvalidArgument& e) {
        throw UsageError(e.what());
      }
      const bool needs_features = std::any_of(mechs.begin(), mechs.end(), [](auto m) {
        return m != fuse::MaskMechanism::kMcar;
      });
      if (needs_features && source == fuse::FeatureSource::kGiven && features.empty()) {
        throw UsageError(
            "MAR and MNAR masking need node features: pass --features or "
            "--feature-source structural");
      }
      const auto cfg = cfg_flags.build();
      auto in = load_inputs(edges, labels);
      std::optional<fuse::DenseMatrix> x;
      if (needs_features) {
        x = source == fuse::FeatureSource::kStructural
                ? fuse::structural_features(in.graph.graph)
                : fuse::load_features(features, in.graph.ids);
      }
      std::vector<fuse::MetricsRow> rows;
      for (auto mech : mechs) {
        for (double rate : rates) {
          for (std::size_t r = 0; r < runs; ++r) {
            fuse::MaskSpec spec;
            spec.mechanism = mech;
            spec.rate = rate;
            spec.feature_source = source;
            const auto o = fuse::run_mask_pipeline(in.graph.graph, in.labels,
                                                   x ? &*x : nullptr, spec, cfg,
                                                   mlp_flags.params, fuse::run_seed(seed, r));
            rows.push_back({std::to_string(r), std::string(fuse::to_string(mech)), rate, "mlp",
                            o.metrics.accuracy, o.metrics.macro_f1, o.total_seconds});
            spdlog::info("{} rate {} run {}: accuracy {:.4f}", fuse::to_string(mech), rate, r,
                         o.metrics.accuracy);
          }
        }
      }
      write_text(out, fuse::format_metrics_csv(rows, timings, header_comment("mask-study", seed)));
    } else if (*bench) {
      bench_params.seed = seed;
      const auto table = fuse::bench_scaling(bench_params);
      std::vector<double> e, t;
      for (const auto& row : table) {
        e.push_back(static_cast<double>(row.edges));
        t.push_back(row.seconds_per_iter);
      }
      const auto slope = fuse::fit_loglog_slope(e, t);
      std::string text = "# " + header_comment("bench", seed) +
                         "\nn,edges,seconds_per_iter,time_ratio,edge_exponent\n";
      for (std::size_t i = 0; i < table.size(); ++i) {
        text += fmt::format("{},{},", table[i].n, table[i].edges);
        if (timings) text += fmt::format("{:.6e}", table[i].seconds_per_iter);
        text += ',';
        if (timings && i > 0) text += fmt::format("{:.4f}", t[i] / t[i - 1]);
        text += ',';
        if (timings && slope && i + 1 == table.size()) text += fmt::format("{:.4f}", *slope);
        text += '\n';
      }
      write_text(out, text);
    } else if (*gen) {
      const auto sbm = fuse::generate_sbm(block_sizes, p_in, p_out, seed);
      const auto ids = fuse::IdMap::identity(sbm.graph.num_nodes());
      fuse::write_edge_list(sbm.graph, ids, out);
      if (!labels_out.empty()) fuse::write_labels(sbm.labels, ids, labels_out);
      spdlog::info("wrote SBM with n={} m={} to {}", sbm.graph.num_nodes(), sbm.graph.num_edges(),
                   out);
    }
  } catch (const UsageError& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}
