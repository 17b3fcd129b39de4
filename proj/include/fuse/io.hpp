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

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fuse/dense_matrix.hpp"
#include "fuse/engine.hpp"
#include "fuse/graph.hpp"

namespace fuse {

// One line per node: original id, then k values with 17 significant digits.
void write_embedding_tsv(const EmbeddingMatrix& s, const IdMap& ids,
                         const std::filesystem::path& path);
// Rows are returned in file order; `ids` receives the first column when non-null.
EmbeddingMatrix read_embedding_tsv(const std::filesystem::path& path, IdMap* ids = nullptr);

// "FUSE", u32 n, u32 k, then n·k float64, all little-endian.
void write_embedding_binary(const EmbeddingMatrix& s, const std::filesystem::path& path);
EmbeddingMatrix read_embedding_binary(const std::filesystem::path& path);

// iter,Q_mod,Q_sup,semi_residual,grad_norm,cum_seconds. With timings off the
// last column is left empty so identical runs give identical bytes.
void write_run_report_csv(const RunReport& report, const std::filesystem::path& path,
                          bool timings = true);

/// Sparse "node,col,value" triples, node ids translated through `ids`.
///
/// Returns an ids.size() × (max col + 1) matrix; absent entries are zero.
/// A first line starting with a letter is treated as a header.
DenseMatrix load_features(const std::filesystem::path& path, const IdMap& ids);

// node_id,true,pred with original ids; -1 marks a missing truth label.
void write_predictions_csv(std::span<const NodeId> idx, std::span<const std::int32_t> truth,
                           std::span<const std::int32_t> pred, const IdMap& ids,
                           const std::filesystem::path& path);

/// Flat "key = value" config. Blank lines and '#' comments are ignored.
///
/// Keys: k, eta, eta_unsupervised, lambda_sup, lambda_semi, T, r, L, L_cap,
/// beta, mode, gradient, seed, attention_refresh, rank_recovery. Unknown keys
/// and malformed values raise ParseError with the line number.
void apply_config_text(std::string_view text, FuseConfig& cfg);
void apply_config_file(const std::filesystem::path& path, FuseConfig& cfg);

// Renders every key in the same format apply_config_text reads.
std::string config_to_text(const FuseConfig& cfg);

}  // namespace fuse
