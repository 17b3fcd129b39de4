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

#include "fuse/io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "fuse/error.hpp"
#include "text_util.hpp"

namespace fuse {

using detail::open_input;
using detail::open_output;
using detail::parse_double;
using detail::parse_integer;
using detail::skip_line;
using detail::split_fields;
using detail::trim;

void write_embedding_tsv(const EmbeddingMatrix& s, const IdMap& ids,
                         const std::filesystem::path& path) {
  if (ids.size() != s.rows()) throw DimensionError("write_embedding_tsv: id map size != rows");
  auto out = open_output(path);
  fmt::memory_buffer buf;
  for (std::size_t i = 0; i < s.rows(); ++i) {
    buf.clear();
    fmt::format_to(std::back_inserter(buf), "{}", ids.original(static_cast<NodeId>(i)));
    for (double v : s.row(i)) fmt::format_to(std::back_inserter(buf), "\t{:.17g}", v);
    buf.push_back('\n');
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

EmbeddingMatrix read_embedding_tsv(const std::filesystem::path& path, IdMap* ids) {
  auto in = open_input(path);
  std::vector<std::uint64_t> originals;
  std::vector<double> values;
  std::size_t k = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    auto fields = split_fields(trim(line), ' ');
    if (fields.size() < 2) throw ParseError("embedding row needs an id and values", line_no);
    if (k == 0) k = fields.size() - 1;
    if (fields.size() - 1 != k) {
      throw ParseError("expected " + std::to_string(k) + " values, found " +
                           std::to_string(fields.size() - 1),
                       line_no);
    }
    originals.push_back(parse_integer<std::uint64_t>(fields[0], line_no, "node id"));
    for (std::size_t c = 1; c < fields.size(); ++c) {
      values.push_back(parse_double(fields[c], line_no, "embedding value"));
    }
  }
  EmbeddingMatrix s(originals.size(), k);
  std::copy(values.begin(), values.end(), s.values().begin());
  if (ids != nullptr) *ids = IdMap(std::move(originals));
  return s;
}

namespace {

constexpr std::array<char, 4> kMagic{'F', 'U', 'S', 'E'};

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
  std::array<unsigned char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in, const std::filesystem::path& path) {
  std::array<unsigned char, sizeof(T)> bytes;
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) {
    throw ParseError("truncated embedding file '" + path.string() + "'", 0);
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

void write_embedding_binary(const EmbeddingMatrix& s, const std::filesystem::path& path) {
  if (s.rows() > UINT32_MAX || s.cols() > UINT32_MAX) {
    throw InvalidArgument("embedding too large for the binary format");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out.write(kMagic.data(), kMagic.size());
  put_le(out, static_cast<std::uint32_t>(s.rows()));
  put_le(out, static_cast<std::uint32_t>(s.cols()));
  for (double v : s.values()) put_le(out, v);
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

EmbeddingMatrix read_embedding_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw ParseError("'" + path.string() + "' is not a FUSE embedding file", 0);
  }
  const auto n = get_le<std::uint32_t>(in, path);
  const auto k = get_le<std::uint32_t>(in, path);
  EmbeddingMatrix s(n, k);
  for (double& v : s.values()) v = get_le<double>(in, path);
  if (in.peek() != std::char_traits<char>::eof()) {
    throw ParseError("trailing bytes in '" + path.string() + "'", 0);
  }
  return s;
}

void write_run_report_csv(const RunReport& report, const std::filesystem::path& path,
                          bool timings) {
  auto out = open_output(path);
  out << "iter,Q_mod,Q_sup,semi_residual,grad_norm,cum_seconds\n";
  for (const auto& it : report.iterations) {
    out << fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},", it.iteration, it.modularity,
                       it.supervised_loss, it.semi_residual, it.grad_norm);
    if (timings) out << fmt::format("{:.6f}", it.cum_seconds);
    out << '\n';
  }
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

DenseMatrix load_features(const std::filesystem::path& path, const IdMap& ids) {
  auto in = open_input(path);
  struct Triple {
    NodeId node;
    std::size_t col;
    double value;
  };
  std::vector<Triple> triples;
  std::size_t cols = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    auto t = trim(line);
    if (triples.empty() && std::isalpha(static_cast<unsigned char>(t.front()))) continue;
    auto fields = split_fields(t, ',');
    if (fields.size() != 3) {
      throw ParseError("expected 'node,col,value' but found " + std::to_string(fields.size()) +
                           " fields",
                       line_no);
    }
    const auto original = parse_integer<std::uint64_t>(fields[0], line_no, "node id");
    const auto node = ids.find(original);
    if (!node) throw ParseError("unknown node id " + std::to_string(original), line_no);
    const auto col = parse_integer<std::size_t>(fields[1], line_no, "feature column");
    const double value = parse_double(fields[2], line_no, "feature value");
    if (!std::isfinite(value)) throw ParseError("non-finite feature value", line_no);
    triples.push_back({*node, col, value});
    cols = std::max(cols, col + 1);
  }
  DenseMatrix x(ids.size(), cols);
  for (const auto& t : triples) x(t.node, t.col) = t.value;
  return x;
}

void write_predictions_csv(std::span<const NodeId> idx, std::span<const std::int32_t> truth,
                           std::span<const std::int32_t> pred, const IdMap& ids,
                           const std::filesystem::path& path) {
  if (idx.size() != truth.size() || idx.size() != pred.size()) {
    throw DimensionError("write_predictions_csv: length mismatch");
  }
  auto out = open_output(path);
  out << "node_id,true,pred\n";
  for (std::size_t e = 0; e < idx.size(); ++e) {
    out << ids.original(idx[e]) << ',' << truth[e] << ',' << pred[e] << '\n';
  }
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

namespace {

bool parse_bool(std::string_view v, std::size_t line_no) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ParseError("invalid boolean '" + std::string(v) + "'", line_no);
}

}  // namespace

void apply_config_text(std::string_view text, FuseConfig& cfg) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
    const auto key = trim(body.substr(0, eq));
    const auto value = trim(body.substr(eq + 1));
    if (value.empty()) throw ParseError("missing value for '" + std::string(key) + "'", line_no);
    auto count = [&] { return parse_integer<std::size_t>(value, line_no, "count"); };
    auto real = [&] { return parse_double(value, line_no, "number"); };
    try {
      if (key == "k") cfg.k = count();
      else if (key == "eta") cfg.eta = real();
      else if (key == "eta_unsupervised") cfg.eta_unsupervised = real();
      else if (key == "lambda_sup") cfg.lambda_sup = real();
      else if (key == "lambda_semi") cfg.lambda_semi = real();
      else if (key == "T") cfg.iterations = count();
      else if (key == "r") cfg.walks.walks_per_node = count();
      else if (key == "L") cfg.walks.length = count();
      else if (key == "L_cap") cfg.walks.labeled_cap = count();
      else if (key == "beta") cfg.walks.labeled_bias = real();
      else if (key == "mode") cfg.mode = parse_mode(value);
      else if (key == "gradient") cfg.gradient = parse_gradient_kind(value);
      else if (key == "seed") cfg.seed = parse_integer<std::uint64_t>(value, line_no, "seed");
      else if (key == "attention_refresh") cfg.attention_refresh = count();
      else if (key == "rank_recovery") cfg.rank_recovery = parse_bool(value, line_no);
      else throw ParseError("unknown config key '" + std::string(key) + "'", line_no);
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), line_no);
    }
  }
}

void apply_config_file(const std::filesystem::path& path, FuseConfig& cfg) {
  auto in = open_input(path);
  std::ostringstream text;
  text << in.rdbuf();
  try {
    apply_config_text(text.str(), cfg);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

std::string config_to_text(const FuseConfig& cfg) {
  return fmt::format(
      "k = {}\neta = {:.17g}\neta_unsupervised = {:.17g}\nlambda_sup = {:.17g}\n"
      "lambda_semi = {:.17g}\nT = {}\nr = {}\nL = {}\nL_cap = {}\nbeta = {:.17g}\nmode = {}\n"
      "gradient = {}\nseed = {}\nattention_refresh = {}\nrank_recovery = {}\n",
      cfg.k, cfg.eta, cfg.eta_unsupervised, cfg.lambda_sup, cfg.lambda_semi, cfg.iterations,
      cfg.walks.walks_per_node, cfg.walks.length, cfg.walks.labeled_cap, cfg.walks.labeled_bias,
      to_string(cfg.mode), to_string(cfg.gradient), cfg.seed, cfg.attention_refresh,
      cfg.rank_recovery ? "true" : "false");
}

}  // namespace fuse
