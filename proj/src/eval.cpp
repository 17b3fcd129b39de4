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

#include "fuse/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include <spdlog/spdlog.h>

#include "fuse/error.hpp"
#include "fuse/rng.hpp"

namespace fuse {

Split stratified_split(const LabelSet& ls, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgument("split fraction must lie in (0, 1)");
  }
  std::map<std::int32_t, std::vector<NodeId>> by_class;
  for (NodeId i = 0; i < ls.size(); ++i) {
    if (ls.observed(i)) by_class[ls.label(i)].push_back(i);
  }
  Split split;
  split.fraction = train_fraction;
  split.seed = seed;
  for (auto& [cls, members] : by_class) {
    if (members.size() < 2) {
      throw InvalidArgument("stratified_split: class " + std::to_string(cls) + " has " +
                            std::to_string(members.size()) + " member(s), need at least 2");
    }
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(cls)));
    std::shuffle(members.begin(), members.end(), rng);
    auto take = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(members.size())));
    take = std::clamp<std::size_t>(take, 1, members.size() - 1);
    split.train_idx.insert(split.train_idx.end(), members.begin(), members.begin() + take);
    split.test_idx.insert(split.test_idx.end(), members.begin() + take, members.end());
  }
  std::sort(split.train_idx.begin(), split.train_idx.end());
  std::sort(split.test_idx.begin(), split.test_idx.end());
  return split;
}

MlpModel::MlpModel(std::size_t input_dim, std::size_t hidden, std::size_t classes)
    : input_dim_(input_dim),
      hidden_(hidden),
      classes_(classes),
      params_(hidden * input_dim + hidden + classes * hidden + classes, 0.0),
      mean_(input_dim, 0.0),
      inv_std_(input_dim, 1.0) {
  if (input_dim == 0 || hidden == 0 || classes == 0) {
    throw InvalidArgument("MlpModel: dimensions must be positive");
  }
}

void MlpModel::initialize(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double a1 = std::sqrt(6.0 / static_cast<double>(input_dim_ + hidden_));
  const double a2 = std::sqrt(6.0 / static_cast<double>(hidden_ + classes_));
  std::uniform_real_distribution<double> u1(-a1, a1), u2(-a2, a2);
  std::fill(params_.begin(), params_.end(), 0.0);
  double* w1 = params_.data();
  for (std::size_t i = 0; i < hidden_ * input_dim_; ++i) w1[i] = u1(rng);
  double* w2 = w1 + hidden_ * input_dim_ + hidden_;
  for (std::size_t i = 0; i < classes_ * hidden_; ++i) w2[i] = u2(rng);
}

void MlpModel::set_input_scaling(std::vector<double> mean, std::vector<double> inv_std) {
  if (mean.size() != input_dim_ || inv_std.size() != input_dim_) {
    throw DimensionError("MlpModel: scaling vectors must have input_dim entries");
  }
  mean_ = std::move(mean);
  inv_std_ = std::move(inv_std);
}

void MlpModel::hidden_activations(std::span<const double> input, std::span<double> pre,
                                  std::span<double> act) const {
  const double* w1 = params_.data();
  const double* b1 = w1 + hidden_ * input_dim_;
  for (std::size_t h = 0; h < hidden_; ++h) {
    const double* w = w1 + h * input_dim_;
    double z = b1[h];
    for (std::size_t j = 0; j < input_dim_; ++j) z += w[j] * (input[j] - mean_[j]) * inv_std_[j];
    pre[h] = z;
    act[h] = z > 0.0 ? z : 0.0;
  }
}

void MlpModel::logits(std::span<const double> input, std::span<double> out) const {
  if (input.size() != input_dim_ || out.size() != classes_) {
    throw DimensionError("MlpModel::logits: shape mismatch");
  }
  std::vector<double> pre(hidden_), act(hidden_);
  hidden_activations(input, pre, act);
  const double* w2 = params_.data() + hidden_ * input_dim_ + hidden_;
  const double* b2 = w2 + classes_ * hidden_;
  for (std::size_t c = 0; c < classes_; ++c) {
    double z = b2[c];
    for (std::size_t h = 0; h < hidden_; ++h) z += w2[c * hidden_ + h] * act[h];
    out[c] = z;
  }
}

std::int32_t MlpModel::predict(std::span<const double> input) const {
  std::vector<double> out(classes_);
  logits(input, out);
  return static_cast<std::int32_t>(std::max_element(out.begin(), out.end()) - out.begin());
}

std::vector<std::int32_t> MlpModel::predict(const DenseMatrix& x,
                                            std::span<const NodeId> rows) const {
  std::vector<std::int32_t> out;
  out.reserve(rows.size());
  for (NodeId i : rows) out.push_back(predict(x.row(i)));
  return out;
}

bool MlpModel::all_finite() const noexcept {
  return std::all_of(params_.begin(), params_.end(), [](double v) { return std::isfinite(v); });
}

double MlpModel::loss_and_gradients(const DenseMatrix& x, std::span<const std::int32_t> labels,
                                    std::span<const NodeId> rows,
                                    std::vector<double>* grad) const {
  if (x.cols() != input_dim_) throw DimensionError("MlpModel: input width mismatch");
  if (rows.empty()) throw InvalidArgument("MlpModel: empty batch");
  const double* w2 = params_.data() + hidden_ * input_dim_ + hidden_;
  const double* b2 = w2 + classes_ * hidden_;
  double *gw1 = nullptr, *gb1 = nullptr, *gw2 = nullptr, *gb2 = nullptr;
  if (grad != nullptr) {
    grad->assign(params_.size(), 0.0);
    gw1 = grad->data();
    gb1 = gw1 + hidden_ * input_dim_;
    gw2 = gb1 + hidden_;
    gb2 = gw2 + classes_ * hidden_;
  }
  std::vector<double> xin(input_dim_), pre(hidden_), act(hidden_), prob(classes_), dact(hidden_);
  const double scale = 1.0 / static_cast<double>(rows.size());
  double loss = 0.0;
  for (NodeId i : rows) {
    auto input = x.row(i);
    hidden_activations(input, pre, act);
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < classes_; ++c) {
      double z = b2[c];
      for (std::size_t h = 0; h < hidden_; ++h) z += w2[c * hidden_ + h] * act[h];
      prob[c] = z;
      peak = std::max(peak, z);
    }
    double denom = 0.0;
    for (double& p : prob) denom += (p = std::exp(p - peak));
    for (double& p : prob) p /= denom;
    const auto y = static_cast<std::size_t>(labels[i]);
    loss -= std::log(std::max(prob[y], std::numeric_limits<double>::min()));
    if (grad == nullptr) continue;

    // dL/dlogits = softmax − onehot
    prob[y] -= 1.0;
    std::fill(dact.begin(), dact.end(), 0.0);
    for (std::size_t c = 0; c < classes_; ++c) {
      const double g = prob[c] * scale;
      gb2[c] += g;
      for (std::size_t h = 0; h < hidden_; ++h) {
        gw2[c * hidden_ + h] += g * act[h];
        dact[h] += w2[c * hidden_ + h] * g;
      }
    }
    for (std::size_t j = 0; j < input_dim_; ++j) xin[j] = (input[j] - mean_[j]) * inv_std_[j];
    for (std::size_t h = 0; h < hidden_; ++h) {
      if (pre[h] <= 0.0) continue;
      const double g = dact[h];
      gb1[h] += g;
      double* row = gw1 + h * input_dim_;
      for (std::size_t j = 0; j < input_dim_; ++j) row[j] += g * xin[j];
    }
  }
  return loss * scale;
}

MlpModel train_mlp(const DenseMatrix& x, const LabelSet& ls, std::span<const NodeId> train_idx,
                   const MlpParams& params, std::uint64_t seed, TrainingTrace* trace) {
  if (train_idx.empty()) throw InvalidArgument("train_mlp: empty training set");
  if (ls.num_classes() < 2) throw InvalidArgument("train_mlp: need at least 2 classes");
  if (x.rows() != ls.size()) throw DimensionError("train_mlp: feature rows != label count");
  if (params.batch == 0 || params.hidden == 0 || !(params.lr > 0.0)) {
    throw InvalidArgument("train_mlp: batch, hidden and lr must be positive");
  }
  for (NodeId i : train_idx) {
    if (!ls.has_truth(i)) {
      throw InvalidArgument("train_mlp: node " + std::to_string(i) + " has no label");
    }
  }

  MlpModel model(x.cols(), params.hidden, ls.num_classes());
  model.initialize(seed);
  if (params.standardize) {
    const std::size_t d = x.cols();
    std::vector<double> mean(d, 0.0), inv_std(d, 1.0);
    for (NodeId i : train_idx) {
      for (std::size_t j = 0; j < d; ++j) mean[j] += x(i, j);
    }
    for (double& v : mean) v /= static_cast<double>(train_idx.size());
    std::vector<double> var(d, 0.0);
    for (NodeId i : train_idx) {
      for (std::size_t j = 0; j < d; ++j) var[j] += (x(i, j) - mean[j]) * (x(i, j) - mean[j]);
    }
    for (std::size_t j = 0; j < d; ++j) {
      const double sd = std::sqrt(var[j] / static_cast<double>(train_idx.size()));
      inv_std[j] = sd > 1e-12 ? 1.0 / sd : 1.0;
    }
    model.set_input_scaling(std::move(mean), std::move(inv_std));
  }

  const auto labels = ls.labels();
  std::vector<NodeId> order(train_idx.begin(), train_idx.end());
  std::mt19937_64 rng(derive_seed(seed, SeedStream::kMlp));
  std::vector<double> grad;
  auto& theta = model.parameters();
  if (trace != nullptr) {
    trace->epoch_loss.clear();
    trace->epoch_loss.push_back(model.loss_and_gradients(x, labels, order, nullptr));
  }
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t lo = 0; lo < order.size(); lo += params.batch) {
      const std::size_t hi = std::min(order.size(), lo + params.batch);
      std::span<const NodeId> batch(order.data() + lo, hi - lo);
      const double loss = model.loss_and_gradients(x, labels, batch, &grad);
      if (!std::isfinite(loss)) {
        throw NumericalError("train_mlp: loss diverged at epoch " + std::to_string(epoch + 1));
      }
      epoch_loss += loss * static_cast<double>(batch.size());
      for (std::size_t p = 0; p < theta.size(); ++p) theta[p] -= params.lr * grad[p];
    }
    if (trace != nullptr) trace->epoch_loss.push_back(epoch_loss / static_cast<double>(order.size()));
  }
  if (!model.all_finite()) throw NumericalError("train_mlp: non-finite weights after training");
  return model;
}

Metrics score_predictions(std::span<const std::int32_t> truth,
                          std::span<const std::int32_t> pred) {
  if (truth.size() != pred.size()) throw DimensionError("score_predictions: length mismatch");
  if (truth.empty()) throw InvalidArgument("score_predictions: empty index set");
  std::map<std::int32_t, std::size_t> tp, fp, fn;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == pred[i]) {
      ++correct;
      ++tp[truth[i]];
    } else {
      ++fn[truth[i]];
      ++fp[pred[i]];
    }
  }
  std::map<std::int32_t, bool> present;
  for (std::int32_t t : truth) present[t] = true;
  double f1_sum = 0.0;
  for (const auto& [cls, unused] : present) {
    const double t = static_cast<double>(tp[cls]);
    const double denom = 2.0 * t + static_cast<double>(fp[cls] + fn[cls]);
    f1_sum += denom > 0.0 ? 2.0 * t / denom : 0.0;
  }
  return {static_cast<double>(correct) / static_cast<double>(truth.size()),
          f1_sum / static_cast<double>(present.size())};
}

Metrics evaluate(const MlpModel& model, const DenseMatrix& x, const LabelSet& ls,
                 std::span<const NodeId> idx) {
  std::vector<std::int32_t> truth;
  truth.reserve(idx.size());
  for (NodeId i : idx) {
    if (!ls.has_truth(i)) {
      throw InvalidArgument("evaluate: node " + std::to_string(i) + " has no ground truth");
    }
    truth.push_back(ls.label(i));
  }
  return score_predictions(truth, model.predict(x, idx));
}

std::string_view to_string(MaskMechanism m) {
  switch (m) {
    case MaskMechanism::kMcar: return "MCAR";
    case MaskMechanism::kMar: return "MAR";
    case MaskMechanism::kMnar: return "MNAR";
  }
  return "?";
}

MaskMechanism parse_mask_mechanism(std::string_view text) {
  std::string upper(text);
  for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper == "MCAR") return MaskMechanism::kMcar;
  if (upper == "MAR") return MaskMechanism::kMar;
  if (upper == "MNAR") return MaskMechanism::kMnar;
  throw InvalidArgument("unknown masking mechanism '" + std::string(text) +
                        "' (expected MCAR, MAR or MNAR)");
}

std::string_view to_string(FeatureSource f) {
  return f == FeatureSource::kStructural ? "structural" : "given";
}

FeatureSource parse_feature_source(std::string_view text) {
  if (text == "given") return FeatureSource::kGiven;
  if (text == "structural") return FeatureSource::kStructural;
  throw InvalidArgument("unknown feature source '" + std::string(text) +
                        "' (expected given or structural)");
}

void MaskSpec::validate() const {
  if (!(rate > 0.0 && rate < 1.0)) throw InvalidArgument("masking rate must lie in (0, 1)");
}

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double mean_sigmoid(std::span<const double> scores, double b) {
  double total = 0.0;
  for (double s : scores) total += sigmoid(s + b);
  return total / static_cast<double>(scores.size());
}

}  // namespace

double calibrate_intercept(std::span<const double> scores, double rate) {
  if (scores.empty()) throw InvalidArgument("calibrate_intercept: no scores");
  if (!(rate > 0.0 && rate < 1.0)) throw InvalidArgument("calibrate_intercept: rate not in (0,1)");
  // mean_sigmoid is increasing in b; widen the bracket until it straddles rate.
  double lo = -1.0, hi = 1.0;
  for (int i = 0; i < 60 && mean_sigmoid(scores, lo) > rate; ++i) lo *= 2.0;
  for (int i = 0; i < 60 && mean_sigmoid(scores, hi) < rate; ++i) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mean_sigmoid(scores, mid) < rate ? lo : hi) = mid;
  }
  const double b = 0.5 * (lo + hi);
  const double achieved = mean_sigmoid(scores, b);
  if (std::abs(achieved - rate) > 1e-3) {
    spdlog::warn("mask calibration reached mean probability {:.4f}, target {:.4f}", achieved,
                 rate);
  }
  return b;
}

std::vector<double> mask_probabilities(const DenseMatrix* features, const LabelSet& ls,
                                       const MaskSpec& spec) {
  spec.validate();
  const std::size_t n = ls.size();
  std::vector<NodeId> labeled;
  for (NodeId i = 0; i < n; ++i) {
    if (ls.observed(i)) labeled.push_back(i);
  }
  std::vector<double> prob(n, 0.0);
  if (labeled.empty()) return prob;
  if (spec.mechanism == MaskMechanism::kMcar) {
    for (NodeId i : labeled) prob[i] = spec.rate;
    return prob;
  }
  if (features == nullptr || features->cols() == 0) {
    throw InvalidArgument(std::string(to_string(spec.mechanism)) +
                          " masking requires node features");
  }
  if (features->rows() != n) throw DimensionError("mask_probabilities: feature rows != n");

  const std::size_t d = features->cols();
  std::vector<double> mean(d, 0.0), inv_std(d, 0.0);
  for (NodeId i : labeled) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += (*features)(i, j);
  }
  for (double& v : mean) v /= static_cast<double>(labeled.size());
  for (NodeId i : labeled) {
    for (std::size_t j = 0; j < d; ++j) {
      const double c = (*features)(i, j) - mean[j];
      inv_std[j] += c * c;
    }
  }
  for (double& v : inv_std) {
    const double sd = std::sqrt(v / static_cast<double>(labeled.size()));
    v = sd > 1e-12 ? 1.0 / sd : 0.0;  // constant columns carry no signal
  }

  std::mt19937_64 rng(derive_seed(spec.seed, SeedStream::kMask));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> w(d);
  double norm = 0.0;
  for (double& v : w) {
    v = normal(rng);
    norm += v * v;
  }
  norm = std::sqrt(norm);
  for (double& v : w) v /= norm;

  std::vector<double> offsets;
  if (spec.mechanism == MaskMechanism::kMnar) {
    offsets = spec.class_offsets;
    if (offsets.empty()) {
      offsets.resize(ls.num_classes());
      for (double& v : offsets) v = normal(rng);
    } else if (offsets.size() < ls.num_classes()) {
      throw DimensionError("MNAR class_offsets must cover every class");
    }
  }

  std::vector<double> scores;
  scores.reserve(labeled.size());
  for (NodeId i : labeled) {
    double z = 0.0;
    for (std::size_t j = 0; j < d; ++j) z += ((*features)(i, j) - mean[j]) * inv_std[j] * w[j];
    if (!offsets.empty()) z += offsets[static_cast<std::size_t>(ls.label(i))];
    scores.push_back(z);
  }
  const double b = calibrate_intercept(scores, spec.rate);
  for (std::size_t e = 0; e < labeled.size(); ++e) prob[labeled[e]] = sigmoid(scores[e] + b);
  return prob;
}

Mask generate_mask(const DenseMatrix* features, const LabelSet& ls, const MaskSpec& spec) {
  const auto prob = mask_probabilities(features, ls, spec);
  std::mt19937_64 rng(derive_seed(derive_seed(spec.seed, SeedStream::kMask), 1));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Mask keep(ls.size(), true);
  for (NodeId i = 0; i < ls.size(); ++i) {
    const double u = unit(rng);  // drawn for every node so streams line up across mechanisms
    if (ls.observed(i) && u < prob[i]) keep[i] = false;
  }
  return keep;
}

DenseMatrix structural_features(const Graph& g) {
  const std::size_t n = g.num_nodes();
  DenseMatrix out(n, 3);
  for (NodeId i = 0; i < n; ++i) {
    out(i, 0) = g.degree(i);
    const auto nbrs = g.neighbors(i);
    if (nbrs.size() < 2) continue;
    std::size_t links = 0;
    for (std::size_t a = 0; a < nbrs.size(); ++a) {
      for (std::size_t b = a + 1; b < nbrs.size(); ++b) links += g.has_edge(nbrs[a], nbrs[b]);
    }
    const double pairs = 0.5 * static_cast<double>(nbrs.size()) * (nbrs.size() - 1);
    out(i, 1) = static_cast<double>(links) / pairs;
  }

  // Batagelj-Zaversnik bucket peeling.
  const std::size_t max_deg = g.max_degree();
  std::vector<std::size_t> deg(n), bin(max_deg + 1, 0), pos(n), vert(n);
  for (NodeId i = 0; i < n; ++i) ++bin[deg[i] = g.degree(i)];
  std::size_t start = 0;
  for (auto& b : bin) {
    const std::size_t count = b;
    b = start;
    start += count;
  }
  for (NodeId i = 0; i < n; ++i) {
    pos[i] = bin[deg[i]]++;
    vert[pos[i]] = i;
  }
  for (std::size_t d = max_deg; d > 0; --d) bin[d] = bin[d - 1];
  if (!bin.empty()) bin[0] = 0;
  for (std::size_t p = 0; p < n; ++p) {
    const auto v = static_cast<NodeId>(vert[p]);
    for (NodeId u : g.neighbors(v)) {
      if (deg[u] > deg[v]) {
        const std::size_t du = deg[u], pu = pos[u], pw = bin[du];
        const std::size_t w = vert[pw];
        if (u != w) {
          std::swap(vert[pu], vert[pw]);
          pos[u] = pw;
          pos[w] = pu;
        }
        ++bin[du];
        --deg[u];
      }
    }
  }
  const std::size_t max_core = n ? *std::max_element(deg.begin(), deg.end()) : 0;
  for (NodeId i = 0; i < n; ++i) {
    out(i, 2) = max_core ? static_cast<double>(deg[i]) / static_cast<double>(max_core) : 0.0;
  }
  return out;
}

}  // namespace fuse
