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
#include <span>
#include <string_view>
#include <vector>

#include "fuse/dense_matrix.hpp"
#include "fuse/graph.hpp"

namespace fuse {

struct Split {
  std::vector<NodeId> train_idx;
  std::vector<NodeId> test_idx;
  double fraction = 0.0;
  std::uint64_t seed = 0;
};

// Per-class shuffled partition of the observed nodes; class c contributes
// round(fraction·|c|) nodes to train, clamped so both sides get at least one.
// Both index lists come out sorted.
Split stratified_split(const LabelSet& ls, double train_fraction, std::uint64_t seed);

struct MlpParams {
  std::size_t hidden = 16;
  std::size_t epochs = 300;
  double lr = 0.01;
  std::size_t batch = 64;
  // z-score inputs with the training rows' mean and std before the first layer.
  bool standardize = true;
};

/// Two affine layers with ReLU between them, softmax output.
///
/// Parameters live in one flat vector laid out as W1 (h×d, row-major), b1 (h),
/// W2 (C×h, row-major), b2 (C), so gradient checks can perturb them directly.
class MlpModel {
 public:
  MlpModel() = default;
  MlpModel(std::size_t input_dim, std::size_t hidden, std::size_t classes);

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t hidden() const noexcept { return hidden_; }
  std::size_t classes() const noexcept { return classes_; }

  std::vector<double>& parameters() noexcept { return params_; }
  const std::vector<double>& parameters() const noexcept { return params_; }

  // Glorot-uniform weights, zero biases.
  void initialize(std::uint64_t seed);
  void set_input_scaling(std::vector<double> mean, std::vector<double> inv_std);

  // Mean cross-entropy over `rows` of x; the gradient w.r.t. parameters() is
  // written to `grad` (resized as needed) when non-null.
  double loss_and_gradients(const DenseMatrix& x, std::span<const std::int32_t> labels,
                            std::span<const NodeId> rows, std::vector<double>* grad) const;

  // C logits for one input row.
  void logits(std::span<const double> input, std::span<double> out) const;
  std::int32_t predict(std::span<const double> input) const;
  std::vector<std::int32_t> predict(const DenseMatrix& x, std::span<const NodeId> rows) const;

  bool all_finite() const noexcept;

 private:
  void hidden_activations(std::span<const double> input, std::span<double> pre,
                          std::span<double> act) const;

  std::size_t input_dim_ = 0;
  std::size_t hidden_ = 0;
  std::size_t classes_ = 0;
  std::vector<double> params_;
  std::vector<double> mean_;
  std::vector<double> inv_std_;
};

// Per-epoch mean training loss; entry 0 is the loss before any update.
struct TrainingTrace {
  std::vector<double> epoch_loss;
};

/// Mini-batch SGD on softmax cross-entropy over the ground-truth labels of
/// `train_idx`. Classes are 0..ls.num_classes()-1. Throws NumericalError if
/// the loss stops being finite.
MlpModel train_mlp(const DenseMatrix& x, const LabelSet& ls, std::span<const NodeId> train_idx,
                   const MlpParams& params, std::uint64_t seed, TrainingTrace* trace = nullptr);

struct Metrics {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
};

// Macro-F1 averages over classes that occur in `truth`; a class with no
// correct and no predicted members scores F1 = 0.
Metrics score_predictions(std::span<const std::int32_t> truth,
                          std::span<const std::int32_t> pred);

Metrics evaluate(const MlpModel& model, const DenseMatrix& x, const LabelSet& ls,
                 std::span<const NodeId> idx);

enum class MaskMechanism { kMcar, kMar, kMnar };
enum class FeatureSource { kGiven, kStructural };

std::string_view to_string(MaskMechanism m);
MaskMechanism parse_mask_mechanism(std::string_view text);
std::string_view to_string(FeatureSource f);
FeatureSource parse_feature_source(std::string_view text);

struct MaskSpec {
  MaskMechanism mechanism = MaskMechanism::kMcar;
  double rate = 0.2;
  std::uint64_t seed = 0;
  FeatureSource feature_source = FeatureSource::kGiven;
  // MNAR only. Per-class score offsets; empty draws them i.i.d. N(0, 1).
  std::vector<double> class_offsets;

  void validate() const;
};

// Intercept b with mean sigmoid(score_i + b) = rate, found by bisection.
// Returns the closest reachable b when the target cannot be met exactly
// (for instance with infinite scores).
double calibrate_intercept(std::span<const double> scores, double rate);

// Masking probability of every node. MCAR: `rate` for labeled nodes.
// MAR: sigmoid(z_i·w + b) on z-scored features with random unit-norm w.
// MNAR: the MAR score plus a per-class offset. Nodes without a label get 0.
// `features` may be null for MCAR only.
std::vector<double> mask_probabilities(const DenseMatrix* features, const LabelSet& ls,
                                       const MaskSpec& spec);

// Keep-vector: true where an observed label stays observed.
Mask generate_mask(const DenseMatrix* features, const LabelSet& ls, const MaskSpec& spec);

// n×3: degree, local clustering coefficient, core number / max core number.
DenseMatrix structural_features(const Graph& g);

}  // namespace fuse
