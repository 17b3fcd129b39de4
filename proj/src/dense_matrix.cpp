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

#include "fuse/dense_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "fuse/error.hpp"

namespace fuse {

bool DenseMatrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void DenseMatrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

void DenseMatrix::add_scaled(const DenseMatrix& other, double alpha) {
  if (other.rows_ != rows_ || other.cols_ != cols_) {
    throw DimensionError("add_scaled: shape mismatch");
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += alpha * other.data_[i];
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("max_abs_diff: shape mismatch");
  }
  double worst = 0.0;
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) worst = std::max(worst, std::abs(av[i] - bv[i]));
  return worst;
}

double frobenius_norm(const DenseMatrix& a) {
  double sum = 0.0;
  for (double v : a.values()) sum += v * v;
  return std::sqrt(sum);
}

std::vector<double> column_sums(const DenseMatrix& a) {
  std::vector<double> out(a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto r = a.row(i);
    for (std::size_t c = 0; c < r.size(); ++c) out[c] += r[c];
  }
  return out;
}

DenseMatrix transpose_times(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows()) throw DimensionError("transpose_times: row count mismatch");
  DenseMatrix out(a.cols(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ar = a.row(i);
    auto br = b.row(i);
    for (std::size_t p = 0; p < ar.size(); ++p) {
      const double x = ar[p];
      auto orow = out.row(p);
      for (std::size_t q = 0; q < br.size(); ++q) orow[q] += x * br[q];
    }
  }
  return out;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionError("multiply: inner dimension mismatch");
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ar = a.row(i);
    auto orow = out.row(i);
    for (std::size_t p = 0; p < ar.size(); ++p) {
      const double x = ar[p];
      auto br = b.row(p);
      for (std::size_t q = 0; q < br.size(); ++q) orow[q] += x * br[q];
    }
  }
  return out;
}

double orthonormality_error(const DenseMatrix& s) {
  const DenseMatrix g = transpose_times(s, s);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = 0; j < g.cols(); ++j) {
      worst = std::max(worst, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

}  // namespace fuse
