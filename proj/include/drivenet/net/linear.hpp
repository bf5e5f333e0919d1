/* Copyright 2026 The drivenet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License. */

#pragma once

#include "drivenet/net/tensor.hpp"

namespace drivenet::net {

template <typename T>
struct LinearParams {
  Mat<T> weight;  // out x in
  Mat<T> bias;    // out x 1

  void init(Eigen::Index in, Eigen::Index out, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    init_uniform(weight, out, in, bound, rng);
    init_uniform(bias, out, 1, bound, rng);
  }

  Eigen::Index in_dim() const { return weight.cols(); }
  Eigen::Index out_dim() const { return weight.rows(); }

  void visit(const std::string& prefix, const TensorVisitor<T>& f) {
    f(prefix + ".weight", weight);
    f(prefix + ".bias", bias);
  }
};

template <typename T>
Vec<T> linear_forward(const LinearParams<T>& p, const Vec<T>& x) {
  if (x.size() != p.in_dim()) throw Error("linear layer: input dimension mismatch");
  return p.weight * x + p.bias.col(0);
}

/// Accumulates parameter gradients into `grad` and returns dL/dx.
template <typename T>
Vec<T> linear_backward(const LinearParams<T>& p, const Vec<T>& x, const Vec<T>& dy, LinearParams<T>& grad) {
  grad.weight.noalias() += dy * x.transpose();
  grad.bias.col(0) += dy;
  return p.weight.transpose() * dy;
}

}  // namespace drivenet::net
