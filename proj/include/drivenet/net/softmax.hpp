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
Vec<T> softmax(const Vec<T>& z) {
  if (!z.allFinite()) throw Error("softmax: non-finite input");
  Vec<T> p = (z.array() - z.maxCoeff()).exp().matrix();
  return p / p.sum();
}

template <typename T>
Vec<T> log_softmax(const Vec<T>& z) {
  if (!z.allFinite()) throw Error("softmax: non-finite input");
  const T m = z.maxCoeff();
  const T lse = m + std::log((z.array() - m).exp().sum());
  return (z.array() - lse).matrix();
}

/// -sum_j q_j log softmax(z)_j for a target distribution q.
template <typename T>
T cross_entropy(const Vec<T>& logits, const Vec<T>& target) {
  return -target.dot(log_softmax(logits));
}

/// dL/dz of cross_entropy: softmax(z) - q (targets sum to one).
template <typename T>
Vec<T> cross_entropy_grad(const Vec<T>& logits, const Vec<T>& target) {
  return softmax(logits) - target;
}

template <typename T>
Eigen::Index argmax(const Vec<T>& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v(i) > v(best)) best = i;
  return best;
}

}  // namespace drivenet::net
