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

/// Additive global attention over recurrent states with the last state as
/// the query:
///   e_t = v . tanh(Wq h_n + Wk h_t),  alpha = softmax(e),  ctx = sum_t alpha_t h_t
template <typename T>
struct AttentionParams {
  Mat<T> wq;  // A x H
  Mat<T> wk;  // A x H
  Mat<T> v;   // A x 1

  void init(Eigen::Index hidden, Eigen::Index units, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
    init_uniform(wq, units, hidden, bound, rng);
    init_uniform(wk, units, hidden, bound, rng);
    init_uniform(v, units, 1, 1.0 / std::sqrt(static_cast<double>(units)), rng);
  }

  void visit(const std::string& prefix, const TensorVisitor<T>& f) {
    f(prefix + ".wq", wq);
    f(prefix + ".wk", wk);
    f(prefix + ".v", v);
  }
};

template <typename T>
struct AttentionCache {
  Mat<T> states;  // H x n
  Mat<T> u;       // A x n, tanh activations
  Vec<T> alpha;   // n
};

template <typename T>
Vec<T> attention_forward(const AttentionParams<T>& p, const Mat<T>& states, AttentionCache<T>& cache) {
  if (states.cols() < 1) throw Error("attention: empty sequence");
  if (states.rows() != p.wk.cols()) throw Error("attention: state dimension mismatch");
  const auto n = states.cols();
  cache.states = states;
  const Vec<T> q = p.wq * states.col(n - 1);
  cache.u.noalias() = p.wk * states;
  cache.u.colwise() += q;
  cache.u = cache.u.array().tanh().matrix();
  Vec<T> e = cache.u.transpose() * p.v.col(0);
  e.array() -= e.maxCoeff();
  cache.alpha = e.array().exp().matrix();
  cache.alpha /= cache.alpha.sum();
  return states * cache.alpha;
}

/// Returns dL/d(states) and accumulates parameter gradients.
template <typename T>
Mat<T> attention_backward(const AttentionParams<T>& p, const AttentionCache<T>& cache, const Vec<T>& d_ctx,
                          AttentionParams<T>& grad) {
  const auto n = cache.states.cols();
  Mat<T> d_states = d_ctx * cache.alpha.transpose();
  const Vec<T> d_alpha = cache.states.transpose() * d_ctx;
  const T dot = cache.alpha.dot(d_alpha);
  const Vec<T> d_e = (cache.alpha.array() * (d_alpha.array() - dot)).matrix();
  grad.v.col(0).noalias() += cache.u * d_e;
  Mat<T> d_pre = (p.v.col(0) * d_e.transpose()).cwiseProduct(
      (T(1) - cache.u.array() * cache.u.array()).matrix());
  grad.wk.noalias() += d_pre * cache.states.transpose();
  d_states.noalias() += p.wk.transpose() * d_pre;
  const Vec<T> d_q = d_pre.rowwise().sum();
  grad.wq.noalias() += d_q * cache.states.col(n - 1).transpose();
  d_states.col(n - 1).noalias() += p.wq.transpose() * d_q;
  return d_states;
}

}  // namespace drivenet::net
