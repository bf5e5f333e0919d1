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

/// Single-layer LSTM, gate blocks stacked in the order input, forget,
/// cell candidate, output.
template <typename T>
struct LstmParams {
  Mat<T> wx;    // 4H x In
  Mat<T> wh;    // 4H x H
  Mat<T> bias;  // 4H x 1

  void init(Eigen::Index in, Eigen::Index hidden, Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
    init_uniform(wx, 4 * hidden, in, bound, rng);
    init_uniform(wh, 4 * hidden, hidden, bound, rng);
    init_uniform(bias, 4 * hidden, 1, bound, rng);
    bias.block(hidden, 0, hidden, 1).array() += T(1);  // forget gate starts open
  }

  Eigen::Index hidden() const { return wh.cols(); }
  Eigen::Index input_dim() const { return wx.cols(); }

  void visit(const std::string& prefix, const TensorVisitor<T>& f) {
    f(prefix + ".wx", wx);
    f(prefix + ".wh", wh);
    f(prefix + ".bias", bias);
  }
};

template <typename T>
struct LstmCache {
  Mat<T> inputs;   // In x n
  Mat<T> gates;    // 4H x n, post-activation
  Mat<T> cells;    // H x n
  Mat<T> tanh_c;   // H x n
  Mat<T> hidden;   // H x n
};

/// Runs the sequence (one column per step) from a zero state and returns
/// every hidden state.
template <typename T>
const Mat<T>& lstm_forward(const LstmParams<T>& p, const Mat<T>& x, LstmCache<T>& cache) {
  if (x.rows() != p.input_dim()) throw Error("lstm: input dimension mismatch");
  if (x.cols() < 1) throw Error("lstm: empty sequence");
  const auto H = p.hidden();
  const auto n = x.cols();
  cache.inputs = x;
  cache.gates.noalias() = p.wx * x;
  cache.gates.colwise() += p.bias.col(0);
  cache.cells.resize(H, n);
  cache.tanh_c.resize(H, n);
  cache.hidden.resize(H, n);
  Vec<T> h = Vec<T>::Zero(H);
  Vec<T> c = Vec<T>::Zero(H);
  for (Eigen::Index t = 0; t < n; ++t) {
    auto a = cache.gates.col(t);
    a.noalias() += p.wh * h;
    for (Eigen::Index k = 0; k < H; ++k) {
      a(k) = sigmoid(a(k));
      a(H + k) = sigmoid(a(H + k));
      a(2 * H + k) = std::tanh(a(2 * H + k));
      a(3 * H + k) = sigmoid(a(3 * H + k));
    }
    c = a.segment(H, H).cwiseProduct(c) + a.segment(0, H).cwiseProduct(a.segment(2 * H, H));
    cache.cells.col(t) = c;
    cache.tanh_c.col(t) = c.array().tanh().matrix();
    h = a.segment(3 * H, H).cwiseProduct(cache.tanh_c.col(t));
    cache.hidden.col(t) = h;
  }
  return cache.hidden;
}

/// Backpropagation through time given dL/dh_t for every step. Returns
/// dL/dx with one column per step.
template <typename T>
Mat<T> lstm_backward(const LstmParams<T>& p, const LstmCache<T>& cache, const Mat<T>& d_hidden,
                     LstmParams<T>& grad) {
  const auto H = p.hidden();
  const auto n = cache.inputs.cols();
  Mat<T> d_pre(4 * H, n);
  Vec<T> dh_next = Vec<T>::Zero(H);
  Vec<T> dc_next = Vec<T>::Zero(H);
  for (Eigen::Index t = n - 1; t >= 0; --t) {
    const auto g = cache.gates.col(t);
    const auto i = g.segment(0, H).array();
    const auto f = g.segment(H, H).array();
    const auto cand = g.segment(2 * H, H).array();
    const auto o = g.segment(3 * H, H).array();
    const auto tc = cache.tanh_c.col(t).array();
    const Vec<T> dh = d_hidden.col(t) + dh_next;
    const Vec<T> dc = (dh.array() * o * (T(1) - tc * tc) + dc_next.array()).matrix();
    Vec<T> c_prev = t > 0 ? Vec<T>(cache.cells.col(t - 1)) : Vec<T>::Zero(H);
    d_pre.col(t).segment(0, H) = (dc.array() * cand * i * (T(1) - i)).matrix();
    d_pre.col(t).segment(H, H) = (dc.array() * c_prev.array() * f * (T(1) - f)).matrix();
    d_pre.col(t).segment(2 * H, H) = (dc.array() * i * (T(1) - cand * cand)).matrix();
    d_pre.col(t).segment(3 * H, H) = (dh.array() * tc * o * (T(1) - o)).matrix();
    dc_next = (dc.array() * f).matrix();
    dh_next.noalias() = p.wh.transpose() * d_pre.col(t);
  }
  if (n > 1) grad.wh.noalias() += d_pre.rightCols(n - 1) * cache.hidden.leftCols(n - 1).transpose();
  grad.wx.noalias() += d_pre * cache.inputs.transpose();
  grad.bias.col(0) += d_pre.rowwise().sum();
  return p.wx.transpose() * d_pre;
}

}  // namespace drivenet::net
