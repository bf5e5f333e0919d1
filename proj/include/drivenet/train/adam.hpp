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

#include <cmath>
#include <span>

#include "drivenet/net/model.hpp"

namespace drivenet::train {

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected Adam update of one flat array; `step` is the 1-based
/// count including this update.
template <typename T>
void adam_update(std::span<T> params, std::span<const T> grads, std::span<T> m, std::span<T> v, long step,
                 const AdamConfig& cfg) {
  if (params.size() != grads.size() || params.size() != m.size() || params.size() != v.size())
    throw Error("adam: shape mismatch");
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    const double mi = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g;
    const double vi = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g * g;
    m[i] = static_cast<T>(mi);
    v[i] = static_cast<T>(vi);
    params[i] -= static_cast<T>(cfg.learning_rate * (mi / c1) / (std::sqrt(vi / c2) + cfg.epsilon));
  }
}

template <typename T>
struct AdamState {
  net::ModelParams<T> m;
  net::ModelParams<T> v;
  long step = 0;

  static AdamState like(const net::ModelParams<T>& p) { return {p.zeros_like(), p.zeros_like(), 0}; }
};

template <typename T>
void adam_step(net::ModelParams<T>& params, net::ModelParams<T>& grads, AdamState<T>& state, const AdamConfig& cfg) {
  auto p = params.tensors();
  auto g = grads.tensors();
  auto m = state.m.tensors();
  auto v = state.v.tensors();
  if (p.size() != g.size() || p.size() != m.size() || p.size() != v.size()) throw Error("adam: shape mismatch");
  ++state.step;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i]->size() != g[i]->size() || p[i]->size() != m[i]->size() || p[i]->size() != v[i]->size())
      throw Error("adam: shape mismatch");
    const auto n = static_cast<std::size_t>(p[i]->size());
    adam_update<T>({p[i]->data(), n}, {g[i]->data(), n}, {m[i]->data(), n}, {v[i]->data(), n}, state.step, cfg);
  }
}

}  // namespace drivenet::train
