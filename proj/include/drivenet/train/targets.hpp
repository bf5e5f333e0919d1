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

#include "drivenet/dataio/label.hpp"
#include "drivenet/net/tensor.hpp"

namespace drivenet::train {

/// Label-smoothed target: 1 - s + s/K on the true class, s/K elsewhere.
template <typename T = double>
net::Vec<T> smoothed_targets(ManeuverLabel label, double s, int n_classes = static_cast<int>(kNumClasses)) {
  if (s < 0.0 || s >= 1.0) throw Error("label smoothing must be in [0, 1)");
  net::Vec<T> q = net::Vec<T>::Constant(n_classes, static_cast<T>(s / n_classes));
  q(static_cast<Eigen::Index>(index_of(label))) = static_cast<T>(1.0 - s + s / n_classes);
  return q;
}

}  // namespace drivenet::train
