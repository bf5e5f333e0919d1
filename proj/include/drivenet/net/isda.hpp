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

#include <vector>

#include "drivenet/net/linear.hpp"
#include "drivenet/net/softmax.hpp"

namespace drivenet::net {

/// Running class-conditional statistics of the classifier's input features,
/// with a diagonal covariance per class.
template <typename T>
struct IsdaState {
  Mat<T> mean;                // D x K
  Mat<T> var;                 // D x K, diagonal covariance entries
  std::vector<double> count;  // K
  double lambda0 = 0.5;

  IsdaState() = default;
  IsdaState(Eigen::Index dim, Eigen::Index classes, double lambda0_ = 0.5)
      : mean(Mat<T>::Zero(dim, classes)), var(Mat<T>::Zero(dim, classes)),
        count(static_cast<std::size_t>(classes), 0.0), lambda0(lambda0_) {}

  /// Strength ramp lambda0 * t / total; t is the current epoch.
  double lambda(double t, double total) const {
    if (total <= 0) return 0.0;
    return lambda0 * std::clamp(t / total, 0.0, 1.0);
  }

  /// Count-weighted merge of each class's batch mean and variance into the
  /// running estimate.
  void update(const Mat<T>& features, const std::vector<int>& labels) {
    const auto D = mean.rows();
    for (Eigen::Index k = 0; k < mean.cols(); ++k) {
      double n = 0;
      Vec<T> bm = Vec<T>::Zero(D);
      for (std::size_t s = 0; s < labels.size(); ++s)
        if (labels[s] == k) {
          bm += features.col(static_cast<Eigen::Index>(s));
          n += 1;
        }
      if (n == 0) continue;
      bm /= static_cast<T>(n);
      Vec<T> bv = Vec<T>::Zero(D);
      for (std::size_t s = 0; s < labels.size(); ++s)
        if (labels[s] == k) bv += (features.col(static_cast<Eigen::Index>(s)) - bm).cwiseAbs2();
      bv /= static_cast<T>(n);
      const auto ks = static_cast<std::size_t>(k);
      const T w = static_cast<T>(n / (count[ks] + n));
      const Vec<T> dm = mean.col(k) - bm;
      var.col(k) = var.col(k) * (T(1) - w) + bv * w + (w * (T(1) - w)) * dm.cwiseAbs2();
      mean.col(k) = mean.col(k) * (T(1) - w) + bm * w;
      count[ks] += n;
    }
  }
};

/// Logits shifted by the expected effect of class-conditional feature noise:
///   z~_j = z_j + (lambda / 2) (w_j - w_y)^T diag(var_y) (w_j - w_y)
template <typename T>
Vec<T> isda_augmented_logits(const Vec<T>& logits, const Mat<T>& weight, const Vec<T>& var_y, int y, T lambda) {
  Vec<T> out = logits;
  for (Eigen::Index j = 0; j < weight.rows(); ++j) {
    if (j == y) continue;
    const auto diff = (weight.row(j) - weight.row(y)).transpose();
    out(j) += lambda / T(2) * diff.cwiseAbs2().dot(var_y);
  }
  return out;
}

template <typename T>
struct IsdaResult {
  T loss = T(0);
  Mat<T> d_features;      // D x B
  LinearParams<T> grad;   // classifier gradients
  Mat<T> logits;          // K x B, un-augmented
};

/// Batch-mean ISDA surrogate loss and its gradients. `targets` holds one
/// probability column per sample (one-hot or smoothed); the augmentation
/// term always uses the sample's true class `labels[s]`.
template <typename T>
IsdaResult<T> isda_loss(const Mat<T>& features, const std::vector<int>& labels, const Mat<T>& targets,
                        const LinearParams<T>& classifier, const Mat<T>& var, T lambda) {
  if (lambda < T(0)) throw Error("isda: lambda must be non-negative");
  const auto B = features.cols();
  if (static_cast<Eigen::Index>(labels.size()) != B || targets.cols() != B)
    throw Error("isda: batch size mismatch");
  if (features.rows() != classifier.in_dim() || var.rows() != features.rows())
    throw Error("isda: feature dimension mismatch");
  const auto K = classifier.out_dim();
  IsdaResult<T> r;
  r.d_features.resize(features.rows(), B);
  r.grad.weight = Mat<T>::Zero(K, features.rows());
  r.grad.bias = Mat<T>::Zero(K, 1);
  r.logits.resize(K, B);
  const T inv_b = T(1) / static_cast<T>(B);
  for (Eigen::Index s = 0; s < B; ++s) {
    const int y = labels[static_cast<std::size_t>(s)];
    const Vec<T> f = features.col(s);
    const Vec<T> z = linear_forward(classifier, f);
    r.logits.col(s) = z;
    const Vec<T> var_y = var.col(y);
    const Vec<T> zt = isda_augmented_logits(z, classifier.weight, var_y, y, lambda);
    const Vec<T> q = targets.col(s);
    r.loss += cross_entropy(zt, q) * inv_b;
    const Vec<T> dz = cross_entropy_grad(zt, q) * inv_b;
    r.d_features.col(s) = classifier.weight.transpose() * dz;
    r.grad.weight.noalias() += dz * f.transpose();
    r.grad.bias.col(0) += dz;
    for (Eigen::Index j = 0; j < K; ++j) {
      if (j == y) continue;
      const Vec<T> g = (lambda * dz(j)) * (classifier.weight.row(j) - classifier.weight.row(y)).transpose().cwiseProduct(var_y);
      r.grad.weight.row(j) += g.transpose();
      r.grad.weight.row(y) -= g.transpose();
    }
  }
  return r;
}

}  // namespace drivenet::net
