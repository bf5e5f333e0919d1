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

#include <functional>
#include <memory>

#include "drivenet/net/tensor.hpp"

namespace drivenet::net {

/// Channel-major feature map: rows are channels, column y*width + x.
template <typename T>
struct FeatureMap {
  Mat<T> data;
  int height = 0;
  int width = 0;

  Eigen::Index channels() const { return data.rows(); }
};

/// 3x3 convolution, zero padding 1, followed by a rectifier.
template <typename T>
struct ConvParams {
  Mat<T> weight;  // Cout x (Cin * 9)
  Mat<T> bias;    // Cout x 1
  int stride = 1;

  void init(Eigen::Index in_c, Eigen::Index out_c, int s, Rng& rng) {
    stride = s;
    const double fan_in = static_cast<double>(in_c * 9);
    init_uniform(weight, out_c, in_c * 9, std::sqrt(6.0 / fan_in), rng);
    init_uniform(bias, out_c, 1, 1.0 / std::sqrt(fan_in), rng);
  }

  Eigen::Index in_channels() const { return weight.cols() / 9; }
  Eigen::Index out_channels() const { return weight.rows(); }

  void visit(const std::string& prefix, const TensorVisitor<T>& f) {
    f(prefix + ".weight", weight);
    f(prefix + ".bias", bias);
  }
};

inline int conv_out_size(int in, int stride) { return (in - 1) / stride + 1; }

template <typename T>
Mat<T> im2col(const FeatureMap<T>& in, int stride, int out_h, int out_w) {
  const auto C = in.channels();
  Mat<T> cols = Mat<T>::Zero(C * 9, out_h * out_w);
  for (Eigen::Index c = 0; c < C; ++c) {
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const Eigen::Index row = c * 9 + ky * 3 + kx;
        for (int oy = 0; oy < out_h; ++oy) {
          const int iy = oy * stride + ky - 1;
          if (iy < 0 || iy >= in.height) continue;
          for (int ox = 0; ox < out_w; ++ox) {
            const int ix = ox * stride + kx - 1;
            if (ix < 0 || ix >= in.width) continue;
            cols(row, oy * out_w + ox) = in.data(c, iy * in.width + ix);
          }
        }
      }
    }
  }
  return cols;
}

template <typename T>
Mat<T> col2im(const Mat<T>& cols, Eigen::Index channels, int in_h, int in_w, int stride, int out_h, int out_w) {
  Mat<T> out = Mat<T>::Zero(channels, in_h * in_w);
  for (Eigen::Index c = 0; c < channels; ++c) {
    for (int ky = 0; ky < 3; ++ky) {
      for (int kx = 0; kx < 3; ++kx) {
        const Eigen::Index row = c * 9 + ky * 3 + kx;
        for (int oy = 0; oy < out_h; ++oy) {
          const int iy = oy * stride + ky - 1;
          if (iy < 0 || iy >= in_h) continue;
          for (int ox = 0; ox < out_w; ++ox) {
            const int ix = ox * stride + kx - 1;
            if (ix < 0 || ix >= in_w) continue;
            out(c, iy * in_w + ix) += cols(row, oy * out_w + ox);
          }
        }
      }
    }
  }
  return out;
}

template <typename T>
struct ConvCache {
  Mat<T> cols;
  Mat<T> output;  // post-activation
  int in_h = 0, in_w = 0;
};

template <typename T>
FeatureMap<T> conv_forward(const ConvParams<T>& p, const FeatureMap<T>& in, ConvCache<T>& cache) {
  if (in.channels() != p.in_channels()) throw Error("conv: channel mismatch");
  const int oh = conv_out_size(in.height, p.stride);
  const int ow = conv_out_size(in.width, p.stride);
  cache.in_h = in.height;
  cache.in_w = in.width;
  cache.cols = im2col(in, p.stride, oh, ow);
  FeatureMap<T> out;
  out.height = oh;
  out.width = ow;
  out.data.noalias() = p.weight * cache.cols;
  out.data.colwise() += p.bias.col(0);
  out.data = out.data.cwiseMax(T(0));
  cache.output = out.data;
  return out;
}

/// Returns dL/d(input) unless `need_input_grad` is false.
template <typename T>
Mat<T> conv_backward(const ConvParams<T>& p, const ConvCache<T>& cache, const Mat<T>& d_out, ConvParams<T>& grad,
                     bool need_input_grad) {
  const Mat<T> d_pre = (cache.output.array() > T(0)).select(d_out, T(0));
  grad.weight.noalias() += d_pre * cache.cols.transpose();
  grad.bias.col(0) += d_pre.rowwise().sum();
  if (!need_input_grad) return {};
  const int oh = conv_out_size(cache.in_h, p.stride);
  const int ow = conv_out_size(cache.in_w, p.stride);
  const Mat<T> d_cols = p.weight.transpose() * d_pre;
  return col2im(d_cols, p.in_channels(), cache.in_h, cache.in_w, p.stride, oh, ow);
}

/// Stage strides for an input of `size`: stride 2 while the map is at
/// least 16 wide, so 64 and 128 inputs both end at 8x8.
inline std::vector<int> backbone_strides(int size, std::size_t stages) {
  std::vector<int> s;
  for (std::size_t i = 0; i < stages; ++i) {
    const int stride = size >= 16 ? 2 : 1;
    s.push_back(stride);
    size = conv_out_size(size, stride);
  }
  return s;
}

template <typename T>
struct TinyConvParams {
  std::vector<ConvParams<T>> stages;

  void init(const std::vector<int>& channels, int input_size, Rng& rng) {
    const auto strides = backbone_strides(input_size, channels.size());
    stages.resize(channels.size());
    Eigen::Index in_c = 3;
    for (std::size_t i = 0; i < channels.size(); ++i) {
      stages[i].init(in_c, channels[i], strides[i], rng);
      in_c = channels[i];
    }
  }

  void visit(const std::string& prefix, const TensorVisitor<T>& f) {
    for (std::size_t i = 0; i < stages.size(); ++i) stages[i].visit(prefix + "." + std::to_string(i), f);
  }
};

template <typename T>
struct TinyConvCache {
  std::vector<ConvCache<T>> stages;
};

template <typename T>
FeatureMap<T> tiny_conv_forward(const TinyConvParams<T>& p, const FeatureMap<T>& in, TinyConvCache<T>& cache) {
  cache.stages.resize(p.stages.size());
  FeatureMap<T> x = in;
  for (std::size_t i = 0; i < p.stages.size(); ++i) x = conv_forward(p.stages[i], x, cache.stages[i]);
  return x;
}

template <typename T>
void tiny_conv_backward(const TinyConvParams<T>& p, const TinyConvCache<T>& cache, Mat<T> d_out,
                        TinyConvParams<T>& grad) {
  for (std::size_t i = p.stages.size(); i-- > 0;)
    d_out = conv_backward(p.stages[i], cache.stages[i], d_out, grad.stages[i], i > 0);
}

/// A frozen, externally supplied per-frame extractor (for example a
/// pretrained classification network truncated before its pooling layer).
/// Gradients stop at its output.
template <typename T>
using ExternalExtractor = std::function<FeatureMap<T>(const FeatureMap<T>&)>;

}  // namespace drivenet::net
