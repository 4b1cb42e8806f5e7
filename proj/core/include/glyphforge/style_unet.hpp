// Copyright 2026 The GlyphForge Authors. All Rights Reserved.
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

// U-Net encoder/decoder with the style vector concatenated at the bottleneck.
//
// Encoder stage i: 4x4 stride-2 convolution from C(i-1) to C(i) channels,
// C(i) = min(cap, base * 2^i). Every stage but the innermost is followed by
// instance normalization (learned scale/shift) and a leaky rectifier; the
// innermost stage has a bias and a leaky rectifier and is the bottleneck.
//
// Decoder stage j: 4x4 stride-2 transposed convolution. Stage 0 consumes the
// bottleneck plus K constant style planes; stage j > 0 consumes the previous
// decoder output concatenated with encoder stage depth-1-j. Non-final stages
// use instance normalization and a rectifier; the final stage has a bias and
// a logistic squashing to (0,1).

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "glyphforge/tensor.hpp"

namespace glyphforge {

struct ModelConfig {
  int input_size = 64;
  int depth = 4;
  int base_channels = 32;
  int channel_cap = 512;
  int style_count = 4;
  std::uint64_t seed = 1;

  // Fixed architecture metadata, persisted with checkpoints.
  int kernel_size = 4;
  double leaky_slope = 0.2;
  double norm_epsilon = 1e-5;

  // Throws Error(kConfigInvalid) naming the violated invariant.
  void Validate() const;

  int StageChannels(int stage) const;
  int BottleneckChannels() const { return StageChannels(depth - 1); }
  int BottleneckSide() const { return input_size >> depth; }

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Conditioning vector of length K. Entries are unconstrained finite reals.
class StyleWeights {
 public:
  StyleWeights() = default;
  explicit StyleWeights(std::vector<double> values) : values_(std::move(values)) {}
  static StyleWeights Zeros(int k) { return StyleWeights(std::vector<double>(static_cast<std::size_t>(k), 0.0)); }

  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& values() const { return values_; }
  bool AllFinite() const;

  friend bool operator==(const StyleWeights&, const StyleWeights&) = default;

 private:
  std::vector<double> values_;
};

struct ParamSpec {
  std::string name;
  std::vector<int> shape;
  std::size_t offset = 0;
  std::size_t count = 0;
};

enum class StageKind { kEncoder, kDecoder };

struct StageLayout {
  StageKind kind = StageKind::kEncoder;
  int index = 0;
  int in_channels = 0;
  int out_channels = 0;
  int in_side = 0;
  int out_side = 0;
  bool normalized = false;  // scale/shift when true, bias otherwise
  int weight = -1;          // indices into ParameterLayout::arrays
  int scale = -1;
  int shift = -1;
  int bias = -1;
};

// Named parameter arrays in their fixed order, derived from a ModelConfig.
class ParameterLayout {
 public:
  explicit ParameterLayout(const ModelConfig& config);

  const std::vector<ParamSpec>& arrays() const { return arrays_; }
  const std::vector<StageLayout>& encoder() const { return encoder_; }
  const std::vector<StageLayout>& decoder() const { return decoder_; }
  std::size_t total() const { return total_; }

 private:
  int Add(std::string name, std::vector<int> shape);

  std::vector<ParamSpec> arrays_;
  std::vector<StageLayout> encoder_;
  std::vector<StageLayout> decoder_;
  std::size_t total_ = 0;
};

std::size_t ParameterCount(const ModelConfig& config);

// All learnable values in one flat buffer, addressed through the layout.
template <typename T>
class BasicParameters {
 public:
  BasicParameters() = default;
  explicit BasicParameters(const ModelConfig& config)
      : config_(config), layout_(std::make_shared<ParameterLayout>(config)),
        values_(layout_->total(), T{0}) {}

  const ModelConfig& config() const { return config_; }
  const ParameterLayout& layout() const { return *layout_; }
  std::span<T> values() { return values_; }
  std::span<const T> values() const { return values_; }
  std::span<T> array(int index) {
    const ParamSpec& s = layout_->arrays()[static_cast<std::size_t>(index)];
    return std::span<T>(values_).subspan(s.offset, s.count);
  }
  std::span<const T> array(int index) const {
    const ParamSpec& s = layout_->arrays()[static_cast<std::size_t>(index)];
    return std::span<const T>(values_).subspan(s.offset, s.count);
  }

  template <typename U>
  BasicParameters<U> Cast() const {
    BasicParameters<U> out(config_);
    for (std::size_t i = 0; i < values_.size(); ++i) out.values()[i] = static_cast<U>(values_[i]);
    return out;
  }

  friend bool operator==(const BasicParameters& a, const BasicParameters& b) {
    return a.config_ == b.config_ && a.values_ == b.values_;
  }

 private:
  ModelConfig config_;
  std::shared_ptr<const ParameterLayout> layout_;
  std::vector<T> values_;
};

using Parameters = BasicParameters<float>;

// Deterministic in config.seed: fan-in scaled normal kernels, unit norm
// scales, zero shifts and biases.
Parameters InitModel(const ModelConfig& config);

template <typename T>
struct EncodeResult {
  Tensor<T> bottleneck;
  std::vector<Tensor<T>> skips;  // depth-1 entries, outermost first
};

template <typename T>
EncodeResult<T> Encode(const BasicParameters<T>& params, const Tensor<T>& batch);

// Appends one constant plane per style weight. Single vector for the whole
// batch, or one vector per sample.
template <typename T>
Tensor<T> InjectStyle(const Tensor<T>& bottleneck, const StyleWeights& weights);
template <typename T>
Tensor<T> InjectStyle(const Tensor<T>& bottleneck, std::span<const StyleWeights> per_sample);

template <typename T>
Tensor<T> Decode(const BasicParameters<T>& params, const Tensor<T>& conditioned,
                 const std::vector<Tensor<T>>& skips);

template <typename T>
Tensor<T> Forward(const BasicParameters<T>& params, const Tensor<T>& batch,
                  const StyleWeights& weights);
template <typename T>
Tensor<T> Forward(const BasicParameters<T>& params, const Tensor<T>& batch,
                  std::span<const StyleWeights> per_sample);

// Mean absolute error of Forward(batch, weights) against targets. When
// gradient is non-null it receives d(loss)/d(params) in layout order.
template <typename T>
T LossAndGradient(const BasicParameters<T>& params, const Tensor<T>& batch,
                  std::span<const StyleWeights> per_sample, const Tensor<T>& targets,
                  std::vector<T>* gradient);

}  // namespace glyphforge
