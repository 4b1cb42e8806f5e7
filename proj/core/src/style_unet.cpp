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

#include "glyphforge/style_unet.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <random>

#include "glyphforge/error.hpp"

namespace glyphforge {
namespace {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMat<T>>;

constexpr int kTaps = 16;  // 4x4 kernel

std::string ShapeString(const std::array<int, 4>& s) {
  return std::to_string(s[0]) + "x" + std::to_string(s[1]) + "x" + std::to_string(s[2]) + "x" +
         std::to_string(s[3]);
}

[[noreturn]] void ShapeError(const std::string& what, const std::array<int, 4>& got,
                             const std::array<int, 4>& want) {
  throw Error(ErrorCode::kShapeMismatch,
              what + ": got " + ShapeString(got) + ", expected " + ShapeString(want));
}

// col[(c*16 + ky*4 + kx), n*P + oy*Wo + ox] = img[n, c, 2*oy-1+ky, 2*ox-1+kx]
// for a 4x4 stride-2 window with one pixel of zero padding.
template <typename T>
void Im2Col(const Tensor<T>& img, std::vector<T>& col) {
  const int n_count = img.n(), channels = img.c(), h = img.h(), w = img.w();
  const int ho = h / 2, wo = w / 2;
  const std::size_t p = static_cast<std::size_t>(ho) * wo;
  const std::size_t np = p * n_count;
  col.assign(static_cast<std::size_t>(channels) * kTaps * np, T{0});
  for (int c = 0; c < channels; ++c) {
    for (int ky = 0; ky < 4; ++ky) {
      for (int kx = 0; kx < 4; ++kx) {
        T* row = col.data() + (static_cast<std::size_t>(c) * kTaps + ky * 4 + kx) * np;
        for (int n = 0; n < n_count; ++n) {
          const T* src = img.plane(n, c);
          T* dst = row + static_cast<std::size_t>(n) * p;
          for (int oy = 0; oy < ho; ++oy) {
            const int iy = 2 * oy - 1 + ky;
            if (iy < 0 || iy >= h) continue;
            const T* src_row = src + static_cast<std::size_t>(iy) * w;
            T* dst_row = dst + static_cast<std::size_t>(oy) * wo;
            for (int ox = 0; ox < wo; ++ox) {
              const int ix = 2 * ox - 1 + kx;
              if (ix >= 0 && ix < w) dst_row[ox] = src_row[ix];
            }
          }
        }
      }
    }
  }
}

// Adjoint of Im2Col: scatters-adds columns back into img (already shaped).
template <typename T>
void Col2Im(const T* col, Tensor<T>& img) {
  const int n_count = img.n(), channels = img.c(), h = img.h(), w = img.w();
  const int ho = h / 2, wo = w / 2;
  const std::size_t p = static_cast<std::size_t>(ho) * wo;
  const std::size_t np = p * n_count;
  for (int c = 0; c < channels; ++c) {
    for (int ky = 0; ky < 4; ++ky) {
      for (int kx = 0; kx < 4; ++kx) {
        const T* row = col + (static_cast<std::size_t>(c) * kTaps + ky * 4 + kx) * np;
        for (int n = 0; n < n_count; ++n) {
          T* dst = img.plane(n, c);
          const T* src = row + static_cast<std::size_t>(n) * p;
          for (int oy = 0; oy < ho; ++oy) {
            const int iy = 2 * oy - 1 + ky;
            if (iy < 0 || iy >= h) continue;
            T* dst_row = dst + static_cast<std::size_t>(iy) * w;
            const T* src_row = src + static_cast<std::size_t>(oy) * wo;
            for (int ox = 0; ox < wo; ++ox) {
              const int ix = 2 * ox - 1 + kx;
              if (ix >= 0 && ix < w) dst_row[ix] += src_row[ox];
            }
          }
        }
      }
    }
  }
}

// NCHW -> (C x N*H*W), channel-major.
template <typename T>
void ToChannelMajor(const Tensor<T>& t, std::vector<T>& out) {
  const std::size_t p = t.plane_size();
  const std::size_t np = p * t.n();
  out.resize(static_cast<std::size_t>(t.c()) * np);
  for (int n = 0; n < t.n(); ++n) {
    for (int c = 0; c < t.c(); ++c) {
      std::copy_n(t.plane(n, c), p, out.data() + static_cast<std::size_t>(c) * np + n * p);
    }
  }
}

template <typename T>
void FromChannelMajor(const T* in, Tensor<T>& t) {
  const std::size_t p = t.plane_size();
  const std::size_t np = p * t.n();
  for (int n = 0; n < t.n(); ++n) {
    for (int c = 0; c < t.c(); ++c) {
      std::copy_n(in + static_cast<std::size_t>(c) * np + n * p, p, t.plane(n, c));
    }
  }
}

template <typename T>
Tensor<T> ConcatChannels(const Tensor<T>& a, const Tensor<T>& b) {
  Tensor<T> out(a.n(), a.c() + b.c(), a.h(), a.w());
  const std::size_t p = a.plane_size();
  for (int n = 0; n < a.n(); ++n) {
    std::copy_n(a.plane(n, 0), p * a.c(), out.plane(n, 0));
    std::copy_n(b.plane(n, 0), p * b.c(), out.plane(n, a.c()));
  }
  return out;
}

// Splits the gradient of a channel concatenation; the tail is added into
// tail_grad when non-null.
template <typename T>
Tensor<T> SplitHeadGradient(const Tensor<T>& grad, int head_channels, Tensor<T>* tail_grad) {
  Tensor<T> head(grad.n(), head_channels, grad.h(), grad.w());
  const std::size_t p = grad.plane_size();
  for (int n = 0; n < grad.n(); ++n) {
    std::copy_n(grad.plane(n, 0), p * head_channels, head.plane(n, 0));
    if (tail_grad) {
      const T* src = grad.plane(n, head_channels);
      T* dst = tail_grad->plane(n, 0);
      for (std::size_t i = 0; i < p * tail_grad->c(); ++i) dst[i] += src[i];
    }
  }
  return head;
}

template <typename T>
T Sigmoid(T x) {
  return x >= T{0} ? T{1} / (T{1} + std::exp(-x)) : std::exp(x) / (T{1} + std::exp(x));
}

template <typename T>
struct StageTrace {
  Tensor<T> input;
  std::vector<T> col;     // encoder: im2col(input)
  std::vector<T> in_mat;  // decoder: channel-major input
  Tensor<T> xhat;         // normalized stages
  std::vector<T> inv_std;
  Tensor<T> pre;          // pre-activation
  Tensor<T> out;
};

template <typename T>
Tensor<T> RunStage(const BasicParameters<T>& params, const StageLayout& st, const Tensor<T>& input,
                   StageTrace<T>* trace) {
  const ModelConfig& cfg = params.config();
  const int n_count = input.n();
  const auto weight = params.array(st.weight);
  Tensor<T> z(n_count, st.out_channels, st.out_side, st.out_side);
  std::vector<T> local_col, local_in;
  std::vector<T>& col = trace ? trace->col : local_col;
  std::vector<T>& in_mat = trace ? trace->in_mat : local_in;

  if (st.kind == StageKind::kEncoder) {
    Im2Col(input, col);
    const Eigen::Index np = static_cast<Eigen::Index>(z.plane_size()) * n_count;
    RowMat<T> y = ConstMatMap<T>(weight.data(), st.out_channels, st.in_channels * kTaps) *
                  ConstMatMap<T>(col.data(), st.in_channels * kTaps, np);
    FromChannelMajor(y.data(), z);
  } else {
    ToChannelMajor(input, in_mat);
    const Eigen::Index np = static_cast<Eigen::Index>(input.plane_size()) * n_count;
    RowMat<T> c = ConstMatMap<T>(weight.data(), st.in_channels, st.out_channels * kTaps).transpose() *
                  ConstMatMap<T>(in_mat.data(), st.in_channels, np);
    Col2Im(c.data(), z);
  }

  const std::size_t p = z.plane_size();
  if (st.normalized) {
    const auto scale = params.array(st.scale);
    const auto shift = params.array(st.shift);
    Tensor<T> xhat(z.n(), z.c(), z.h(), z.w());
    std::vector<T> inv_std(static_cast<std::size_t>(z.n()) * z.c());
    for (int n = 0; n < z.n(); ++n) {
      for (int c = 0; c < z.c(); ++c) {
        T* zp = z.plane(n, c);
        double mean = 0.0;
        for (std::size_t i = 0; i < p; ++i) mean += zp[i];
        mean /= static_cast<double>(p);
        double var = 0.0;
        for (std::size_t i = 0; i < p; ++i) var += (zp[i] - mean) * (zp[i] - mean);
        var /= static_cast<double>(p);
        const T is = static_cast<T>(1.0 / std::sqrt(var + cfg.norm_epsilon));
        inv_std[static_cast<std::size_t>(n) * z.c() + c] = is;
        T* xp = xhat.plane(n, c);
        const T m = static_cast<T>(mean);
        for (std::size_t i = 0; i < p; ++i) {
          xp[i] = (zp[i] - m) * is;
          zp[i] = scale[c] * xp[i] + shift[c];
        }
      }
    }
    if (trace) {
      trace->xhat = std::move(xhat);
      trace->inv_std = std::move(inv_std);
    }
  } else {
    const auto bias = params.array(st.bias);
    for (int n = 0; n < z.n(); ++n) {
      for (int c = 0; c < z.c(); ++c) {
        T* zp = z.plane(n, c);
        for (std::size_t i = 0; i < p; ++i) zp[i] += bias[c];
      }
    }
  }

  Tensor<T> out = z;
  const bool final_stage = st.kind == StageKind::kDecoder && st.index == cfg.depth - 1;
  const T slope = st.kind == StageKind::kEncoder ? static_cast<T>(cfg.leaky_slope) : T{0};
  for (T& v : out.values()) {
    if (final_stage) {
      v = Sigmoid(v);
    } else if (v < T{0}) {
      v *= slope;
    }
  }
  if (trace) {
    trace->input = input;
    trace->pre = std::move(z);
    trace->out = out;
  }
  return out;
}

// Returns the gradient w.r.t. the stage input when want_input is set.
template <typename T>
Tensor<T> BackStage(const BasicParameters<T>& params, const StageLayout& st,
                    const StageTrace<T>& trace, const Tensor<T>& grad_out, std::vector<T>& grad,
                    bool want_input) {
  const ModelConfig& cfg = params.config();
  const bool final_stage = st.kind == StageKind::kDecoder && st.index == cfg.depth - 1;
  const T slope = st.kind == StageKind::kEncoder ? static_cast<T>(cfg.leaky_slope) : T{0};
  const ParameterLayout& layout = params.layout();
  auto grad_array = [&](int index) {
    const ParamSpec& s = layout.arrays()[static_cast<std::size_t>(index)];
    return std::span<T>(grad).subspan(s.offset, s.count);
  };

  Tensor<T> dz = grad_out;
  for (std::size_t i = 0; i < dz.size(); ++i) {
    if (final_stage) {
      const T s = trace.out.data()[i];
      dz.data()[i] *= s * (T{1} - s);
    } else if (trace.pre.data()[i] < T{0}) {
      dz.data()[i] *= slope;
    }
  }

  const std::size_t p = dz.plane_size();
  if (st.normalized) {
    const auto scale = params.array(st.scale);
    auto dscale = grad_array(st.scale);
    auto dshift = grad_array(st.shift);
    for (int n = 0; n < dz.n(); ++n) {
      for (int c = 0; c < dz.c(); ++c) {
        T* dp = dz.plane(n, c);
        const T* xp = trace.xhat.plane(n, c);
        double sum_d = 0.0, sum_dx = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
          sum_d += dp[i];
          sum_dx += static_cast<double>(dp[i]) * xp[i];
        }
        dscale[c] += static_cast<T>(sum_dx);
        dshift[c] += static_cast<T>(sum_d);
        const T g = scale[c];
        const T is = trace.inv_std[static_cast<std::size_t>(n) * dz.c() + c];
        const T mean_dxhat = static_cast<T>(sum_d / static_cast<double>(p)) * g;
        const T mean_dxhat_xhat = static_cast<T>(sum_dx / static_cast<double>(p)) * g;
        for (std::size_t i = 0; i < p; ++i) {
          dp[i] = is * (dp[i] * g - mean_dxhat - xp[i] * mean_dxhat_xhat);
        }
      }
    }
  } else {
    auto dbias = grad_array(st.bias);
    for (int n = 0; n < dz.n(); ++n) {
      for (int c = 0; c < dz.c(); ++c) {
        const T* dp = dz.plane(n, c);
        double sum = 0.0;
        for (std::size_t i = 0; i < p; ++i) sum += dp[i];
        dbias[c] += static_cast<T>(sum);
      }
    }
  }

  const auto weight = params.array(st.weight);
  auto dweight = grad_array(st.weight);
  const int n_count = dz.n();
  Tensor<T> dinput;
  if (st.kind == StageKind::kEncoder) {
    std::vector<T> dy;
    ToChannelMajor(dz, dy);
    const Eigen::Index np = static_cast<Eigen::Index>(p) * n_count;
    const Eigen::Index rows = st.in_channels * kTaps;
    ConstMatMap<T> dy_mat(dy.data(), st.out_channels, np);
    MatMap<T>(dweight.data(), st.out_channels, rows).noalias() +=
        dy_mat * ConstMatMap<T>(trace.col.data(), rows, np).transpose();
    if (want_input) {
      RowMat<T> dcol = ConstMatMap<T>(weight.data(), st.out_channels, rows).transpose() * dy_mat;
      dinput = Tensor<T>(trace.input.n(), trace.input.c(), trace.input.h(), trace.input.w());
      Col2Im(dcol.data(), dinput);
    }
  } else {
    std::vector<T> dcol;
    Im2Col(dz, dcol);
    const Eigen::Index np = static_cast<Eigen::Index>(trace.input.plane_size()) * n_count;
    const Eigen::Index cols = st.out_channels * kTaps;
    ConstMatMap<T> dcol_mat(dcol.data(), cols, np);
    MatMap<T>(dweight.data(), st.in_channels, cols).noalias() +=
        ConstMatMap<T>(trace.in_mat.data(), st.in_channels, np) * dcol_mat.transpose();
    if (want_input) {
      RowMat<T> dx = ConstMatMap<T>(weight.data(), st.in_channels, cols) * dcol_mat;
      dinput = Tensor<T>(trace.input.n(), trace.input.c(), trace.input.h(), trace.input.w());
      FromChannelMajor(dx.data(), dinput);
    }
  }
  return dinput;
}

void CheckBatch(const ModelConfig& cfg, const std::array<int, 4>& shape) {
  const std::array<int, 4> want{shape[0], 1, cfg.input_size, cfg.input_size};
  if (shape[0] < 1 || shape != want) ShapeError("input batch", shape, want);
}

template <typename T>
void CheckConditioning(const BasicParameters<T>& params, const Tensor<T>& conditioned,
                       const std::vector<Tensor<T>>& skips) {
  const ModelConfig& cfg = params.config();
  const int n = conditioned.n();
  const int s = cfg.BottleneckSide();
  const std::array<int, 4> want{n, cfg.BottleneckChannels() + cfg.style_count, s, s};
  if (n < 1 || conditioned.shape() != want) ShapeError("conditioned bottleneck", conditioned.shape(), want);
  if (static_cast<int>(skips.size()) != cfg.depth - 1) {
    throw Error(ErrorCode::kShapeMismatch, "expected " + std::to_string(cfg.depth - 1) +
                                               " skip tensors, got " + std::to_string(skips.size()));
  }
  for (int i = 0; i + 1 < cfg.depth; ++i) {
    const int side = cfg.input_size >> (i + 1);
    const std::array<int, 4> skip_want{n, cfg.StageChannels(i), side, side};
    if (skips[static_cast<std::size_t>(i)].shape() != skip_want) {
      ShapeError("skip " + std::to_string(i), skips[static_cast<std::size_t>(i)].shape(), skip_want);
    }
  }
}

template <typename T>
Tensor<T> DecodeImpl(const BasicParameters<T>& params, const Tensor<T>& conditioned,
                     const std::vector<Tensor<T>>& skips, std::vector<StageTrace<T>>* traces) {
  const ModelConfig& cfg = params.config();
  const auto& dec = params.layout().decoder();
  Tensor<T> x = conditioned;
  for (int j = 0; j < cfg.depth; ++j) {
    if (j > 0) x = ConcatChannels(x, skips[static_cast<std::size_t>(cfg.depth - 1 - j)]);
    x = RunStage(params, dec[static_cast<std::size_t>(j)], x,
                 traces ? &(*traces)[static_cast<std::size_t>(j)] : nullptr);
  }
  return x;
}

template <typename T>
EncodeResult<T> EncodeImpl(const BasicParameters<T>& params, const Tensor<T>& batch,
                           std::vector<StageTrace<T>>* traces) {
  const ModelConfig& cfg = params.config();
  CheckBatch(cfg, batch.shape());
  const auto& enc = params.layout().encoder();
  EncodeResult<T> result;
  Tensor<T> x = batch;
  for (int i = 0; i < cfg.depth; ++i) {
    x = RunStage(params, enc[static_cast<std::size_t>(i)], x,
                 traces ? &(*traces)[static_cast<std::size_t>(i)] : nullptr);
    if (i + 1 < cfg.depth) result.skips.push_back(x);
  }
  result.bottleneck = std::move(x);
  return result;
}

void CheckStyleLength(const ModelConfig& cfg, const StyleWeights& w) {
  if (w.size() != cfg.style_count) {
    throw Error(ErrorCode::kStyleDimMismatch, "style vector has length " + std::to_string(w.size()) +
                                                  ", model expects K=" +
                                                  std::to_string(cfg.style_count));
  }
}

// Box-Muller over raw 64-bit engine output; portable across standard libraries.
double StandardNormal(std::mt19937_64& rng) {
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * kScale;
  const double u2 = static_cast<double>(rng() >> 11) * kScale;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

}  // namespace

void ModelConfig::Validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfigInvalid, what); };
  if (input_size < 2 || (input_size & (input_size - 1)) != 0) fail("input_size must be a power of two");
  if (depth < 2) fail("depth must be >= 2");
  if (depth >= 31 || (input_size >> depth) < 1 || (input_size % (1 << depth)) != 0) {
    fail("input_size / 2^depth must be >= 1 (input_size=" + std::to_string(input_size) +
         ", depth=" + std::to_string(depth) + ")");
  }
  if (base_channels < 1) fail("base_channels must be >= 1");
  if (channel_cap < 1) fail("channel_cap must be >= 1");
  if (style_count < 1) fail("style_count K must be >= 1");
  if (kernel_size != 4) fail("kernel_size must be 4");
  if (!(leaky_slope >= 0.0 && leaky_slope < 1.0)) fail("leaky_slope must be in [0,1)");
  if (!(norm_epsilon > 0.0)) fail("norm_epsilon must be positive");
}

int ModelConfig::StageChannels(int stage) const {
  long long c = base_channels;
  for (int i = 0; i < stage && c < channel_cap; ++i) c *= 2;
  return static_cast<int>(std::min<long long>(c, channel_cap));
}

bool StyleWeights::AllFinite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ParameterLayout::ParameterLayout(const ModelConfig& config) {
  config.Validate();
  const int d = config.depth;
  int side = config.input_size;
  int in_channels = 1;
  for (int i = 0; i < d; ++i) {
    StageLayout st;
    st.kind = StageKind::kEncoder;
    st.index = i;
    st.in_channels = in_channels;
    st.out_channels = config.StageChannels(i);
    st.in_side = side;
    st.out_side = side / 2;
    st.normalized = i + 1 < d;
    const std::string prefix = "enc" + std::to_string(i) + ".";
    st.weight = Add(prefix + "weight", {st.out_channels, st.in_channels, 4, 4});
    if (st.normalized) {
      st.scale = Add(prefix + "norm_scale", {st.out_channels});
      st.shift = Add(prefix + "norm_shift", {st.out_channels});
    } else {
      st.bias = Add(prefix + "bias", {st.out_channels});
    }
    encoder_.push_back(st);
    in_channels = st.out_channels;
    side /= 2;
  }
  for (int j = 0; j < d; ++j) {
    StageLayout st;
    st.kind = StageKind::kDecoder;
    st.index = j;
    st.in_channels = j == 0 ? config.BottleneckChannels() + config.style_count
                            : 2 * config.StageChannels(d - 1 - j);
    st.out_channels = j + 1 < d ? config.StageChannels(d - 2 - j) : 1;
    st.in_side = side;
    st.out_side = side * 2;
    st.normalized = j + 1 < d;
    const std::string prefix = "dec" + std::to_string(j) + ".";
    st.weight = Add(prefix + "weight", {st.in_channels, st.out_channels, 4, 4});
    if (st.normalized) {
      st.scale = Add(prefix + "norm_scale", {st.out_channels});
      st.shift = Add(prefix + "norm_shift", {st.out_channels});
    } else {
      st.bias = Add(prefix + "bias", {st.out_channels});
    }
    decoder_.push_back(st);
    side *= 2;
  }
}

int ParameterLayout::Add(std::string name, std::vector<int> shape) {
  ParamSpec spec;
  spec.name = std::move(name);
  spec.count = 1;
  for (int v : shape) spec.count *= static_cast<std::size_t>(v);
  spec.shape = std::move(shape);
  spec.offset = total_;
  total_ += spec.count;
  arrays_.push_back(std::move(spec));
  return static_cast<int>(arrays_.size()) - 1;
}

std::size_t ParameterCount(const ModelConfig& config) { return ParameterLayout(config).total(); }

Parameters InitModel(const ModelConfig& config) {
  Parameters params(config);
  std::mt19937_64 rng(config.seed);
  const ParameterLayout& layout = params.layout();
  auto init_stage = [&](const StageLayout& st) {
    // Effective fan-in: a transposed 4x4 stride-2 kernel feeds each output
    // from a quarter of its taps.
    const double fan_in = st.kind == StageKind::kEncoder ? st.in_channels * 16.0
                                                         : st.in_channels * 4.0;
    const double gain = st.kind == StageKind::kDecoder && st.index + 1 == config.depth ? 1.0 : 2.0;
    const double stddev = std::sqrt(gain / fan_in);
    for (float& v : params.array(st.weight)) v = static_cast<float>(stddev * StandardNormal(rng));
    if (st.normalized) {
      for (float& v : params.array(st.scale)) v = 1.0f;
    }
  };
  for (const StageLayout& st : layout.encoder()) init_stage(st);
  for (const StageLayout& st : layout.decoder()) init_stage(st);
  return params;
}

template <typename T>
EncodeResult<T> Encode(const BasicParameters<T>& params, const Tensor<T>& batch) {
  return EncodeImpl<T>(params, batch, nullptr);
}

template <typename T>
Tensor<T> InjectStyle(const Tensor<T>& bottleneck, const StyleWeights& weights) {
  const std::vector<StyleWeights> per_sample(static_cast<std::size_t>(bottleneck.n()), weights);
  return InjectStyle<T>(bottleneck, std::span<const StyleWeights>(per_sample));
}

template <typename T>
Tensor<T> InjectStyle(const Tensor<T>& bottleneck, std::span<const StyleWeights> per_sample) {
  if (static_cast<int>(per_sample.size()) != bottleneck.n()) {
    throw Error(ErrorCode::kShapeMismatch, "one style vector per sample is required");
  }
  const int k = per_sample.empty() ? 0 : per_sample[0].size();
  for (const StyleWeights& w : per_sample) {
    if (w.size() != k) throw Error(ErrorCode::kStyleDimMismatch, "style vectors differ in length");
    if (!w.AllFinite()) throw Error(ErrorCode::kStyleDimMismatch, "style weights must be finite");
  }
  Tensor<T> out(bottleneck.n(), bottleneck.c() + k, bottleneck.h(), bottleneck.w());
  const std::size_t p = bottleneck.plane_size();
  for (int n = 0; n < bottleneck.n(); ++n) {
    std::copy_n(bottleneck.plane(n, 0), p * bottleneck.c(), out.plane(n, 0));
    for (int s = 0; s < k; ++s) {
      std::fill_n(out.plane(n, bottleneck.c() + s), p,
                  static_cast<T>(per_sample[static_cast<std::size_t>(n)][s]));
    }
  }
  return out;
}

template <typename T>
Tensor<T> Decode(const BasicParameters<T>& params, const Tensor<T>& conditioned,
                 const std::vector<Tensor<T>>& skips) {
  CheckConditioning(params, conditioned, skips);
  return DecodeImpl<T>(params, conditioned, skips, nullptr);
}

template <typename T>
Tensor<T> Forward(const BasicParameters<T>& params, const Tensor<T>& batch,
                  const StyleWeights& weights) {
  CheckStyleLength(params.config(), weights);
  const std::vector<StyleWeights> per_sample(static_cast<std::size_t>(std::max(0, batch.n())), weights);
  return Forward<T>(params, batch, std::span<const StyleWeights>(per_sample));
}

template <typename T>
Tensor<T> Forward(const BasicParameters<T>& params, const Tensor<T>& batch,
                  std::span<const StyleWeights> per_sample) {
  for (const StyleWeights& w : per_sample) CheckStyleLength(params.config(), w);
  EncodeResult<T> enc = Encode(params, batch);
  return Decode(params, InjectStyle<T>(enc.bottleneck, per_sample), enc.skips);
}

template <typename T>
T LossAndGradient(const BasicParameters<T>& params, const Tensor<T>& batch,
                  std::span<const StyleWeights> per_sample, const Tensor<T>& targets,
                  std::vector<T>* gradient) {
  const ModelConfig& cfg = params.config();
  for (const StyleWeights& w : per_sample) CheckStyleLength(cfg, w);
  CheckBatch(cfg, batch.shape());
  if (targets.shape() != batch.shape()) ShapeError("targets", targets.shape(), batch.shape());

  std::vector<StageTrace<T>> enc_traces(static_cast<std::size_t>(cfg.depth));
  std::vector<StageTrace<T>> dec_traces(static_cast<std::size_t>(cfg.depth));
  const bool want_grad = gradient != nullptr;
  EncodeResult<T> enc = EncodeImpl<T>(params, batch, want_grad ? &enc_traces : nullptr);
  const Tensor<T> conditioned = InjectStyle<T>(enc.bottleneck, per_sample);
  const Tensor<T> out = DecodeImpl<T>(params, conditioned, enc.skips, want_grad ? &dec_traces : nullptr);

  const double inv_count = 1.0 / static_cast<double>(out.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) loss += std::abs(static_cast<double>(out.data()[i]) - targets.data()[i]);
  loss *= inv_count;
  if (!want_grad) return static_cast<T>(loss);

  gradient->assign(params.values().size(), T{0});
  Tensor<T> g(out.n(), out.c(), out.h(), out.w());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const T diff = out.data()[i] - targets.data()[i];
    g.data()[i] = diff > T{0} ? static_cast<T>(inv_count) : (diff < T{0} ? static_cast<T>(-inv_count) : T{0});
  }

  const auto& dec = params.layout().decoder();
  const auto& enc_layout = params.layout().encoder();
  std::vector<Tensor<T>> enc_grads(static_cast<std::size_t>(cfg.depth));
  for (int i = 0; i < cfg.depth; ++i) {
    const Tensor<T>& o = enc_traces[static_cast<std::size_t>(i)].out;
    enc_grads[static_cast<std::size_t>(i)] = Tensor<T>(o.n(), o.c(), o.h(), o.w());
  }
  for (int j = cfg.depth - 1; j >= 0; --j) {
    const StageLayout& st = dec[static_cast<std::size_t>(j)];
    Tensor<T> dinput = BackStage(params, st, dec_traces[static_cast<std::size_t>(j)], g, *gradient, true);
    if (j > 0) {
      const int head = dec[static_cast<std::size_t>(j - 1)].out_channels;
      g = SplitHeadGradient(dinput, head, &enc_grads[static_cast<std::size_t>(cfg.depth - 1 - j)]);
    } else {
      // Style planes are inputs, not parameters; their gradient is dropped.
      Tensor<T> dbottleneck = SplitHeadGradient<T>(dinput, cfg.BottleneckChannels(), nullptr);
      Tensor<T>& acc = enc_grads[static_cast<std::size_t>(cfg.depth - 1)];
      for (std::size_t i = 0; i < acc.size(); ++i) acc.data()[i] += dbottleneck.data()[i];
    }
  }
  for (int i = cfg.depth - 1; i >= 0; --i) {
    Tensor<T> dinput = BackStage(params, enc_layout[static_cast<std::size_t>(i)],
                                 enc_traces[static_cast<std::size_t>(i)],
                                 enc_grads[static_cast<std::size_t>(i)], *gradient, i > 0);
    if (i > 0) {
      Tensor<T>& acc = enc_grads[static_cast<std::size_t>(i - 1)];
      for (std::size_t k = 0; k < acc.size(); ++k) acc.data()[k] += dinput.data()[k];
    }
  }
  return static_cast<T>(loss);
}

#define GLYPHFORGE_INSTANTIATE(T)                                                              \
  template EncodeResult<T> Encode<T>(const BasicParameters<T>&, const Tensor<T>&);            \
  template Tensor<T> InjectStyle<T>(const Tensor<T>&, const StyleWeights&);                   \
  template Tensor<T> InjectStyle<T>(const Tensor<T>&, std::span<const StyleWeights>);         \
  template Tensor<T> Decode<T>(const BasicParameters<T>&, const Tensor<T>&,                   \
                               const std::vector<Tensor<T>>&);                                \
  template Tensor<T> Forward<T>(const BasicParameters<T>&, const Tensor<T>&,                  \
                                const StyleWeights&);                                         \
  template Tensor<T> Forward<T>(const BasicParameters<T>&, const Tensor<T>&,                  \
                                std::span<const StyleWeights>);                               \
  template T LossAndGradient<T>(const BasicParameters<T>&, const Tensor<T>&,                  \
                                std::span<const StyleWeights>, const Tensor<T>&, std::vector<T>*);

GLYPHFORGE_INSTANTIATE(float)
GLYPHFORGE_INSTANTIATE(double)

#undef GLYPHFORGE_INSTANTIATE

}  // namespace glyphforge
