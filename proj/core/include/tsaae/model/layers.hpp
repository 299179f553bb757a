#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tsaae/diff/ops.hpp"
#include "tsaae/diff/params.hpp"

// Transformer building blocks. Each block registers its parameters in a
// ParameterStore under a dotted prefix and keeps shared handles to them.
namespace tsaae::model {

using diff::ParameterStore;
using diff::Tensor;

struct Linear {
  Tensor weight;  // [out × in]
  Tensor bias;    // [out], undefined for a bias-free projection

  static Linear create(ParameterStore& store, const std::string& prefix, std::size_t in, std::size_t out,
                       bool with_bias = true);
  Tensor operator()(const Tensor& x) const {
    return bias.defined() ? diff::linear(x, weight, bias) : diff::matmul(x, diff::transpose(weight));
  }
};

struct LayerNorm {
  Tensor gain;
  Tensor bias;

  static LayerNorm create(ParameterStore& store, const std::string& prefix, std::size_t dim);
  Tensor operator()(const Tensor& x) const { return diff::layer_norm(x, gain, bias); }
};

struct AttentionParams {
  Linear query;
  Linear key;
  Linear value;
  Linear output;

  static AttentionParams create(ParameterStore& store, const std::string& prefix, std::size_t model_dim);
};

struct FeedForward {
  Linear hidden;
  Linear output;

  static FeedForward create(ParameterStore& store, const std::string& prefix, std::size_t model_dim,
                            std::size_t ff_dim);
  Tensor operator()(const Tensor& x) const { return output(diff::relu(hidden(x))); }
};

/// W_pos[t, 2i] = sin(t / 10000^(2i/d)), W_pos[t, 2i+1] = cos(t / 10000^(2i/d)).
Tensor positional_encoding(std::size_t length, std::size_t model_dim);

/// Additive mask: 0 where key t' <= query t, -inf for future keys.
Tensor causal_mask(std::size_t length);
/// Additive [query_rows × keys] mask with -inf in columns whose key is padding.
Tensor padding_mask(const std::vector<bool>& key_valid, std::size_t query_rows);
/// Element-wise sum of two additive masks; either may be undefined.
Tensor combine_masks(const Tensor& a, const Tensor& b);

/// u_t = W_e x_t + b_e for every time step; throws ShapeError when x has the wrong width.
Tensor embed(const Tensor& x, const Linear& embedding);

// Scaled dot-product attention per head over d/heads-wide slices of the
// projected queries, keys and values, followed by the output projection of the
// concatenated heads. `mask` (optional) is added to the scores before softmax.
// When `weights` is non-null it receives each head's attention matrix.
Tensor multi_head_attention(const Tensor& q_in, const Tensor& k_in, const Tensor& v_in, const Tensor& mask,
                            const AttentionParams& params, std::size_t heads,
                            std::vector<Tensor>* weights = nullptr);

// Post-norm blocks: x = LN(x + sublayer(x)).
struct EncoderLayer {
  AttentionParams self_attention;
  LayerNorm norm1;
  FeedForward ff;
  LayerNorm norm2;

  static EncoderLayer create(ParameterStore& store, const std::string& prefix, std::size_t model_dim,
                             std::size_t ff_dim);
  Tensor forward(const Tensor& x, const Tensor& mask, std::size_t heads, double dropout, std::mt19937_64& rng,
                 std::vector<Tensor>* weights = nullptr) const;
};

struct DecoderLayer {
  AttentionParams self_attention;
  LayerNorm norm1;
  AttentionParams cross_attention;
  LayerNorm norm2;
  FeedForward ff;
  LayerNorm norm3;

  static DecoderLayer create(ParameterStore& store, const std::string& prefix, std::size_t model_dim,
                             std::size_t ff_dim);
  Tensor forward(const Tensor& x, const Tensor& memory, const Tensor& self_mask, std::size_t heads, double dropout,
                 std::mt19937_64& rng) const;
};

}  // namespace tsaae::model
