#include "tsaae/model/layers.hpp"

#include <cmath>
#include <limits>

#include "tsaae/error.hpp"

namespace tsaae::model {

Linear Linear::create(ParameterStore& store, const std::string& prefix, std::size_t in, std::size_t out,
                      bool with_bias) {
  Linear l;
  l.weight = store.add(prefix + ".weight", {out, in}, diff::ParamKind::weight);
  if (with_bias) l.bias = store.add(prefix + ".bias", {out}, diff::ParamKind::bias);
  return l;
}

LayerNorm LayerNorm::create(ParameterStore& store, const std::string& prefix, std::size_t dim) {
  LayerNorm n;
  n.gain = store.add(prefix + ".gain", {dim}, diff::ParamKind::gain);
  n.bias = store.add(prefix + ".bias", {dim}, diff::ParamKind::bias);
  return n;
}

AttentionParams AttentionParams::create(ParameterStore& store, const std::string& prefix, std::size_t model_dim) {
  AttentionParams p;
  p.query = Linear::create(store, prefix + ".query", model_dim, model_dim);
  p.key = Linear::create(store, prefix + ".key", model_dim, model_dim, false);
  p.value = Linear::create(store, prefix + ".value", model_dim, model_dim);
  p.output = Linear::create(store, prefix + ".output", model_dim, model_dim);
  return p;
}

FeedForward FeedForward::create(ParameterStore& store, const std::string& prefix, std::size_t model_dim,
                                std::size_t ff_dim) {
  FeedForward f;
  f.hidden = Linear::create(store, prefix + ".hidden", model_dim, ff_dim);
  f.output = Linear::create(store, prefix + ".output", ff_dim, model_dim);
  return f;
}

Tensor positional_encoding(std::size_t length, std::size_t model_dim) {
  std::vector<double> w(length * model_dim);
  for (std::size_t t = 0; t < length; ++t) {
    for (std::size_t j = 0; j < model_dim; ++j) {
      const double exponent = static_cast<double>(j - j % 2) / static_cast<double>(model_dim);
      const double angle = static_cast<double>(t) / std::pow(10000.0, exponent);
      w[t * model_dim + j] = (j % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
  }
  return Tensor::matrix(length, model_dim, std::move(w));
}

Tensor causal_mask(std::size_t length) {
  const double ninf = -std::numeric_limits<double>::infinity();
  std::vector<double> m(length * length, 0.0);
  for (std::size_t t = 0; t < length; ++t)
    for (std::size_t u = t + 1; u < length; ++u) m[t * length + u] = ninf;
  return Tensor::matrix(length, length, std::move(m));
}

Tensor padding_mask(const std::vector<bool>& key_valid, std::size_t query_rows) {
  const double ninf = -std::numeric_limits<double>::infinity();
  const std::size_t keys = key_valid.size();
  std::vector<double> m(query_rows * keys, 0.0);
  for (std::size_t i = 0; i < query_rows; ++i)
    for (std::size_t j = 0; j < keys; ++j)
      if (!key_valid[j]) m[i * keys + j] = ninf;
  return Tensor::matrix(query_rows, keys, std::move(m));
}

Tensor combine_masks(const Tensor& a, const Tensor& b) {
  if (!a.defined()) return b;
  if (!b.defined()) return a;
  diff::NoGradGuard guard;
  return diff::add(a, b);
}

Tensor embed(const Tensor& x, const Linear& embedding) {
  if (x.cols() != embedding.weight.cols()) {
    throw ShapeError("embed: series has " + std::to_string(x.cols()) + " variables, model expects " +
                     std::to_string(embedding.weight.cols()));
  }
  return embedding(x);
}

Tensor multi_head_attention(const Tensor& q_in, const Tensor& k_in, const Tensor& v_in, const Tensor& mask,
                            const AttentionParams& params, std::size_t heads, std::vector<Tensor>* weights) {
  const std::size_t d = params.query.weight.rows();
  if (heads == 0 || d % heads != 0) {
    throw ConfigError("multi_head_attention: model dimension " + std::to_string(d) + " not divisible by " +
                      std::to_string(heads) + " heads");
  }
  if (k_in.rows() != v_in.rows()) throw ShapeError("multi_head_attention: key and value lengths differ");
  if (mask.defined() && (mask.rows() != q_in.rows() || mask.cols() != k_in.rows())) {
    throw ShapeError("multi_head_attention: mask " + diff::shape_string(mask.shape()) + " does not match " +
                     std::to_string(q_in.rows()) + " queries x " + std::to_string(k_in.rows()) + " keys");
  }
  const std::size_t dk = d / heads;
  const double norm = 1.0 / std::sqrt(static_cast<double>(dk));
  const Tensor q = params.query(q_in);
  const Tensor k = params.key(k_in);
  const Tensor v = params.value(v_in);

  std::vector<Tensor> outputs;
  outputs.reserve(heads);
  for (std::size_t h = 0; h < heads; ++h) {
    const Tensor qh = diff::slice_cols(q, h * dk, dk);
    const Tensor kh = diff::slice_cols(k, h * dk, dk);
    const Tensor vh = diff::slice_cols(v, h * dk, dk);
    Tensor scores = diff::scale(diff::matmul(qh, diff::transpose(kh)), norm);
    if (mask.defined()) scores = diff::add(scores, mask);
    const Tensor attn = diff::softmax_rows(scores);
    if (weights) weights->push_back(attn);
    outputs.push_back(diff::matmul(attn, vh));
  }
  return params.output(heads == 1 ? outputs.front() : diff::concat_cols(outputs));
}

EncoderLayer EncoderLayer::create(ParameterStore& store, const std::string& prefix, std::size_t model_dim,
                                  std::size_t ff_dim) {
  EncoderLayer l;
  l.self_attention = AttentionParams::create(store, prefix + ".self_attn", model_dim);
  l.norm1 = LayerNorm::create(store, prefix + ".norm1", model_dim);
  l.ff = FeedForward::create(store, prefix + ".ff", model_dim, ff_dim);
  l.norm2 = LayerNorm::create(store, prefix + ".norm2", model_dim);
  return l;
}

Tensor EncoderLayer::forward(const Tensor& x, const Tensor& mask, std::size_t heads, double dropout,
                             std::mt19937_64& rng, std::vector<Tensor>* weights) const {
  Tensor a = multi_head_attention(x, x, x, mask, self_attention, heads, weights);
  Tensor h = norm1(diff::add(x, diff::dropout(a, dropout, rng)));
  Tensor f = ff(h);
  return norm2(diff::add(h, diff::dropout(f, dropout, rng)));
}

DecoderLayer DecoderLayer::create(ParameterStore& store, const std::string& prefix, std::size_t model_dim,
                                  std::size_t ff_dim) {
  DecoderLayer l;
  l.self_attention = AttentionParams::create(store, prefix + ".self_attn", model_dim);
  l.norm1 = LayerNorm::create(store, prefix + ".norm1", model_dim);
  l.cross_attention = AttentionParams::create(store, prefix + ".cross_attn", model_dim);
  l.norm2 = LayerNorm::create(store, prefix + ".norm2", model_dim);
  l.ff = FeedForward::create(store, prefix + ".ff", model_dim, ff_dim);
  l.norm3 = LayerNorm::create(store, prefix + ".norm3", model_dim);
  return l;
}

Tensor DecoderLayer::forward(const Tensor& x, const Tensor& memory, const Tensor& self_mask, std::size_t heads,
                             double dropout, std::mt19937_64& rng) const {
  Tensor a = multi_head_attention(x, x, x, self_mask, self_attention, heads);
  Tensor h = norm1(diff::add(x, diff::dropout(a, dropout, rng)));
  Tensor c = multi_head_attention(h, memory, memory, Tensor(), cross_attention, heads);
  h = norm2(diff::add(h, diff::dropout(c, dropout, rng)));
  Tensor f = ff(h);
  return norm3(diff::add(h, diff::dropout(f, dropout, rng)));
}

}  // namespace tsaae::model
