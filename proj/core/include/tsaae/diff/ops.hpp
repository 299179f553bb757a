#pragma once

#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "tsaae/diff/tensor.hpp"

// Differentiable operations. All ops treat tensors through their matrix view
// (last axis = columns) unless stated otherwise.
namespace tsaae::diff {

enum class Activation { linear, tanh, sigmoid, relu };

Activation parse_activation(std::string_view name);
std::string_view activation_name(Activation fn);

/// a[m×n] · b[n×p].
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);
/// x · weightᵀ + bias, with weight stored as [out×in] and bias as [out] (may be undefined).
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, double factor);
Tensor add_scalar(const Tensor& x, double offset);
/// Adds a length-cols vector to every row.
Tensor add_row(const Tensor& x, const Tensor& row);

/// Row-wise softmax. -inf entries map to exactly 0; an all -inf row throws.
Tensor softmax_rows(const Tensor& x);
Tensor activate(const Tensor& x, Activation fn);
inline Tensor tanh(const Tensor& x) { return activate(x, Activation::tanh); }
inline Tensor sigmoid(const Tensor& x) { return activate(x, Activation::sigmoid); }
inline Tensor relu(const Tensor& x) { return activate(x, Activation::relu); }

inline constexpr double kLayerNormEpsilon = 1e-5;
/// Normalizes each row to zero mean / unit variance, then applies gain and bias.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps = kLayerNormEpsilon);

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);
Tensor square(const Tensor& x);
/// Square root; the derivative at 0 is taken as 0.
Tensor sqrt(const Tensor& x);
Tensor log(const Tensor& x);
/// Clamp into [lo, hi]; gradient is zero where clamping was active.
Tensor clamp(const Tensor& x, double lo, double hi);

Tensor reshape(const Tensor& x, Shape shape);
Tensor slice_cols(const Tensor& x, std::size_t first, std::size_t count);
Tensor slice_rows(const Tensor& x, std::size_t first, std::size_t count);
Tensor concat_cols(std::span<const Tensor> parts);
Tensor concat_rows(std::span<const Tensor> parts);

/// Stride-1 "same" 1-D convolution. x is [in_channels × length], weight is
/// [out_channels × (in_channels·kernel)], bias is [out_channels]. Left padding
/// is (kernel-1)/2, the remainder goes to the right.
Tensor conv1d(const Tensor& x, const Tensor& weight, const Tensor& bias, std::size_t kernel);
/// Adjoint of conv1d with the same padding; weight is [in_channels × (out_channels·kernel)].
Tensor conv_transpose1d(const Tensor& x, const Tensor& weight, const Tensor& bias, std::size_t kernel);

/// Inverted dropout. rate == 0 is the identity.
Tensor dropout(const Tensor& x, double rate, std::mt19937_64& rng);

}  // namespace tsaae::diff
