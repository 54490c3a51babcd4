#pragma once

#include "tsgan/nn/tape.hpp"

namespace tsgan::nn::ops {

using Id = Tape::Id;

// elementwise
Id relu(Tape& t, Id x);
Id leaky_relu(Tape& t, Id x, double slope = 0.2);
Id sigmoid(Tape& t, Id x);
Id tanh_act(Tape& t, Id x);
Id softplus(Tape& t, Id x);
Id abs_act(Tape& t, Id x);
/// k*x + c, elementwise with scalar k and c.
Id affine(Tape& t, Id x, double k, double c);

// binary, same shape
Id add(Tape& t, Id a, Id b);
Id sub(Tape& t, Id a, Id b);
Id mul(Tape& t, Id a, Id b);

// broadcasting products used by the attention blocks
/// x {c,h,w} scaled per channel by s {c} (or {c,1,1}).
Id scale_channels(Tape& t, Id x, Id s);
/// x {c,h,w} multiplied by a single-channel map m {1,h,w} (or {h,w}).
Id mul_spatial(Tape& t, Id x, Id m);

// shape
Id reshape(Tape& t, Id x, std::vector<int> shape);
Id concat_channels(Tape& t, const std::vector<Id>& xs);
Id transpose2(Tape& t, Id x);  // {m,n} -> {n,m}

// linear algebra
Id matmul(Tape& t, Id a, Id b);        // {m,k} x {k,n} -> {m,n}
Id softmax_rows(Tape& t, Id x);        // row-stable softmax of {m,n}

// pooling / reductions
Id global_avg_pool(Tape& t, Id x);     // {c,h,w} -> {c}
Id sum_all(Tape& t, Id x);             // -> {1}
Id mean_all(Tape& t, Id x);            // -> {1}
/// sum_i w_i * x_i with a constant (non-differentiated) weight tensor.
Id dot_const(Tape& t, Id x, Tensor w);

}  // namespace tsgan::nn::ops
