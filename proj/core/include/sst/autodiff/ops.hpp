#pragma once

#include <span>
#include <vector>

#include "sst/autodiff/graph.hpp"

// Differentiable primitives. All operands are matrices (see Tensor); inputs
// must live on the same graph. Shape errors name the offending op.
namespace sst::ad {

Var matmul(Var a, Var b);        // [n,k] x [k,m]
Var matmul_nt(Var a, Var b);     // [n,k] x [m,k]^T
Var add(Var a, Var b);           // same shape
Var sub(Var a, Var b);
Var mul(Var a, Var b);           // elementwise
Var add_row(Var a, Var row);     // [n,m] + [1,m] on every row (bias)
Var mul_col(Var col, Var a);     // [n,1] * [n,m], column broadcast product
Var repeat_rows(Var row, std::size_t n);  // [1,m] -> [n,m]
Var scale(Var a, double factor);
Var add_constant(Var a, const Tensor& c);  // c is not differentiated
Var relu(Var a);
Var gelu(Var a);                 // exact erf form
Var exp(Var a);
Var log_sigmoid(Var a);
Var softmax_rows(Var a);
Var log_softmax_rows(Var a);
Var layer_norm(Var x, Var gain, Var bias, double eps = 1e-5);
Var embedding(Var table, std::span<const int> ids);  // rows of table
Var concat_cols(std::span<const Var> parts);
Var slice_cols(Var a, std::size_t start, std::size_t count);
Var concat_rows(std::span<const Var> parts);
Var slice_rows(Var a, std::size_t start, std::size_t count);
Var gather_rows(Var a, std::span<const int> rows);  // [n,m] -> [k,m]
Var mean_rows(Var a);            // [n,m] -> [1,m]
Var sum_cols(Var a);             // [n,m] -> [n,1]
Var sum(Var a);                  // -> [1,1]
Var mean(Var a);
Var pick(Var a, std::span<const int> cols);        // [n,m] -> [n,1], a[i, cols[i]]
Var gather_cols(Var a, std::span<const int> cols); // [n,m] -> [n,k]
Var row_min(Var a);              // [n,m] -> [n,1]; gradient to the first minimum

// Scaled dot-product attention for one head. `mask` (optional, additive) has
// shape [nq, nk].
Var attention(Var q, Var k, Var v, const Tensor* mask = nullptr);

// Sum over rows of -log softmax(logits)[i, targets[i]] * weights[i]
// (weights default to 1).
Var cross_entropy(Var logits, std::span<const int> targets,
                  std::span<const double> weights = {});
// Mean over elements of the numerically stable binary cross-entropy with
// logits; targets are probabilities in [0,1].
Var bce_with_logits(Var logits, const Tensor& targets);
// Mean squared error against a constant target.
Var mse(Var prediction, const Tensor& target);

}  // namespace sst::ad
