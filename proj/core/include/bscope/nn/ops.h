#pragma once

#include <span>
#include <vector>

#include "bscope/nn/tape.h"
#include "bscope/rng.h"

namespace bscope::nn {

// Shapes follow the row-vector convention: a batch/sequence of n vectors of
// width d is an n x d matrix.

Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
// a (n x d) + row (1 x d) broadcast over rows.
Var add_row(Var a, Var row);
Var mul(Var a, Var b);
// Row i of a (n x d) scaled by w(i), w is n x 1.
Var scale_rows(Var a, Var w);
Var scale(Var a, double s);
Var transpose(Var a);

Var tanh(Var a);
Var sigmoid(Var a);
// Exact (erf) GELU.
Var gelu(Var a);

Var slice_rows(Var a, Eigen::Index begin, Eigen::Index count);
Var slice_cols(Var a, Eigen::Index begin, Eigen::Index count);
Var concat_rows(std::span<const Var> parts);
Var concat_cols(std::span<const Var> parts);

// Softmax over an n x 1 column. Entries with mask[i] == false get weight 0
// and receive no gradient. An empty mask means all positions are live.
// Throws InvalidArgument when every position is masked.
Var masked_softmax(Var scores, std::span<const bool> mask = {});

// Row-wise softmax.
Var softmax_rows(Var a);

// Per-row normalization with learned gain/bias rows (1 x d).
Var layer_norm(Var a, Var gain, Var bias, double eps = 1e-5);

// Inverted dropout; identity when rate == 0 or rng is null.
Var dropout(Var a, double rate, Rng* rng);

// weight * -log softmax(logits)[target] for a 1 x C logits row.
Var cross_entropy(Var logits, int target, double weight);

// sum_k w(k) * mats[k] for an L x 1 weight column and L equal-shape inputs.
Var mix(Var weights, std::span<const Var> mats);

// Sum of all entries as 1 x 1.
Var sum(Var a);

// Row-vector softmax, no tape.
Eigen::RowVectorXd softmax(const Eigen::RowVectorXd& x);

}  // namespace bscope::nn
