#pragma once

#include <vector>

#include "bfr/tensor.hpp"

namespace bfr {

enum class Act { silu, gelu };
enum class Ewise { add, mul };

/// 2-D cross-correlation over NCHW input. `weight` is [C_out, C_in/groups, kH, kW],
/// `bias` (optional, pass undefined Tensor to skip) is [C_out]. Odd kernels only.
Tensor conv2d(const Tensor& input, const Tensor& weight, const Tensor& bias, int stride = 1,
              int padding = 0, int groups = 1);

/// Normalizes the channel vector at each (n, h, w) position of an NCHW tensor
/// to zero mean / unit variance. No learned affine; modulation is applied by
/// the caller.
Tensor layer_norm(const Tensor& input, double eps = 1e-5);

/// Batched contraction [..., M, K] x [..., K, P] -> [..., M, P]; leading
/// extents broadcast (numpy rules, missing dims count as 1).
Tensor matmul(const Tensor& a, const Tensor& b);

/// Max-subtracted softmax along `axis` (negative counts from the end).
Tensor softmax(const Tensor& input, int64_t axis);

Tensor activation(const Tensor& input, Act kind);
Tensor silu(const Tensor& input);
/// tanh approximation with the 0.044715 cubic term.
Tensor gelu(const Tensor& input);

/// Elementwise add/mul where `b` broadcasts unidirectionally into `a`'s shape
/// (b's shape, right-aligned, must match a's or be 1 per axis).
Tensor ewise(const Tensor& a, const Tensor& b, Ewise kind);
Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);

/// input * c (constant).
Tensor scale(const Tensor& input, double c);
/// input + c (constant).
Tensor add_scalar(const Tensor& input, double c);
/// 1 / input, elementwise.
Tensor reciprocal(const Tensor& input);

/// Sum / mean of all elements, as a [1]-shaped tensor.
Tensor sum(const Tensor& input);
Tensor mean(const Tensor& input);

Tensor reshape(const Tensor& input, const std::vector<int64_t>& shape);
Tensor permute(const Tensor& input, const std::vector<int64_t>& perm);
/// Swap the last two axes.
Tensor transpose_last(const Tensor& input);
Tensor concat(const std::vector<Tensor>& parts, int64_t axis);
/// Contiguous slice [start, start+length) along `axis`.
Tensor narrow(const Tensor& input, int64_t axis, int64_t start, int64_t length);
/// Nearest-neighbor 2x spatial upsampling of an NCHW tensor.
Tensor upsample_nearest2x(const Tensor& input);

/// Mean squared error between two same-shape tensors, as a scalar.
Tensor mse(const Tensor& a, const Tensor& b);

/// Sums `t` down to `target_shape` (inverse of broadcast); no recording.
Tensor reduce_to(const Tensor& t, const std::vector<int64_t>& target_shape);

/// Central-difference gradient verification. Evaluates f (a scalar-valued
/// function of `inputs`), runs backward, then perturbs every coordinate of
/// every input by ±h and compares. Returns the worst relative error, where
/// relative means |ad - fd| / max(1, |ad|, |fd|). Inputs must be f64 leaves
/// with requires_grad set.
double grad_check(const std::function<Tensor(const std::vector<Tensor>&)>& f,
                  std::vector<Tensor>& inputs, double h = 1e-5);

}  // namespace bfr
