#pragma once

#include <initializer_list>
#include <unordered_map>
#include <vector>

#include "wavenode/tensor.hpp"

namespace wavenode {

enum class Op : unsigned char {
    Leaf,
    Constant,
    Add,
    Sub,
    Mul,
    Affine,
    Lincomb,
    Tanh,
    Sigmoid,
    Exp,
    Log,
    LogAbs,
    Recip,
    Clamp,
    MulChannel,
    BcastChannel,
    BcastBatch,
    BcastAll,
    SumAll,
    SumBL,
    SumCL,
    Conv1d,
    Conv1dWgrad,
    FlipTransposeW,
    TConv1d,
    TConv1dDx,
    TConv1dWgrad,
    Reshape,
    SliceFlat,
    EmbedFlat,
    ConcatFlat,
    ChanSlice,
    ChanEmbed,
    ChanCat,
    Squeeze,
    Unsqueeze,
};

struct OpAttrs {
    i64 i0 = 0, i1 = 0, i2 = 0, i3 = 0;
    real f0 = 0.0, f1 = 0.0;
    std::vector<real> coeffs;
    std::vector<i64> dims;
};

/// Reverse-mode tape. Operations are evaluated eagerly and recorded in
/// execution order, which is by construction a topological order. Backward
/// rules are themselves built from recorded operations, so a vector-Jacobian
/// product taken inside a forward pass stays differentiable when the full
/// loss is later backpropagated (the one higher-order pattern the likelihood
/// objective relies on).
///
/// Graphs are single-threaded and short-lived: one per training step or per
/// evaluation. Tensors returned by operations remain valid after the graph
/// is destroyed (values are shared), only their recording is tied to it.
class Graph {
  public:
    Graph() = default;
    Graph(const Graph &) = delete;
    Graph & operator=(const Graph &) = delete;

    i64 size() const { return static_cast<i64>(nodes_.size()); }

    /// Accumulates d(loss)/d(p) into `p.grad` for every tensor with
    /// requires_grad that participated in the computation. Repeated calls
    /// accumulate; callers zero gradients between optimizer steps.
    void backward(const Tensor & loss);

    /// vᵀ·(∂output/∂input) without materializing the Jacobian. `output` must
    /// have been computed from `input` on this graph; the result is recorded
    /// on the graph and participates in any subsequent backward pass.
    Tensor vjp(const Tensor & output, const Tensor & input, const Tensor & v);

    // Used by the op emitters in namespace ag.
    Tensor emit(Op op, OpAttrs attrs, std::initializer_list<const Tensor *> inputs, Tensor value);
    Tensor emit_many(Op op, OpAttrs attrs, const std::vector<const Tensor *> & inputs,
                     Tensor value);
    Tensor handle(i64 id) const;

  private:
    struct Node {
        Op op;
        OpAttrs attrs;
        std::vector<i64> parents;
        Tensor val;
        bool is_param = false;
    };

    std::vector<Node> nodes_;
    std::unordered_map<const void *, i64> interned_;

    i64 resolve(const Tensor & t);
    i64 push(Op op, OpAttrs attrs, std::vector<i64> parents, Tensor val, bool is_param = false);

    template <typename Want, typename Sink>
    void parent_contributions(i64 nid, const Tensor & adj, const Want & want, const Sink & sink);

    void sweep(i64 seed, Tensor seed_adj, i64 stop, bool into_params, Tensor * result);
};

/// Eagerly-evaluated tensor operations. Every function accepts a nullable
/// graph: with a graph the result is recorded for differentiation, without
/// one only the value is computed. Shapes follow (batch, channels, length).
namespace ag {

Tensor constant(Graph * g, const Tensor & t);

Tensor add(Graph * g, const Tensor & a, const Tensor & b);
Tensor sub(Graph * g, const Tensor & a, const Tensor & b);
Tensor mul(Graph * g, const Tensor & a, const Tensor & b);
Tensor affine(Graph * g, const Tensor & x, real scale, real shift);
Tensor lincomb(Graph * g, const std::vector<Tensor> & xs, const std::vector<real> & coeffs);

Tensor tanh_(Graph * g, const Tensor & x);
Tensor sigmoid_(Graph * g, const Tensor & x);
Tensor exp_(Graph * g, const Tensor & x);
Tensor log_(Graph * g, const Tensor & x);  // rejects non-positive inputs
Tensor log_abs(Graph * g, const Tensor & x);
Tensor recip(Graph * g, const Tensor & x);
Tensor clamp(Graph * g, const Tensor & x, real lo, real hi);

Tensor mul_channel(Graph * g, const Tensor & x, const Tensor & s);
Tensor bcast_channel(Graph * g, const Tensor & s, i64 B, i64 L);
Tensor bcast_batch(Graph * g, const Tensor & v, i64 C, i64 L);
Tensor bcast_all(Graph * g, const Tensor & scalar, std::vector<i64> shape);
/// Per-channel affine map s_c * x + b_c.
Tensor scale_and_shift(Graph * g, const Tensor & x, const Tensor & s, const Tensor & b);

Tensor sum_all(Graph * g, const Tensor & x);
Tensor mean_all(Graph * g, const Tensor & x);
Tensor sum_bl(Graph * g, const Tensor & x);  // [B,C,L] -> [C]
Tensor sum_cl(Graph * g, const Tensor & x);  // [B,C,L] -> [B]

/// Non-causal dilated convolution with symmetric zero padding (odd K only);
/// output length equals input length. `bias` may be an undefined tensor.
Tensor conv1d(Graph * g, const Tensor & x, const Tensor & w, const Tensor & bias, i64 dilation);
Tensor conv1d_wgrad(Graph * g, const Tensor & x, const Tensor & gy, i64 dilation, i64 K);
Tensor flip_transpose(Graph * g, const Tensor & w);

/// Strided transposed convolution, weight layout [Cin, Cout, K]; output
/// length (T-1)*stride + K - 2*pad.
Tensor transposed_conv1d(Graph * g, const Tensor & x, const Tensor & w, const Tensor & bias,
                         i64 stride, i64 pad);
Tensor tconv1d_dx(Graph * g, const Tensor & gy, const Tensor & w, i64 stride, i64 pad, i64 T);
Tensor tconv1d_wgrad(Graph * g, const Tensor & x, const Tensor & gy, i64 stride, i64 pad, i64 K);

Tensor reshape(Graph * g, const Tensor & x, std::vector<i64> shape);
Tensor slice_flat(Graph * g, const Tensor & x, i64 lo, i64 hi);
Tensor embed_flat(Graph * g, const Tensor & x, i64 lo, i64 total);
Tensor concat_flat(Graph * g, const Tensor & a, const Tensor & b);
Tensor chan_slice(Graph * g, const Tensor & x, i64 c0, i64 c1);
Tensor chan_embed(Graph * g, const Tensor & x, i64 c0, i64 c_total);
Tensor chan_cat(Graph * g, const Tensor & a, const Tensor & b);

/// Volume-preserving reshapes (C,L) <-> (qC, L/q); exact permutations.
Tensor squeeze(Graph * g, const Tensor & x, i64 q);
Tensor unsqueeze(Graph * g, const Tensor & x, i64 q);

}  // namespace ag

}  // namespace wavenode
