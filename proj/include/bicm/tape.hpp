#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "bicm/kernels.hpp"
#include "bicm/mat.hpp"

namespace bicm {

// Per-check contiguous edge ranges, the structural payload of the
// check-node extrinsic update. Edges of check c are [offsets[c], offsets[c+1]).
struct CheckSegments {
    std::vector<int> offsets;
    int num_edges() const { return offsets.empty() ? 0 : offsets.back(); }
    int num_checks() const { return int(offsets.size()) - 1; }
};

// Reverse-mode tape over matrix-valued nodes. Forward values are computed
// eagerly at node creation; backward() fills adjoints in reverse creation
// order, which fixes the accumulation order for fan-out nodes.
class Tape {
  public:
    using Id = int;

    Id leaf(Mat value);

    // dense layer: act(x W^T + b). w is (out x in), b is (1 x out).
    Id dense(Id x, Id w, Id b, Act act);

    Id relu(Id a);
    Id sigmoid(Id a);
    Id tanh_(Id a);
    Id atanh_clamped(Id a);
    Id log_(Id a);
    Id exp_(Id a);
    Id neg(Id a);
    Id pow_const(Id a, double p);
    Id axpb(Id a, double scale, double shift);  // scale*x + shift
    Id clamp(Id a, double lo, double hi);
    Id add(Id a, Id b);
    Id sub(Id a, Id b);
    Id mul(Id a, Id b);
    Id mul_scalar(Id a, Id scalar);  // matrix * (1x1 node)
    Id sum_all(Id a);
    Id mean_all(Id a);
    Id concat_cols(Id a, Id b);
    Id slice_cols(Id a, int begin, int end);
    Id reshape(Id a, int rows, int cols);
    // out row r = points(row_of[r], 2*col_of[r] .. 2*col_of[r]+1)
    Id select_point(Id points, std::vector<int> row_of, std::vector<int> col_of);
    Id gather_cols(Id a, std::vector<int> src_col);
    Id scatter_cols_sum(Id a, std::vector<int> dst_col, int out_cols);
    // scale each row by 1/sqrt(sum(row^2)/divisor)
    Id normalize_rows(Id a, double divisor);
    // per check segment: out_e = 2*atanh(clip(prod_{e' != e} tanh(in_e'/2)))
    Id check_extrinsic(Id a, const CheckSegments* segs);
    // sum over entries of binary CE with convention p(bit=0)=sigmoid(logit)
    Id bce_logits(Id logits, Mat bits);
    // sum over rows of categorical CE after softmax; labels are row targets
    Id softmax_ce(Id logits, std::vector<int> labels);

    const Mat& value(Id id) const { return nodes_[id].val; }
    const Mat& grad(Id id) const { return nodes_[id].grad; }
    int size() const { return int(nodes_.size()); }

    // Backward pass from a scalar loss node. May be called repeatedly;
    // adjoints are reset each time.
    void backward(Id loss);

    // Recompute every node from leaf values; true iff all recorded values
    // are reproduced bit-exactly.
    bool recompute_matches() const;

  private:
    enum class Op {
        leaf, dense, relu, sigmoid, tanh, atanh_clamped, log, exp, neg, pow_const, axpb,
        clamp, add, sub, mul, mul_scalar, sum_all, mean_all, concat_cols, slice_cols,
        reshape, select_point, gather_cols, scatter_cols_sum, normalize_rows,
        check_extrinsic, bce_logits, softmax_ce
    };

    struct Node {
        Op op;
        int a = -1, b = -1, c = -1;
        double k0 = 0.0, k1 = 0.0;
        int i0 = 0, i1 = 0;
        std::vector<int> idx, idx2;
        Mat aux;                          // op-specific payload (targets, ...)
        const CheckSegments* segs = nullptr;
        Mat val, grad;
    };

    Id push(Node n);
    static Mat eval(const Node& n, const std::vector<Node>& nodes);
    void backprop_node(int i);

    std::vector<Node> nodes_;
};

}  // namespace bicm
