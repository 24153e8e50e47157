#pragma once

#include "bicm/mat.hpp"
#include "bicm/rng.hpp"
#include "bicm/tape.hpp"

namespace bicm {

struct DenseLayer {
    Mat w;  // out x in
    Mat b;  // 1 x out
    Act act = Act::linear;

    int in() const { return w.cols(); }
    int out() const { return w.rows(); }
};

// Glorot-uniform weights, U(+-sqrt(6/(fan_in+fan_out))); biases zero.
Mat glorot_init(int out, int in, Rng& rng);
DenseLayer make_dense(int out, int in, Act act, Rng& rng);

// Row-wise evaluation via the shared dense_row kernel.
Mat dense_eval(const DenseLayer& l, const Mat& x);

// Registers layer parameters as tape leaves.
struct LayerIds {
    Tape::Id w, b;
};
LayerIds register_layer(Tape& t, const DenseLayer& l);

}  // namespace bicm
