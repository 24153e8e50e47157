#include "bicm/nn.hpp"

#include <cmath>

namespace bicm {

Mat glorot_init(int out, int in, Rng& rng) {
    Mat w(out, in);
    double bound = std::sqrt(6.0 / double(in + out));
    for (size_t i = 0; i < w.size(); ++i) w[i] = rng.uniform(-bound, bound);
    return w;
}

DenseLayer make_dense(int out, int in, Act act, Rng& rng) {
    DenseLayer l;
    l.w = glorot_init(out, in, rng);
    l.b = Mat(1, out);
    l.act = act;
    return l;
}

Mat dense_eval(const DenseLayer& l, const Mat& x) {
    if (x.cols() != l.in()) throw std::invalid_argument("dense_eval: feature dimension mismatch");
    Mat y(x.rows(), l.out());
    for (int r = 0; r < x.rows(); ++r) dense_row(x.row(r), l.w.data(), l.b.data(), y.row(r), l.in(), l.out(), l.act);
    return y;
}

LayerIds register_layer(Tape& t, const DenseLayer& l) {
    return LayerIds{t.leaf(l.w), t.leaf(l.b)};
}

}  // namespace bicm
