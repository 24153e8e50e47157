#include "bicm/tape.hpp"

#include <cmath>

namespace bicm {

void dense_row(const double* x, const double* w, const double* b, double* y, int in, int out, Act act) {
    for (int o = 0; o < out; ++o) {
        double v = detail::dot8(x, w + size_t(o) * in, in) + b[o];
        switch (act) {
            case Act::linear: break;
            case Act::relu: v = v > 0.0 ? v : 0.0; break;
            case Act::sigmoid: v = sigmoid(v); break;
            case Act::tanh: v = std::tanh(v); break;
        }
        y[o] = v;
    }
}

namespace {

// forward of one check segment; t[] receives tanh(mu/2) per edge
void check_segment_forward(const double* mu, int deg, double* t, double* out) {
    for (int i = 0; i < deg; ++i) t[i] = tanh_half_odd(mu[i]);
    // exclusive products via prefix/suffix passes
    double fwd = 1.0;
    for (int i = 0; i < deg; ++i) {
        out[i] = fwd;  // product of t[0..i-1]
        fwd *= t[i];
    }
    double bwd = 1.0;
    for (int i = deg - 1; i >= 0; --i) {
        out[i] *= bwd;  // times product of t[i+1..deg-1]
        bwd *= t[i];
    }
    for (int i = 0; i < deg; ++i) out[i] = 2.0 * atanh_clamped(out[i]);
}

}  // namespace

// Shared with the plain (non-tape) BP evaluation path.
void check_extrinsic_row(const CheckSegments& segs, const double* mu, double* out, std::vector<double>& scratch) {
    int nc = segs.num_checks();
    for (int c = 0; c < nc; ++c) {
        int s = segs.offsets[c], deg = segs.offsets[c + 1] - s;
        if (int(scratch.size()) < deg) scratch.resize(deg);
        check_segment_forward(mu + s, deg, scratch.data(), out + s);
    }
}

Tape::Id Tape::push(Node n) {
    n.val = eval(n, nodes_);
    nodes_.push_back(std::move(n));
    return Id(nodes_.size()) - 1;
}

static void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument("tape: " + msg);
}

Tape::Id Tape::leaf(Mat value) {
    Node n;
    n.op = Op::leaf;
    n.val = std::move(value);
    nodes_.push_back(std::move(n));
    return Id(nodes_.size()) - 1;
}

Tape::Id Tape::dense(Id x, Id w, Id b, Act act) {
    const Mat& xv = nodes_[x].val;
    const Mat& wv = nodes_[w].val;
    const Mat& bv = nodes_[b].val;
    require(wv.cols() == xv.cols(), "dense: weight cols != input features");
    require(bv.rows() == 1 && bv.cols() == wv.rows(), "dense: bias shape");
    Node n;
    n.op = Op::dense;
    n.a = x; n.b = w; n.c = b;
    n.k0 = double(int(act));
    return push(std::move(n));
}

#define BICM_UNARY(fname, opname)              \
    Tape::Id Tape::fname(Id a) {               \
        Node n; n.op = Op::opname; n.a = a;    \
        return push(std::move(n));             \
    }
BICM_UNARY(relu, relu)
BICM_UNARY(sigmoid, sigmoid)
BICM_UNARY(tanh_, tanh)
BICM_UNARY(atanh_clamped, atanh_clamped)
BICM_UNARY(log_, log)
BICM_UNARY(exp_, exp)
BICM_UNARY(neg, neg)
#undef BICM_UNARY

Tape::Id Tape::pow_const(Id a, double p) {
    Node n; n.op = Op::pow_const; n.a = a; n.k0 = p;
    return push(std::move(n));
}

Tape::Id Tape::axpb(Id a, double scale, double shift) {
    Node n; n.op = Op::axpb; n.a = a; n.k0 = scale; n.k1 = shift;
    return push(std::move(n));
}

Tape::Id Tape::clamp(Id a, double lo, double hi) {
    Node n; n.op = Op::clamp; n.a = a; n.k0 = lo; n.k1 = hi;
    return push(std::move(n));
}

Tape::Id Tape::add(Id a, Id b) {
    require(nodes_[a].val.same_shape(nodes_[b].val), "add: shape mismatch");
    Node n; n.op = Op::add; n.a = a; n.b = b;
    return push(std::move(n));
}

Tape::Id Tape::sub(Id a, Id b) {
    require(nodes_[a].val.same_shape(nodes_[b].val), "sub: shape mismatch");
    Node n; n.op = Op::sub; n.a = a; n.b = b;
    return push(std::move(n));
}

Tape::Id Tape::mul(Id a, Id b) {
    require(nodes_[a].val.same_shape(nodes_[b].val), "mul: shape mismatch");
    Node n; n.op = Op::mul; n.a = a; n.b = b;
    return push(std::move(n));
}

Tape::Id Tape::mul_scalar(Id a, Id scalar) {
    require(nodes_[scalar].val.size() == 1, "mul_scalar: scalar operand must be 1x1");
    Node n; n.op = Op::mul_scalar; n.a = a; n.b = scalar;
    return push(std::move(n));
}

Tape::Id Tape::sum_all(Id a) {
    Node n; n.op = Op::sum_all; n.a = a;
    return push(std::move(n));
}

Tape::Id Tape::mean_all(Id a) {
    Node n; n.op = Op::mean_all; n.a = a;
    return push(std::move(n));
}

Tape::Id Tape::concat_cols(Id a, Id b) {
    require(nodes_[a].val.rows() == nodes_[b].val.rows(), "concat_cols: row mismatch");
    Node n; n.op = Op::concat_cols; n.a = a; n.b = b;
    return push(std::move(n));
}

Tape::Id Tape::slice_cols(Id a, int begin, int end) {
    require(0 <= begin && begin < end && end <= nodes_[a].val.cols(), "slice_cols: range");
    Node n; n.op = Op::slice_cols; n.a = a; n.i0 = begin; n.i1 = end;
    return push(std::move(n));
}

Tape::Id Tape::reshape(Id a, int rows, int cols) {
    require(size_t(rows) * cols == nodes_[a].val.size(), "reshape: element count");
    Node n; n.op = Op::reshape; n.a = a; n.i0 = rows; n.i1 = cols;
    return push(std::move(n));
}

Tape::Id Tape::select_point(Id points, std::vector<int> row_of, std::vector<int> col_of) {
    require(row_of.size() == col_of.size(), "select_point: index lengths differ");
    Node n; n.op = Op::select_point; n.a = points;
    n.idx = std::move(row_of); n.idx2 = std::move(col_of);
    return push(std::move(n));
}

Tape::Id Tape::gather_cols(Id a, std::vector<int> src_col) {
    Node n; n.op = Op::gather_cols; n.a = a; n.idx = std::move(src_col);
    return push(std::move(n));
}

Tape::Id Tape::scatter_cols_sum(Id a, std::vector<int> dst_col, int out_cols) {
    require(dst_col.size() == size_t(nodes_[a].val.cols()), "scatter_cols_sum: map length");
    Node n; n.op = Op::scatter_cols_sum; n.a = a; n.idx = std::move(dst_col); n.i0 = out_cols;
    return push(std::move(n));
}

Tape::Id Tape::normalize_rows(Id a, double divisor) {
    require(divisor > 0, "normalize_rows: divisor");
    Node n; n.op = Op::normalize_rows; n.a = a; n.k0 = divisor;
    return push(std::move(n));
}

Tape::Id Tape::check_extrinsic(Id a, const CheckSegments* segs) {
    require(segs && segs->num_edges() == nodes_[a].val.cols(), "check_extrinsic: edge count");
    Node n; n.op = Op::check_extrinsic; n.a = a; n.segs = segs;
    return push(std::move(n));
}

Tape::Id Tape::bce_logits(Id logits, Mat bits) {
    require(bits.same_shape(nodes_[logits].val), "bce_logits: target shape");
    Node n; n.op = Op::bce_logits; n.a = logits; n.aux = std::move(bits);
    return push(std::move(n));
}

Tape::Id Tape::softmax_ce(Id logits, std::vector<int> labels) {
    require(labels.size() == size_t(nodes_[logits].val.rows()), "softmax_ce: label count");
    Node n; n.op = Op::softmax_ce; n.a = logits; n.idx = std::move(labels);
    return push(std::move(n));
}

Mat Tape::eval(const Node& n, const std::vector<Node>& nodes) {
    auto A = [&]() -> const Mat& { return nodes[n.a].val; };
    auto B = [&]() -> const Mat& { return nodes[n.b].val; };
    switch (n.op) {
        case Op::leaf:
            return n.val;
        case Op::dense: {
            const Mat& x = A();
            const Mat& w = B();
            const Mat& bias = nodes[n.c].val;
            Mat y(x.rows(), w.rows());
            for (int r = 0; r < x.rows(); ++r)
                dense_row(x.row(r), w.data(), bias.data(), y.row(r), x.cols(), w.rows(), Act(int(n.k0)));
            return y;
        }
        case Op::relu: {
            Mat y = A();
            for (size_t i = 0; i < y.size(); ++i) y[i] = y[i] > 0.0 ? y[i] : 0.0;
            return y;
        }
        case Op::sigmoid: {
            Mat y = A();
            for (size_t i = 0; i < y.size(); ++i) y[i] = bicm::sigmoid(y[i]);
            return y;
        }
        case Op::tanh: {
            Mat y = A();
            for (size_t i = 0; i < y.size(); ++i) y[i] = std::tanh(y[i]);
            return y;
        }
        case Op::atanh_clamped: {
            Mat y = A();
            for (size_t i = 0; i < y.size(); ++i) y[i] = bicm::atanh_clamped(y[i]);
            return y;
        }
        case Op::log: {
            Mat y = A();
            for (size_t i = 0; i < y.size(); ++i) y[i] = std::log(y[i]);
            return y;
        }
        case Op::exp: {
            Mat y = A();
            for (size_t i = 0; i < y.size(); ++i) y[i] = std::exp(y[i]);
            return y;
        }
        case Op::neg: {
            Mat y = A();
            for (size_t i = 0; i < y.size(); ++i) y[i] = -y[i];
            return y;
        }
        case Op::pow_const: {
            Mat y = A();
            for (size_t i = 0; i < y.size(); ++i) y[i] = std::pow(y[i], n.k0);
            return y;
        }
        case Op::axpb: {
            Mat y = A();
            for (size_t i = 0; i < y.size(); ++i) y[i] = n.k0 * y[i] + n.k1;
            return y;
        }
        case Op::clamp: {
            Mat y = A();
            for (size_t i = 0; i < y.size(); ++i) y[i] = clampd(y[i], n.k0, n.k1);
            return y;
        }
        case Op::add: {
            Mat y = A();
            const Mat& b = B();
            for (size_t i = 0; i < y.size(); ++i) y[i] += b[i];
            return y;
        }
        case Op::sub: {
            Mat y = A();
            const Mat& b = B();
            for (size_t i = 0; i < y.size(); ++i) y[i] -= b[i];
            return y;
        }
        case Op::mul: {
            Mat y = A();
            const Mat& b = B();
            for (size_t i = 0; i < y.size(); ++i) y[i] *= b[i];
            return y;
        }
        case Op::mul_scalar: {
            Mat y = A();
            double s = B()[0];
            for (size_t i = 0; i < y.size(); ++i) y[i] *= s;
            return y;
        }
        case Op::sum_all: {
            const Mat& a = A();
            double s = 0.0;
            for (size_t i = 0; i < a.size(); ++i) s += a[i];
            return Mat::scalar(s);
        }
        case Op::mean_all: {
            const Mat& a = A();
            double s = 0.0;
            for (size_t i = 0; i < a.size(); ++i) s += a[i];
            return Mat::scalar(s / double(a.size()));
        }
        case Op::concat_cols: {
            const Mat& a = A();
            const Mat& b = B();
            Mat y(a.rows(), a.cols() + b.cols());
            for (int r = 0; r < a.rows(); ++r) {
                for (int c = 0; c < a.cols(); ++c) y(r, c) = a(r, c);
                for (int c = 0; c < b.cols(); ++c) y(r, a.cols() + c) = b(r, c);
            }
            return y;
        }
        case Op::slice_cols: {
            const Mat& a = A();
            Mat y(a.rows(), n.i1 - n.i0);
            for (int r = 0; r < a.rows(); ++r)
                for (int c = n.i0; c < n.i1; ++c) y(r, c - n.i0) = a(r, c);
            return y;
        }
        case Op::reshape: {
            const Mat& a = A();
            Mat y(n.i0, n.i1);
            for (size_t i = 0; i < a.size(); ++i) y[i] = a[i];
            return y;
        }
        case Op::select_point: {
            const Mat& p = A();
            Mat y(int(n.idx.size()), 2);
            for (size_t r = 0; r < n.idx.size(); ++r) {
                y(int(r), 0) = p(n.idx[r], 2 * n.idx2[r]);
                y(int(r), 1) = p(n.idx[r], 2 * n.idx2[r] + 1);
            }
            return y;
        }
        case Op::gather_cols: {
            const Mat& a = A();
            Mat y(a.rows(), int(n.idx.size()));
            for (int r = 0; r < a.rows(); ++r)
                for (size_t c = 0; c < n.idx.size(); ++c) y(r, int(c)) = a(r, n.idx[c]);
            return y;
        }
        case Op::scatter_cols_sum: {
            const Mat& a = A();
            Mat y(a.rows(), n.i0);
            for (int r = 0; r < a.rows(); ++r)
                for (int c = 0; c < a.cols(); ++c) y(r, n.idx[c]) += a(r, c);
            return y;
        }
        case Op::normalize_rows: {
            const Mat& a = A();
            Mat y(a.rows(), a.cols());
            for (int r = 0; r < a.rows(); ++r) {
                double q = 0.0;
                for (int c = 0; c < a.cols(); ++c) q += a(r, c) * a(r, c);
                double s = 1.0 / std::sqrt(q / n.k0);
                for (int c = 0; c < a.cols(); ++c) y(r, c) = a(r, c) * s;
            }
            return y;
        }
        case Op::check_extrinsic: {
            const Mat& a = A();
            Mat y(a.rows(), a.cols());
            std::vector<double> scratch;
            for (int r = 0; r < a.rows(); ++r) check_extrinsic_row(*n.segs, a.row(r), y.row(r), scratch);
            return y;
        }
        case Op::bce_logits: {
            const Mat& l = A();
            double s = 0.0;
            for (size_t i = 0; i < l.size(); ++i) s += softplus((2.0 * n.aux[i] - 1.0) * l[i]);
            return Mat::scalar(s);
        }
        case Op::softmax_ce: {
            const Mat& l = A();
            double s = 0.0;
            for (int r = 0; r < l.rows(); ++r) {
                const double* row = l.row(r);
                double mx = row[0];
                for (int c = 1; c < l.cols(); ++c) mx = std::max(mx, row[c]);
                double lse = 0.0;
                for (int c = 0; c < l.cols(); ++c) lse += std::exp(row[c] - mx);
                s += mx + std::log(lse) - row[n.idx[r]];
            }
            return Mat::scalar(s);
        }
    }
    throw std::logic_error("tape: unhandled op");
}

void Tape::backward(Id loss) {
    require(loss >= 0 && loss < int(nodes_.size()), "backward: bad node id");
    require(nodes_[loss].val.size() == 1, "backward: loss must be scalar");
    for (auto& n : nodes_) {
        n.grad = Mat(n.val.rows(), n.val.cols());
    }
    nodes_[loss].grad[0] = 1.0;
    for (int i = loss; i >= 0; --i) backprop_node(i);
}

void Tape::backprop_node(int i) {
    Node& n = nodes_[i];
    const Mat& g = n.grad;
    if (n.op == Op::leaf) return;
    Mat& ga = nodes_[n.a].grad;
    const Mat& va = nodes_[n.a].val;
    const Mat& v = n.val;
    switch (n.op) {
        case Op::leaf:
            return;
        case Op::dense: {
            const Mat& x = va;
            const Mat& w = nodes_[n.b].val;
            Mat& gw = nodes_[n.b].grad;
            Mat& gb = nodes_[n.c].grad;
            Act act = Act(int(n.k0));
            int in = x.cols(), out = w.rows();
            for (int r = 0; r < x.rows(); ++r) {
                const double* xr = x.row(r);
                double* gxr = ga.row(r);
                for (int o = 0; o < out; ++o) {
                    double gpre = g(r, o);
                    double y = v(r, o);
                    switch (act) {
                        case Act::linear: break;
                        case Act::relu: gpre = y > 0.0 ? gpre : 0.0; break;
                        case Act::sigmoid: gpre *= y * (1.0 - y); break;
                        case Act::tanh: gpre *= 1.0 - y * y; break;
                    }
                    if (gpre == 0.0) continue;
                    const double* wo = w.row(o);
                    double* gwo = gw.row(o);
                    for (int k = 0; k < in; ++k) {
                        gxr[k] += gpre * wo[k];
                        gwo[k] += gpre * xr[k];
                    }
                    gb[o] += gpre;
                }
            }
            return;
        }
        case Op::relu:
            for (size_t k = 0; k < g.size(); ++k) ga[k] += v[k] > 0.0 ? g[k] : 0.0;
            return;
        case Op::sigmoid:
            for (size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * v[k] * (1.0 - v[k]);
            return;
        case Op::tanh:
            for (size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * (1.0 - v[k] * v[k]);
            return;
        case Op::atanh_clamped:
            for (size_t k = 0; k < g.size(); ++k) {
                if (std::abs(va[k]) < 1.0 - kAtanhClip) ga[k] += g[k] / (1.0 - va[k] * va[k]);
            }
            return;
        case Op::log:
            for (size_t k = 0; k < g.size(); ++k) ga[k] += g[k] / va[k];
            return;
        case Op::exp:
            for (size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * v[k];
            return;
        case Op::neg:
            for (size_t k = 0; k < g.size(); ++k) ga[k] -= g[k];
            return;
        case Op::pow_const:
            for (size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * n.k0 * std::pow(va[k], n.k0 - 1.0);
            return;
        case Op::axpb:
            for (size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * n.k0;
            return;
        case Op::clamp:
            for (size_t k = 0; k < g.size(); ++k) {
                if (va[k] > n.k0 && va[k] < n.k1) ga[k] += g[k];
            }
            return;
        case Op::add: {
            Mat& gb = nodes_[n.b].grad;
            for (size_t k = 0; k < g.size(); ++k) {
                ga[k] += g[k];
                gb[k] += g[k];
            }
            return;
        }
        case Op::sub: {
            Mat& gb = nodes_[n.b].grad;
            for (size_t k = 0; k < g.size(); ++k) {
                ga[k] += g[k];
                gb[k] -= g[k];
            }
            return;
        }
        case Op::mul: {
            Mat& gb = nodes_[n.b].grad;
            const Mat& vb = nodes_[n.b].val;
            for (size_t k = 0; k < g.size(); ++k) {
                ga[k] += g[k] * vb[k];
                gb[k] += g[k] * va[k];
            }
            return;
        }
        case Op::mul_scalar: {
            Mat& gb = nodes_[n.b].grad;
            double s = nodes_[n.b].val[0];
            double acc = 0.0;
            for (size_t k = 0; k < g.size(); ++k) {
                ga[k] += g[k] * s;
                acc += g[k] * va[k];
            }
            gb[0] += acc;
            return;
        }
        case Op::sum_all:
            for (size_t k = 0; k < ga.size(); ++k) ga[k] += g[0];
            return;
        case Op::mean_all: {
            double s = g[0] / double(ga.size());
            for (size_t k = 0; k < ga.size(); ++k) ga[k] += s;
            return;
        }
        case Op::concat_cols: {
            Mat& gb = nodes_[n.b].grad;
            int ca = va.cols();
            for (int r = 0; r < g.rows(); ++r) {
                for (int c = 0; c < ca; ++c) ga(r, c) += g(r, c);
                for (int c = 0; c < gb.cols(); ++c) gb(r, c) += g(r, ca + c);
            }
            return;
        }
        case Op::slice_cols:
            for (int r = 0; r < g.rows(); ++r)
                for (int c = 0; c < g.cols(); ++c) ga(r, n.i0 + c) += g(r, c);
            return;
        case Op::reshape:
            for (size_t k = 0; k < g.size(); ++k) ga[k] += g[k];
            return;
        case Op::select_point:
            for (size_t r = 0; r < n.idx.size(); ++r) {
                ga(n.idx[r], 2 * n.idx2[r]) += g(int(r), 0);
                ga(n.idx[r], 2 * n.idx2[r] + 1) += g(int(r), 1);
            }
            return;
        case Op::gather_cols:
            for (int r = 0; r < g.rows(); ++r)
                for (size_t c = 0; c < n.idx.size(); ++c) ga(r, n.idx[c]) += g(r, int(c));
            return;
        case Op::scatter_cols_sum:
            for (int r = 0; r < ga.rows(); ++r)
                for (int c = 0; c < ga.cols(); ++c) ga(r, c) += g(r, n.idx[c]);
            return;
        case Op::normalize_rows: {
            for (int r = 0; r < va.rows(); ++r) {
                double q = 0.0, gdotx = 0.0;
                for (int c = 0; c < va.cols(); ++c) {
                    q += va(r, c) * va(r, c);
                    gdotx += g(r, c) * va(r, c);
                }
                double s = 1.0 / std::sqrt(q / n.k0);
                double coef = s * s * s * gdotx / n.k0;
                for (int c = 0; c < va.cols(); ++c) ga(r, c) += s * g(r, c) - coef * va(r, c);
            }
            return;
        }
        case Op::check_extrinsic: {
            const CheckSegments& segs = *n.segs;
            std::vector<double> t, prod, gout, sufs;
            for (int r = 0; r < va.rows(); ++r) {
                const double* mu = va.row(r);
                double* gmu = ga.row(r);
                for (int c = 0; c < segs.num_checks(); ++c) {
                    int s = segs.offsets[c], deg = segs.offsets[c + 1] - s;
                    t.assign(deg, 0.0);
                    gout.assign(deg, 0.0);
                    for (int i = 0; i < deg; ++i) t[i] = tanh_half_odd((mu + s)[i]);
                    // unclipped exclusive products, same pass as the forward
                    prod.assign(deg, 1.0);
                    double fwd = 1.0;
                    for (int e = 0; e < deg; ++e) {
                        prod[e] = fwd;
                        fwd *= t[e];
                    }
                    double bwd = 1.0;
                    for (int e = deg - 1; e >= 0; --e) {
                        prod[e] *= bwd;
                        bwd *= t[e];
                    }
                    // g_e = dL/dP_e; zero where the atanh clip saturated
                    for (int e = 0; e < deg; ++e) {
                        if (std::abs(prod[e]) < 1.0 - kAtanhClip)
                            gout[e] = g(r, s + e) * 2.0 / (1.0 - prod[e] * prod[e]);
                    }
                    // x_f += dt_f * sum_{e != f} g_e * prod_{e' not in {e,f}} t_e'
                    sufs.assign(deg + 1, 1.0);
                    for (int f = 0; f < deg; ++f) {
                        double suf = 1.0;
                        for (int e = deg - 1; e >= 0; --e) {
                            sufs[e] = suf;
                            if (e != f) suf *= t[e];
                        }
                        double acc = 0.0, pre = 1.0;
                        for (int e = 0; e < deg; ++e) {
                            if (e == f) continue;
                            acc += gout[e] * pre * sufs[e];
                            pre *= t[e];
                        }
                        double dt = 0.5 * (1.0 - t[f] * t[f]);
                        gmu[s + f] += dt * acc;
                    }
                }
            }
            return;
        }
        case Op::bce_logits:
            for (size_t k = 0; k < va.size(); ++k) {
                double b = n.aux[k];
                ga[k] += g[0] * (bicm::sigmoid(va[k]) - 1.0 + b);
            }
            return;
        case Op::softmax_ce: {
            for (int r = 0; r < va.rows(); ++r) {
                const double* row = va.row(r);
                double mx = row[0];
                for (int c = 1; c < va.cols(); ++c) mx = std::max(mx, row[c]);
                double z = 0.0;
                for (int c = 0; c < va.cols(); ++c) z += std::exp(row[c] - mx);
                for (int c = 0; c < va.cols(); ++c) {
                    double p = std::exp(row[c] - mx) / z;
                    ga(r, c) += g[0] * (p - (c == n.idx[r] ? 1.0 : 0.0));
                }
            }
            return;
        }
    }
}

bool Tape::recompute_matches() const {
    std::vector<Node> copy;
    copy.reserve(nodes_.size());
    for (const Node& n : nodes_) {
        Node c;
        c.op = n.op;
        c.a = n.a; c.b = n.b; c.c = n.c;
        c.k0 = n.k0; c.k1 = n.k1;
        c.i0 = n.i0; c.i1 = n.i1;
        c.idx = n.idx; c.idx2 = n.idx2;
        c.aux = n.aux;
        c.segs = n.segs;
        if (n.op == Op::leaf) {
            c.val = n.val;
        } else {
            c.val = eval(c, copy);
        }
        if (!(c.val == n.val)) return false;
        copy.push_back(std::move(c));
    }
    return true;
}

}  // namespace bicm
