#include "bicm/demapper.hpp"

#include <cmath>
#include <stdexcept>

namespace bicm {

DemapperParams make_bitwise_demapper(int m, double snr_mid, Rng& rng, int hidden) {
    DemapperParams p;
    p.m = m;
    p.prior_inputs = true;
    p.snr_mid = snr_mid;
    p.l1 = make_dense(hidden, 3 + m, Act::relu, rng);
    p.l2 = make_dense(hidden, hidden, Act::relu, rng);
    p.l3 = make_dense(m, hidden, Act::linear, rng);
    return p;
}

DemapperParams make_symbolwise_demapper(int m, double snr_mid, Rng& rng, int hidden) {
    DemapperParams p;
    p.m = m;
    p.prior_inputs = false;
    p.snr_mid = snr_mid;
    p.l1 = make_dense(hidden, 3, Act::relu, rng);
    p.l2 = make_dense(hidden, hidden, Act::relu, rng);
    p.l3 = make_dense(1 << m, hidden, Act::linear, rng);
    return p;
}

std::vector<double> nn_demap(const DemapperParams& p, cplx y, double snr_db, const std::vector<double>& prior) {
    Mat f(1, p.in_dim());
    f(0, 0) = y.real();
    f(0, 1) = y.imag();
    f(0, 2) = p.standardize(snr_db);
    if (p.prior_inputs) {
        if (!prior.empty() && int(prior.size()) != p.m)
            throw std::invalid_argument("nn_demap: prior length != m");
        for (int j = 0; j < p.m; ++j) f(0, 3 + j) = prior.empty() ? 0.0 : clampd(prior[j], -kLlrMax, kLlrMax);
    }
    Mat logits = nn_demap_batch(p, f);
    std::vector<double> out(logits.cols());
    for (int c = 0; c < logits.cols(); ++c) out[c] = logits(0, c);
    return out;
}

Mat nn_demap_batch(const DemapperParams& p, const Mat& features) {
    Mat h1 = dense_eval(p.l1, features);
    Mat h2 = dense_eval(p.l2, h1);
    return dense_eval(p.l3, h2);
}

DemapperIds register_demapper(Tape& t, const DemapperParams& p) {
    return DemapperIds{register_layer(t, p.l1), register_layer(t, p.l2), register_layer(t, p.l3)};
}

Tape::Id demapper_node(Tape& t, const DemapperIds& ids, Tape::Id features) {
    Tape::Id h1 = t.dense(features, ids.l1.w, ids.l1.b, Act::relu);
    Tape::Id h2 = t.dense(h1, ids.l2.w, ids.l2.b, Act::relu);
    return t.dense(h2, ids.l3.w, ids.l3.b, Act::linear);
}

std::vector<double> map_demap_awgn(const Constellation& c, cplx y, double n0, const std::vector<double>& prior) {
    if (n0 <= 0.0) throw std::invalid_argument("map_demap_awgn: n0 must be > 0");
    int m = c.m, order = c.order();
    std::vector<double> metric(order);
    for (int k = 0; k < order; ++k) {
        double v = -std::norm(y - c.points[k]) / n0;
        if (!prior.empty()) {
            for (int i = 0; i < m; ++i) {
                // log sigmoid(+p) for bit 0, log sigmoid(-p) for bit 1
                v -= bit_of(k, i, m) == 0 ? softplus(-prior[i]) : softplus(prior[i]);
            }
        }
        metric[k] = v;
    }
    std::vector<double> llr(m);
    for (int j = 0; j < m; ++j) {
        double mx0 = -1e300, mx1 = -1e300;
        for (int k = 0; k < order; ++k)
            (bit_of(k, j, m) == 0 ? mx0 : mx1) = std::max(bit_of(k, j, m) == 0 ? mx0 : mx1, metric[k]);
        double s0 = 0.0, s1 = 0.0;
        for (int k = 0; k < order; ++k) {
            if (bit_of(k, j, m) == 0)
                s0 += std::exp(metric[k] - mx0);
            else
                s1 += std::exp(metric[k] - mx1);
        }
        llr[j] = clampd(mx0 + std::log(s0) - mx1 - std::log(s1), -kLlrMax, kLlrMax);
    }
    return llr;
}

std::vector<double> map_demap_awgn_naive(const Constellation& c, cplx y, double n0, const std::vector<double>& prior) {
    int m = c.m, order = c.order();
    std::vector<double> llr(m);
    for (int j = 0; j < m; ++j) {
        long double s0 = 0.0L, s1 = 0.0L;
        for (int k = 0; k < order; ++k) {
            long double v = std::exp((long double)(-std::norm(y - c.points[k]) / n0));
            if (!prior.empty()) {
                for (int i = 0; i < m; ++i) {
                    long double p = bit_of(k, i, m) == 0 ? sigmoid(prior[i]) : sigmoid(-prior[i]);
                    v *= p;
                }
            }
            (bit_of(k, j, m) == 0 ? s0 : s1) += v;
        }
        llr[j] = clampd(double(std::log(s0) - std::log(s1)), -kLlrMax, kLlrMax);
    }
    return llr;
}

}  // namespace bicm
