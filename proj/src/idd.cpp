#include "bicm/idd.hpp"

#include <cmath>
#include <stdexcept>

namespace bicm {

void IddConfig::validate() const {
    if (!graph) throw std::invalid_argument("IddConfig: graph not set");
    if (m < 1) throw std::invalid_argument("IddConfig: m must be >= 1");
    if (graph->n % m != 0) throw std::invalid_argument("IddConfig: n must be a multiple of m");
    if (iterations < 1) throw std::invalid_argument("IddConfig: iterations must be >= 1");
    if ((neural != nullptr) == (map_constellation != nullptr))
        throw std::invalid_argument("IddConfig: exactly one demapper kind must be set");
}

namespace {

// demap all s symbols of one frame into l (length n)
void demap_frame(const IddConfig& cfg, const std::vector<cplx>& y, double snr_db, double n0,
                 const std::vector<double>& prior_used, std::vector<double>& l) {
    int s = cfg.s(), m = cfg.m;
    if (cfg.neural) {
        const DemapperParams& p = *cfg.neural;
        Mat f(s, p.in_dim());
        for (int j = 0; j < s; ++j) {
            f(j, 0) = y[j].real();
            f(j, 1) = y[j].imag();
            f(j, 2) = p.standardize(snr_db);
            for (int c = 0; c < m; ++c) f(j, 3 + c) = prior_used[j * m + c];
        }
        Mat logits = nn_demap_batch(p, f);
        for (int j = 0; j < s; ++j)
            for (int c = 0; c < m; ++c) l[j * m + c] = logits(j, c);
    } else {
        std::vector<double> pr(m);
        for (int j = 0; j < s; ++j) {
            for (int c = 0; c < m; ++c) pr[c] = prior_used[j * m + c];
            std::vector<double> out = map_demap_awgn(*cfg.map_constellation, y[j], n0, pr);
            for (int c = 0; c < m; ++c) l[j * m + c] = out[c];
        }
    }
}

}  // namespace

std::vector<double> idd_receive(const IddConfig& cfg, const std::vector<cplx>& y, double snr_db, double n0,
                                IddTrace* trace) {
    cfg.validate();
    if (int(y.size()) != cfg.s()) throw std::invalid_argument("idd_receive: expected s = n/m symbols");
    const TannerGraph& g = *cfg.graph;
    int n = g.n;
    std::vector<double> prior(n, 0.0), prior_used(n), l(n), l_e(n), l_hat(n);
    BpState st = BpState::init(g);
    for (int it = 0; it < cfg.iterations; ++it) {
        for (int j = 0; j < n; ++j) prior_used[j] = clampd(prior[j], -kLlrMax, kLlrMax);
        demap_frame(cfg, y, snr_db, n0, prior_used, l);
        for (int j = 0; j < n; ++j) l_e[j] = l[j] - prior_used[j];
        bp_iteration(g, l_e, st);
        l_hat = bp_output(g, l_e, st);
        for (int j = 0; j < n; ++j) prior[j] = l_hat[j] - l_e[j];
        if (trace) {
            trace->prior_used.push_back(prior_used);
            trace->demap_out.push_back(l);
            trace->demap_ext.push_back(l_e);
            trace->dec_out.push_back(l_hat);
            trace->dec_ext.push_back(prior);
        }
    }
    for (double& x : l_hat) x = clampd(x, -kLlrMax, kLlrMax);
    return l_hat;
}

std::vector<double> plain_receive(const IddConfig& cfg, const std::vector<cplx>& y, double snr_db, double n0,
                                  int bp_iters) {
    cfg.validate();
    const TannerGraph& g = *cfg.graph;
    std::vector<double> zero(g.n, 0.0), l(g.n);
    demap_frame(cfg, y, snr_db, n0, zero, l);
    return bp_decode(g, l, bp_iters);
}

double idd_loss_of_trace(const IddTrace& trace, const std::vector<uint8_t>& codeword) {
    double j = 0.0;
    for (const auto& l : trace.demap_out) {
        for (size_t i = 0; i < codeword.size(); ++i) j += softplus((2.0 * codeword[i] - 1.0) * l[i]);
    }
    return j;
}

std::vector<cplx> modulate(const Constellation& c, const std::vector<uint8_t>& bits) {
    if (bits.size() % c.m != 0) throw std::invalid_argument("modulate: bit count not a multiple of m");
    int s = int(bits.size()) / c.m;
    std::vector<cplx> x(s);
    for (int j = 0; j < s; ++j) {
        int k = 0;
        for (int b = 0; b < c.m; ++b) k = (k << 1) | (bits[j * c.m + b] & 1);
        x[j] = c.points[k];
    }
    return x;
}

std::vector<uint8_t> hard_decide(const std::vector<double>& llr) {
    std::vector<uint8_t> bits(llr.size());
    for (size_t i = 0; i < llr.size(); ++i) bits[i] = llr[i] > 0.0 ? 0 : 1;
    return bits;
}

namespace {

struct UnfoldCore {
    Tape::Id loss = -1, final_llr = -1;
    std::vector<Tape::Id> iter_logits;
};

// common receiver unrolling given the 3 constant feature columns
UnfoldCore unfold_core(Tape& t, const IddConfig& cfg, const DemapperIds& ids, Tape::Id feat3, const Mat& bits, int B,
                       int truncate_every) {
    const TannerGraph& g = *cfg.graph;
    int n = g.n, m = cfg.m, rows = B * cfg.s();
    std::vector<int> vn_map(g.edge_vn.begin(), g.edge_vn.end());

    UnfoldCore out;
    Tape::Id prior = t.leaf(Mat(B, n));
    Tape::Id mu_cv = t.leaf(Mat(B, g.num_edges()));
    Tape::Id total = -1;
    Tape::Id l_hat = -1;
    for (int it = 1; it <= cfg.iterations; ++it) {
        Tape::Id pc = t.clamp(prior, -kLlrMax, kLlrMax);
        Tape::Id pr = t.reshape(pc, rows, m);
        Tape::Id feats = t.concat_cols(feat3, pr);
        Tape::Id logits = demapper_node(t, ids, feats);
        Tape::Id l = t.reshape(logits, B, n);
        out.iter_logits.push_back(l);
        Tape::Id ce = t.bce_logits(l, bits);
        total = (total < 0) ? ce : t.add(total, ce);
        Tape::Id l_e = t.sub(l, pc);
        // one BP flooding iteration
        Tape::Id s1 = t.scatter_cols_sum(mu_cv, vn_map, n);
        Tape::Id a = t.add(l_e, s1);
        Tape::Id mu_vc = t.clamp(t.sub(t.gather_cols(a, vn_map), mu_cv), -kLlrMax, kLlrMax);
        mu_cv = t.check_extrinsic(mu_vc, &g.check_segs);
        Tape::Id s2 = t.scatter_cols_sum(mu_cv, vn_map, n);
        l_hat = t.add(l_e, s2);
        Tape::Id pnew = t.sub(l_hat, l_e);
        if (truncate_every > 0 && it % truncate_every == 0 && it < cfg.iterations) {
            prior = t.leaf(t.value(pnew));
            mu_cv = t.leaf(t.value(mu_cv));
        } else {
            prior = pnew;
        }
    }
    out.final_llr = l_hat;
    out.loss = t.axpb(total, 1.0 / double(B), 0.0);
    return out;
}

}  // namespace

UnfoldRx unfold_receiver(Tape& t, const IddConfig& cfg, const DemapperParams& dp,
                         const std::vector<std::vector<cplx>>& y, const std::vector<double>& snr_db,
                         const Mat& codeword_bits, int truncate_every) {
    cfg.validate();
    if (!cfg.neural) throw std::invalid_argument("unfold_receiver: neural demapper required");
    int B = int(y.size()), s = cfg.s();
    if (codeword_bits.rows() != B || codeword_bits.cols() != cfg.graph->n)
        throw std::invalid_argument("unfold_receiver: bits shape must be B x n");
    Mat feat3(B * s, 3);
    for (int f = 0; f < B; ++f)
        for (int j = 0; j < s; ++j) {
            feat3(f * s + j, 0) = y[f][j].real();
            feat3(f * s + j, 1) = y[f][j].imag();
            feat3(f * s + j, 2) = dp.standardize(snr_db[f]);
        }
    UnfoldRx r;
    r.demapper = register_demapper(t, dp);
    UnfoldCore core = unfold_core(t, cfg, r.demapper, t.leaf(std::move(feat3)), codeword_bits, B, truncate_every);
    r.loss = core.loss;
    r.final_llr = core.final_llr;
    r.iter_logits = std::move(core.iter_logits);
    return r;
}

UnfoldAe unfold_autoencoder(Tape& t, const IddConfig& cfg, const MapperParams& mp, const DemapperParams& dp,
                            const Mat& codeword_bits, const std::vector<double>& snr_db, const Mat& noise,
                            int truncate_every) {
    cfg.validate();
    if (!cfg.neural) throw std::invalid_argument("unfold_autoencoder: neural demapper required");
    int B = codeword_bits.rows(), s = cfg.s(), m = cfg.m;
    if (noise.rows() != B * s || noise.cols() != 2)
        throw std::invalid_argument("unfold_autoencoder: noise must be (B*s) x 2");

    UnfoldAe r;
    r.mapper = register_mapper(t, mp);
    r.demapper = register_demapper(t, dp);

    Mat msnr(B, 1);
    for (int f = 0; f < B; ++f) msnr(f, 0) = mp.standardize(snr_db[f]);
    Tape::Id points = mapper_node(t, r.mapper, t.leaf(std::move(msnr)), m);

    std::vector<int> row_of(B * s), col_of(B * s);
    for (int f = 0; f < B; ++f)
        for (int j = 0; j < s; ++j) {
            int k = 0;
            for (int b = 0; b < m; ++b) k = (k << 1) | (int(codeword_bits(f, j * m + b)) & 1);
            row_of[f * s + j] = f;
            col_of[f * s + j] = k;
        }
    r.x = t.select_point(points, std::move(row_of), std::move(col_of));
    Tape::Id ych = t.add(r.x, t.leaf(noise));

    Mat snrcol(B * s, 1);
    for (int f = 0; f < B; ++f)
        for (int j = 0; j < s; ++j) snrcol(f * s + j, 0) = dp.standardize(snr_db[f]);
    Tape::Id feat3 = t.concat_cols(ych, t.leaf(std::move(snrcol)));

    UnfoldCore core = unfold_core(t, cfg, r.demapper, feat3, codeword_bits, B, truncate_every);
    r.loss = core.loss;
    r.final_llr = core.final_llr;
    r.iter_logits = std::move(core.iter_logits);
    return r;
}

}  // namespace bicm
