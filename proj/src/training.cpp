#include "bicm/training.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bicm {

namespace {

void write_hex(std::ostream& os, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%a", v);
    os << buf;
}

void write_layer(std::ostream& os, const std::string& name, const DenseLayer& l) {
    os << "layer " << name << " " << int(l.act) << " " << l.out() << " " << l.in() << "\n";
    for (int r = 0; r < l.w.rows(); ++r) {
        for (int c = 0; c < l.w.cols(); ++c) {
            if (c) os << " ";
            write_hex(os, l.w(r, c));
        }
        os << "\n";
    }
    for (int c = 0; c < l.b.cols(); ++c) {
        if (c) os << " ";
        write_hex(os, l.b(0, c));
    }
    os << "\n";
}

DenseLayer read_layer(std::istream& is, const std::string& expect_name) {
    std::string tag, name;
    int act, out, in;
    is >> tag >> name >> act >> out >> in;
    if (tag != "layer" || name != expect_name) throw std::runtime_error("checkpoint: expected layer " + expect_name);
    DenseLayer l;
    l.act = Act(act);
    l.w = Mat(out, in);
    l.b = Mat(1, out);
    for (size_t i = 0; i < l.w.size(); ++i) {
        std::string s;
        is >> s;
        l.w[i] = std::strtod(s.c_str(), nullptr);
    }
    for (size_t i = 0; i < l.b.size(); ++i) {
        std::string s;
        is >> s;
        l.b[i] = std::strtod(s.c_str(), nullptr);
    }
    return l;
}

}  // namespace

void save_checkpoint(const ParameterSet& ps, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << "bicmlab-checkpoint v" << ps.version << "\n";
    f << "m " << ps.m << "\n";
    f << "snr_mid ";
    write_hex(f, ps.snr_mid);
    f << "\n";
    f << "has_mapper " << int(ps.has_mapper) << "\n";
    f << "demapper_prior_inputs " << int(ps.demapper.prior_inputs) << "\n";
    if (ps.has_mapper) {
        write_layer(f, "mapper.l1", ps.mapper.l1);
        write_layer(f, "mapper.l2", ps.mapper.l2);
    }
    write_layer(f, "demapper.l1", ps.demapper.l1);
    write_layer(f, "demapper.l2", ps.demapper.l2);
    write_layer(f, "demapper.l3", ps.demapper.l3);
    std::istringstream echo(ps.config_echo);
    std::string line;
    int nlines = 0;
    std::vector<std::string> lines;
    while (std::getline(echo, line)) {
        lines.push_back(line);
        ++nlines;
    }
    f << "config_echo " << nlines << "\n";
    for (const auto& ln : lines) f << ln << "\n";
}

ParameterSet load_checkpoint(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::string magic, ver;
    f >> magic >> ver;
    if (magic != "bicmlab-checkpoint" || ver != "v1") throw std::runtime_error("checkpoint: bad header in " + path);
    ParameterSet ps;
    std::string key, sval;
    f >> key >> ps.m;
    if (key != "m") throw std::runtime_error("checkpoint: expected m");
    f >> key >> sval;
    if (key != "snr_mid") throw std::runtime_error("checkpoint: expected snr_mid");
    ps.snr_mid = std::strtod(sval.c_str(), nullptr);
    int hm = 0, pin = 0;
    f >> key >> hm;
    f >> key >> pin;
    ps.has_mapper = hm != 0;
    if (ps.has_mapper) {
        ps.mapper.m = ps.m;
        ps.mapper.snr_mid = ps.snr_mid;
        ps.mapper.l1 = read_layer(f, "mapper.l1");
        ps.mapper.l2 = read_layer(f, "mapper.l2");
    }
    ps.demapper.m = ps.m;
    ps.demapper.snr_mid = ps.snr_mid;
    ps.demapper.prior_inputs = pin != 0;
    ps.demapper.l1 = read_layer(f, "demapper.l1");
    ps.demapper.l2 = read_layer(f, "demapper.l2");
    ps.demapper.l3 = read_layer(f, "demapper.l3");
    f >> key;
    int nlines = 0;
    f >> nlines;
    std::string line;
    std::getline(f, line);
    std::ostringstream echo;
    for (int i = 0; i < nlines; ++i) {
        std::getline(f, line);
        echo << line << "\n";
    }
    ps.config_echo = echo.str();
    return ps;
}

Adam::Adam(std::vector<Mat*> params, double beta1, double beta2, double eps)
    : params_(std::move(params)), b1_(beta1), b2_(beta2), eps_(eps) {
    for (Mat* p : params_) {
        m1_.emplace_back(p->rows(), p->cols());
        m2_.emplace_back(p->rows(), p->cols());
    }
}

void Adam::step(const std::vector<Mat>& grads, double lr) {
    if (grads.size() != params_.size()) throw std::invalid_argument("Adam::step: gradient count mismatch");
    ++t_;
    double c1 = 1.0 - std::pow(b1_, double(t_));
    double c2 = 1.0 - std::pow(b2_, double(t_));
    for (size_t i = 0; i < params_.size(); ++i) {
        Mat& p = *params_[i];
        const Mat& g = grads[i];
        if (!p.same_shape(g)) throw std::invalid_argument("Adam::step: gradient shape mismatch");
        for (size_t j = 0; j < p.size(); ++j) {
            m1_[i][j] = b1_ * m1_[i][j] + (1.0 - b1_) * g[j];
            m2_[i][j] = b2_ * m2_[i][j] + (1.0 - b2_) * g[j] * g[j];
            double mhat = m1_[i][j] / c1;
            double vhat = m2_[i][j] / c2;
            p[j] -= lr * mhat / (std::sqrt(vhat) + eps_);
        }
    }
}

std::vector<Mat*> mapper_param_list(MapperParams& p) { return {&p.l1.w, &p.l1.b, &p.l2.w, &p.l2.b}; }

std::vector<Mat*> demapper_param_list(DemapperParams& p) {
    return {&p.l1.w, &p.l1.b, &p.l2.w, &p.l2.b, &p.l3.w, &p.l3.b};
}

std::vector<Tape::Id> mapper_id_list(const MapperIds& ids) {
    return {ids.l1.w, ids.l1.b, ids.l2.w, ids.l2.b};
}

std::vector<Tape::Id> demapper_id_list(const DemapperIds& ids) {
    return {ids.l1.w, ids.l1.b, ids.l2.w, ids.l2.b, ids.l3.w, ids.l3.b};
}

std::vector<Mat> collect_grads(const Tape& t, const std::vector<Tape::Id>& ids) {
    std::vector<Mat> g;
    g.reserve(ids.size());
    for (Tape::Id id : ids) g.push_back(t.grad(id));
    return g;
}

double lr_schedule(double lr_start, double lr_end, int64_t step, int64_t total) {
    if (total <= 1) return lr_start;
    double frac = double(step) / double(total - 1);
    return lr_start * std::pow(lr_end / lr_start, frac);
}

namespace {

void check_divergence(double loss, double uniform_loss, int step, int total) {
    if (step > total / 10 && loss > 1.1 * uniform_loss + 0.1) {
        throw std::runtime_error("training diverged: loss " + std::to_string(loss) + " above the uniform level " +
                                 std::to_string(uniform_loss) + " at step " + std::to_string(step));
    }
}

}  // namespace

ParameterSet train_bitwise_ae(const TrainConfig& cfg) {
    if (cfg.batch < 1) throw std::invalid_argument("train_bitwise_ae: batch must be >= 1");
    Rng init_rng(mix64(cfg.seed));
    ParameterSet ps;
    ps.m = cfg.m;
    ps.snr_mid = cfg.snr_mid();
    ps.has_mapper = true;
    ps.mapper = make_mapper(cfg.m, ps.snr_mid, init_rng);
    ps.demapper = make_bitwise_demapper(cfg.m, ps.snr_mid, init_rng, cfg.hidden);

    auto mparams = mapper_param_list(ps.mapper);
    auto dparams = demapper_param_list(ps.demapper);
    std::vector<Mat*> all = mparams;
    all.insert(all.end(), dparams.begin(), dparams.end());
    Adam opt(all);

    int B = cfg.batch, m = cfg.m;
    for (int step = 0; step < cfg.steps; ++step) {
        Rng rng = frame_rng(cfg.seed, uint64_t(step) + 1);
        Mat bits(B, m);
        Mat msnr(B, 1), dsnr(B, 1), noise(B, 2);
        std::vector<int> row_of(B), col_of(B);
        for (int i = 0; i < B; ++i) {
            int k = 0;
            for (int j = 0; j < m; ++j) {
                int b = int(rng.coin());
                bits(i, j) = b;
                k = (k << 1) | b;
            }
            double snr = rng.uniform(cfg.snr_lo, cfg.snr_hi);
            double n0 = snr_to_n0(snr, cfg.rate, m);
            double sd = std::sqrt(n0 / 2.0);
            noise(i, 0) = sd * rng.gaussian();
            noise(i, 1) = sd * rng.gaussian();
            msnr(i, 0) = ps.mapper.standardize(snr);
            dsnr(i, 0) = ps.demapper.standardize(snr);
            row_of[i] = i;
            col_of[i] = k;
        }
        Tape t;
        MapperIds mids = register_mapper(t, ps.mapper);
        DemapperIds dids = register_demapper(t, ps.demapper);
        Tape::Id points = mapper_node(t, mids, t.leaf(msnr), m);
        Tape::Id x = t.select_point(points, row_of, col_of);
        Tape::Id y = t.add(x, t.leaf(noise));
        Tape::Id feats = t.concat_cols(t.concat_cols(y, t.leaf(dsnr)), t.leaf(Mat(B, m)));
        Tape::Id logits = demapper_node(t, dids, feats);
        Tape::Id loss = t.axpb(t.bce_logits(logits, bits), 1.0 / B, 0.0);
        t.backward(loss);
        check_divergence(t.value(loss)[0], m * std::log(2.0), step, cfg.steps);
        auto ids = mapper_id_list(mids);
        auto did = demapper_id_list(dids);
        ids.insert(ids.end(), did.begin(), did.end());
        opt.step(collect_grads(t, ids), lr_schedule(cfg.lr_start, cfg.lr_end, step, cfg.steps));
    }
    return ps;
}

ParameterSet train_symbolwise_ae(const TrainConfig& cfg) {
    if (cfg.batch < 1) throw std::invalid_argument("train_symbolwise_ae: batch must be >= 1");
    Rng init_rng(mix64(cfg.seed));
    ParameterSet ps;
    ps.m = cfg.m;
    ps.snr_mid = cfg.snr_mid();
    ps.has_mapper = true;
    ps.mapper = make_mapper(cfg.m, ps.snr_mid, init_rng);
    ps.demapper = make_symbolwise_demapper(cfg.m, ps.snr_mid, init_rng, cfg.hidden);

    auto mparams = mapper_param_list(ps.mapper);
    auto dparams = demapper_param_list(ps.demapper);
    std::vector<Mat*> all = mparams;
    all.insert(all.end(), dparams.begin(), dparams.end());
    Adam opt(all);

    int B = cfg.batch, m = cfg.m;
    for (int step = 0; step < cfg.steps; ++step) {
        Rng rng = frame_rng(cfg.seed, uint64_t(step) + 1);
        Mat msnr(B, 1), dsnr(B, 1), noise(B, 2);
        std::vector<int> row_of(B), col_of(B), labels(B);
        for (int i = 0; i < B; ++i) {
            int k = int(rng.below(1ULL << m));
            double snr = rng.uniform(cfg.snr_lo, cfg.snr_hi);
            double n0 = snr_to_n0(snr, cfg.rate, m);
            double sd = std::sqrt(n0 / 2.0);
            noise(i, 0) = sd * rng.gaussian();
            noise(i, 1) = sd * rng.gaussian();
            msnr(i, 0) = ps.mapper.standardize(snr);
            dsnr(i, 0) = ps.demapper.standardize(snr);
            row_of[i] = i;
            col_of[i] = k;
            labels[i] = k;
        }
        Tape t;
        MapperIds mids = register_mapper(t, ps.mapper);
        DemapperIds dids = register_demapper(t, ps.demapper);
        Tape::Id points = mapper_node(t, mids, t.leaf(msnr), m);
        Tape::Id x = t.select_point(points, row_of, col_of);
        Tape::Id y = t.add(x, t.leaf(noise));
        Tape::Id feats = t.concat_cols(y, t.leaf(dsnr));
        Tape::Id logits = demapper_node(t, dids, feats);
        Tape::Id loss = t.axpb(t.softmax_ce(logits, labels), 1.0 / B, 0.0);
        t.backward(loss);
        check_divergence(t.value(loss)[0], m * std::log(2.0), step, cfg.steps);
        auto ids = mapper_id_list(mids);
        auto did = demapper_id_list(dids);
        ids.insert(ids.end(), did.begin(), did.end());
        opt.step(collect_grads(t, ids), lr_schedule(cfg.lr_start, cfg.lr_end, step, cfg.steps));
    }
    return ps;
}

namespace {

std::vector<uint8_t> random_codeword(const Gf2Encoder& enc, Rng& rng) {
    std::vector<uint8_t> info(enc.k());
    for (auto& b : info) b = uint8_t(rng.coin());
    return enc.encode(info);
}

}  // namespace

ParameterSet idd_train(const IddTrainConfig& tcfg) {
    const TrainConfig& cfg = tcfg.base;
    if (!tcfg.graph) throw std::invalid_argument("idd_train: graph not set");
    if (cfg.batch < 1) throw std::invalid_argument("idd_train: batch must be >= 1");
    Gf2Encoder enc(*tcfg.graph);
    ParameterSet ps;
    if (tcfg.warm_start) {
        ps = *tcfg.warm_start;
        if (!ps.has_mapper || ps.m != cfg.m) throw std::invalid_argument("idd_train: incompatible warm start");
    } else {
        Rng init_rng(mix64(cfg.seed));
        ps.m = cfg.m;
        ps.snr_mid = cfg.snr_mid();
        ps.has_mapper = true;
        ps.mapper = make_mapper(cfg.m, ps.snr_mid, init_rng);
        ps.demapper = make_bitwise_demapper(cfg.m, ps.snr_mid, init_rng, cfg.hidden);
    }

    IddConfig icfg;
    icfg.graph = tcfg.graph;
    icfg.m = cfg.m;
    icfg.iterations = tcfg.iterations;
    icfg.neural = &ps.demapper;
    icfg.validate();

    auto mparams = mapper_param_list(ps.mapper);
    auto dparams = demapper_param_list(ps.demapper);
    std::vector<Mat*> all = mparams;
    all.insert(all.end(), dparams.begin(), dparams.end());
    Adam opt(all);

    int B = cfg.batch, m = cfg.m, n = tcfg.graph->n, s = n / m;
    for (int step = 0; step < cfg.steps; ++step) {
        Rng rng = frame_rng(cfg.seed, uint64_t(step) + 1);
        Mat bits(B, n), noise(B * s, 2);
        std::vector<double> snrs(B);
        for (int f = 0; f < B; ++f) {
            std::vector<uint8_t> cw = random_codeword(enc, rng);
            for (int j = 0; j < n; ++j) bits(f, j) = cw[j];
            snrs[f] = rng.uniform(cfg.snr_lo, cfg.snr_hi);
            double sd = std::sqrt(snr_to_n0(snrs[f], cfg.rate, m) / 2.0);
            for (int j = 0; j < s; ++j) {
                noise(f * s + j, 0) = sd * rng.gaussian();
                noise(f * s + j, 1) = sd * rng.gaussian();
            }
        }
        Tape t;
        UnfoldAe u = unfold_autoencoder(t, icfg, ps.mapper, ps.demapper, bits, snrs, noise, tcfg.truncate_every);
        t.backward(u.loss);
        check_divergence(t.value(u.loss)[0] / (tcfg.iterations * n), std::log(2.0), step, cfg.steps);
        auto ids = mapper_id_list(u.mapper);
        auto did = demapper_id_list(u.demapper);
        ids.insert(ids.end(), did.begin(), did.end());
        opt.step(collect_grads(t, ids), lr_schedule(cfg.lr_start, cfg.lr_end, step, cfg.steps));
    }
    return ps;
}

void PerturbConfig::validate() const {
    auto ok = [](double s2) { return s2 > 0.0 && s2 < 1.0; };
    if (!ok(sigma2_start) || !ok(sigma2_end))
        throw std::invalid_argument("PerturbConfig: sigma_w^2 must be in (0,1)");
}

double PerturbConfig::sigma2_at(int64_t step, int64_t total) const {
    if (total <= 1) return sigma2_start;
    double f = double(step) / double(total - 1);
    return sigma2_start + f * (sigma2_end - sigma2_start);
}

double rx_train_step(ParameterSet& ps, const AltTrainConfig& cfg, Adam& opt_rx, double lr, Rng& rng) {
    int B = cfg.base.batch;
    if (B < 1) throw std::invalid_argument("rx_train_step: batch must be >= 1");
    Gf2Encoder enc(*cfg.graph);
    int n = cfg.graph->n, m = cfg.base.m, s = n / m;

    IddConfig icfg;
    icfg.graph = cfg.graph;
    icfg.m = m;
    icfg.iterations = cfg.iterations;
    icfg.neural = &ps.demapper;
    icfg.validate();

    Mat bits(B, n);
    std::vector<std::vector<cplx>> ys(B);
    std::vector<double> snrs(B);
    for (int f = 0; f < B; ++f) {
        std::vector<uint8_t> cw = random_codeword(enc, rng);
        for (int j = 0; j < n; ++j) bits(f, j) = cw[j];
        snrs[f] = rng.uniform(cfg.base.snr_lo, cfg.base.snr_hi);
        double n0 = snr_to_n0(snrs[f], cfg.base.rate, m);
        Constellation c = build_constellation(ps.mapper, snrs[f]);
        ys[f] = cfg.channel.apply(modulate(c, cw), n0, rng);
    }
    Tape t;
    UnfoldRx u = unfold_receiver(t, icfg, ps.demapper, ys, snrs, bits);
    t.backward(u.loss);
    opt_rx.step(collect_grads(t, demapper_id_list(u.demapper)), lr);
    return t.value(u.loss)[0];
}

std::vector<Mat> tx_gradient_estimate(const ParameterSet& ps, const AltTrainConfig& cfg, double sigma2, Rng& rng) {
    if (!(sigma2 > 0.0 && sigma2 < 1.0)) throw std::invalid_argument("tx_gradient_estimate: sigma_w^2 not in (0,1)");
    int B = cfg.tx_batch;
    if (B < 1) throw std::invalid_argument("tx_gradient_estimate: batch must be >= 1");
    Gf2Encoder enc(*cfg.graph);
    int n = cfg.graph->n, m = cfg.base.m, s = n / m;

    IddConfig icfg;
    icfg.graph = cfg.graph;
    icfg.m = m;
    icfg.iterations = cfg.iterations;
    icfg.neural = &ps.demapper;
    icfg.validate();

    double keep = std::sqrt(1.0 - sigma2);
    double sw = std::sqrt(sigma2 / 2.0);
    double scale = 2.0 * keep / sigma2;

    Mat msnr(B, 1);
    Mat wmat(B * s, 2);
    std::vector<int> row_of(B * s), col_of(B * s);
    for (int f = 0; f < B; ++f) {
        std::vector<uint8_t> cw = random_codeword(enc, rng);
        double snr = rng.uniform(cfg.base.snr_lo, cfg.base.snr_hi);
        double n0 = snr_to_n0(snr, cfg.base.rate, m);
        msnr(f, 0) = ps.mapper.standardize(snr);
        Constellation c = build_constellation(ps.mapper, snr);
        std::vector<cplx> x = modulate(c, cw);
        std::vector<cplx> w(s);
        for (int j = 0; j < s; ++j) {
            w[j] = cplx(sw * rng.gaussian(), sw * rng.gaussian());
            x[j] = keep * x[j] + w[j];
        }
        std::vector<cplx> y = cfg.channel.apply(x, n0, rng);
        IddTrace trace;
        idd_receive(icfg, y, snr, n0, &trace);
        double ce = idd_loss_of_trace(trace, cw);
        double alpha = scale * ce / double(B);
        for (int j = 0; j < s; ++j) {
            int k = 0;
            for (int b = 0; b < m; ++b) k = (k << 1) | (cw[j * m + b] & 1);
            row_of[f * s + j] = f;
            col_of[f * s + j] = k;
            wmat(f * s + j, 0) = alpha * w[j].real();
            wmat(f * s + j, 1) = alpha * w[j].imag();
        }
    }
    // gradient of sum_r <x_r, alpha_r w_r> w.r.t. mapper parameters
    Tape t;
    MapperIds mids = register_mapper(t, ps.mapper);
    Tape::Id points = mapper_node(t, mids, t.leaf(msnr), m);
    Tape::Id x = t.select_point(points, row_of, col_of);
    Tape::Id loss = t.sum_all(t.mul(x, t.leaf(wmat)));
    t.backward(loss);
    return collect_grads(t, mapper_id_list(mids));
}

double tx_train_step(ParameterSet& ps, const AltTrainConfig& cfg, double sigma2, Adam& opt_tx, double lr, Rng& rng) {
    std::vector<Mat> g = tx_gradient_estimate(ps, cfg, sigma2, rng);
    opt_tx.step(g, lr);
    double norm = 0.0;
    for (const Mat& gm : g)
        for (size_t i = 0; i < gm.size(); ++i) norm += gm[i] * gm[i];
    return std::sqrt(norm);
}

ParameterSet alternating_train(const AltTrainConfig& cfg) {
    cfg.perturb.validate();
    ParameterSet ps;
    if (cfg.warm_start) {
        ps = *cfg.warm_start;
    } else {
        Rng init_rng(mix64(cfg.base.seed));
        ps.m = cfg.base.m;
        ps.snr_mid = cfg.base.snr_mid();
        ps.has_mapper = true;
        ps.mapper = make_mapper(cfg.base.m, ps.snr_mid, init_rng);
        ps.demapper = make_bitwise_demapper(cfg.base.m, ps.snr_mid, init_rng, cfg.base.hidden);
    }
    Adam opt_rx(demapper_param_list(ps.demapper));
    Adam opt_tx(mapper_param_list(ps.mapper));
    int64_t total_rx = int64_t(cfg.rounds) * cfg.rx_steps;
    int64_t total_tx = int64_t(cfg.rounds) * cfg.tx_steps;
    int64_t rx_done = 0, tx_done = 0;
    uint64_t stream = 0;
    for (int round = 0; round < cfg.rounds; ++round) {
        for (int i = 0; i < cfg.rx_steps; ++i, ++rx_done) {
            Rng rng = frame_rng(cfg.base.seed, ++stream);
            rx_train_step(ps, cfg, opt_rx, lr_schedule(cfg.base.lr_start, cfg.base.lr_end, rx_done, total_rx), rng);
        }
        for (int i = 0; i < cfg.tx_steps; ++i, ++tx_done) {
            Rng rng = frame_rng(cfg.base.seed, ++stream);
            double s2 = cfg.perturb.sigma2_at(tx_done, total_tx);
            tx_train_step(ps, cfg, s2, opt_tx, lr_schedule(cfg.base.lr_start, cfg.base.lr_end, tx_done, total_tx), rng);
        }
    }
    return ps;
}

}  // namespace bicm
