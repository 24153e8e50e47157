#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "bicm/idd.hpp"
#include "bicm/peg.hpp"
#include "bicm/training.hpp"
#include "test_util.hpp"
#include "doctest.h"

using namespace bicm;

namespace {

TannerGraph toy_code(int n) {
    // small irregular code; (3,6)-regular graphs this small are reliably
    // rank-deficient
    std::vector<int> degs(n);
    for (int i = 0; i < n; ++i) degs[i] = i < n / 2 ? 2 : 3;
    for (uint64_t seed = 1; seed < 64; ++seed) {
        Rng rng(seed);
        TannerGraph g = peg_construct(n, degs, n / 2, rng);
        try {
            Gf2Encoder enc(g);
            return g;
        } catch (const std::exception&) {
        }
    }
    throw std::runtime_error("toy_code: no full-rank construction found");
}

struct ToySystem {
    TannerGraph graph;
    Gf2Encoder enc;
    MapperParams mapper;
    DemapperParams demapper;
    Constellation con;

    explicit ToySystem(int n, int m, uint64_t seed = 11) : graph(toy_code(n)), enc(graph) {
        Rng rng(seed);
        mapper = make_mapper(m, 3.0, rng);
        demapper = make_bitwise_demapper(m, 3.0, rng, 16);
        con = build_constellation(mapper, 3.0);
    }
};

}  // namespace

TEST_CASE("config validation") {
    TannerGraph g = toy_code(12);
    IddConfig cfg;
    cfg.graph = &g;
    cfg.m = 5;  // 12 not divisible by 5
    Rng rng(1);
    DemapperParams dp = make_bitwise_demapper(5, 0.0, rng, 8);
    cfg.neural = &dp;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.m = 2;
    cfg.iterations = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg.iterations = 2;
    CHECK_NOTHROW(cfg.validate());
    cfg.neural = nullptr;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("I=1 neural IDD equals plain demap followed by one BP iteration") {
    ToySystem sys(12, 2);
    IddConfig cfg;
    cfg.graph = &sys.graph;
    cfg.m = 2;
    cfg.iterations = 1;
    cfg.neural = &sys.demapper;

    Rng rng(3);
    std::vector<uint8_t> info(sys.enc.k());
    for (auto& b : info) b = uint8_t(rng.coin());
    std::vector<uint8_t> cw = sys.enc.encode(info);
    double n0 = snr_to_n0(3.0, 0.5, 2);
    std::vector<cplx> y = awgn(modulate(sys.con, cw), n0, rng);

    std::vector<double> idd = idd_receive(cfg, y, 3.0, n0);
    std::vector<double> plain = plain_receive(cfg, y, 3.0, n0, 1);
    CHECK(idd == plain);
}

TEST_CASE("noiseless MAP IDD reproduces the transmitted codeword") {
    ToySystem sys(16, 2);
    Constellation qpsk = gray_qam(2);
    IddConfig cfg;
    cfg.graph = &sys.graph;
    cfg.m = 2;
    cfg.iterations = 3;
    cfg.map_constellation = &qpsk;

    Rng rng(5);
    std::vector<uint8_t> info(sys.enc.k());
    for (auto& b : info) b = uint8_t(rng.coin());
    std::vector<uint8_t> cw = sys.enc.encode(info);
    std::vector<cplx> y = modulate(qpsk, cw);  // no noise
    std::vector<double> llr = idd_receive(cfg, y, 3.0, 1e-6);
    CHECK(hard_decide(llr) == cw);
}

TEST_CASE("extrinsic bookkeeping identities hold at every iteration") {
    ToySystem sys(12, 2);
    IddConfig cfg;
    cfg.graph = &sys.graph;
    cfg.m = 2;
    cfg.iterations = 5;
    cfg.neural = &sys.demapper;

    Rng rng(7);
    std::vector<uint8_t> info(sys.enc.k());
    for (auto& b : info) b = uint8_t(rng.coin());
    std::vector<uint8_t> cw = sys.enc.encode(info);
    double n0 = snr_to_n0(3.0, 0.5, 2);
    std::vector<cplx> y = awgn(modulate(sys.con, cw), n0, rng);

    IddTrace tr;
    idd_receive(cfg, y, 3.0, n0, &tr);
    REQUIRE(int(tr.demap_out.size()) == 5);
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < sys.graph.n; ++j) {
            // line 5: l_E + prior = l ; line 10: l_hat_E + l_E = l_hat
            CHECK(std::abs(tr.demap_ext[i][j] + tr.prior_used[i][j] - tr.demap_out[i][j]) < 1e-12);
            CHECK(std::abs(tr.dec_ext[i][j] + tr.demap_ext[i][j] - tr.dec_out[i][j]) < 1e-12);
        }
    }
    // the prior actually used next iteration is the clamp of the decoder extrinsic
    for (int i = 1; i < 5; ++i)
        for (int j = 0; j < sys.graph.n; ++j)
            CHECK(tr.prior_used[i][j] == clampd(tr.dec_ext[i - 1][j], -kLlrMax, kLlrMax));
}

TEST_CASE("idd loss: zero logits give I*n*log2; saturated MAP logits give ~0") {
    ToySystem sys(12, 2);
    sys.demapper.l3.w.set_zero();
    sys.demapper.l3.b.set_zero();
    IddConfig cfg;
    cfg.graph = &sys.graph;
    cfg.m = 2;
    cfg.iterations = 3;
    cfg.neural = &sys.demapper;

    Rng rng(9);
    std::vector<uint8_t> info(sys.enc.k());
    for (auto& b : info) b = uint8_t(rng.coin());
    std::vector<uint8_t> cw = sys.enc.encode(info);
    double n0 = snr_to_n0(3.0, 0.5, 2);
    std::vector<cplx> y = awgn(modulate(sys.con, cw), n0, rng);
    IddTrace tr;
    idd_receive(cfg, y, 3.0, n0, &tr);
    CHECK(idd_loss_of_trace(tr, cw) == doctest::Approx(3 * 12 * std::log(2.0)).epsilon(1e-12));

    Constellation qpsk = gray_qam(2);
    IddConfig mapcfg;
    mapcfg.graph = &sys.graph;
    mapcfg.m = 2;
    mapcfg.iterations = 3;
    mapcfg.map_constellation = &qpsk;
    std::vector<cplx> clean = modulate(qpsk, cw);
    IddTrace tr2;
    idd_receive(mapcfg, clean, 3.0, 1e-6, &tr2);
    double j = idd_loss_of_trace(tr2, cw);
    CHECK(j > 0.0);
    CHECK(j < 3 * 12 * 1e-8);  // I*n*log(1+e^-Lmax)
}

TEST_CASE("unfolded receiver forward-matches idd_receive exactly (any batch)") {
    ToySystem sys(12, 2);
    IddConfig cfg;
    cfg.graph = &sys.graph;
    cfg.m = 2;
    cfg.iterations = 4;
    cfg.neural = &sys.demapper;

    int B = 3, n = sys.graph.n, s = n / 2;
    Mat bits(B, n);
    std::vector<std::vector<cplx>> ys(B);
    std::vector<double> snrs{2.0, 3.0, 4.5};
    Rng rng(13);
    for (int f = 0; f < B; ++f) {
        std::vector<uint8_t> info(sys.enc.k());
        for (auto& b : info) b = uint8_t(rng.coin());
        std::vector<uint8_t> cw = sys.enc.encode(info);
        for (int j = 0; j < n; ++j) bits(f, j) = cw[j];
        double n0 = snr_to_n0(snrs[f], 0.5, 2);
        Constellation con = build_constellation(sys.mapper, snrs[f]);
        ys[f] = awgn(modulate(con, cw), n0, rng);
    }
    Tape t;
    UnfoldRx u = unfold_receiver(t, cfg, sys.demapper, ys, snrs, bits);
    for (int f = 0; f < B; ++f) {
        double n0 = snr_to_n0(snrs[f], 0.5, 2);
        std::vector<double> ref = idd_receive(cfg, ys[f], snrs[f], n0);
        for (int j = 0; j < n; ++j) {
            double unclamped = t.value(u.final_llr)(f, j);
            CHECK(clampd(unclamped, -kLlrMax, kLlrMax) == ref[j]);
        }
    }
    (void)s;
}

TEST_CASE("unfolded AE forward-matches the eval chain and reaches the mapper") {
    ToySystem sys(12, 2);
    IddConfig cfg;
    cfg.graph = &sys.graph;
    cfg.m = 2;
    cfg.iterations = 2;
    cfg.neural = &sys.demapper;

    int B = 2, n = sys.graph.n, s = n / 2;
    Mat bits(B, n);
    Mat noise(B * s, 2);
    std::vector<double> snrs{2.5, 3.5};
    Rng rng(17);
    std::vector<std::vector<cplx>> ys(B);
    for (int f = 0; f < B; ++f) {
        std::vector<uint8_t> info(sys.enc.k());
        for (auto& b : info) b = uint8_t(rng.coin());
        std::vector<uint8_t> cw = sys.enc.encode(info);
        for (int j = 0; j < n; ++j) bits(f, j) = cw[j];
        double sd = std::sqrt(snr_to_n0(snrs[f], 0.5, 2) / 2.0);
        Constellation con = build_constellation(sys.mapper, snrs[f]);
        std::vector<cplx> x = modulate(con, cw);
        for (int j = 0; j < s; ++j) {
            double nre = sd * rng.gaussian(), nim = sd * rng.gaussian();
            noise(f * s + j, 0) = nre;
            noise(f * s + j, 1) = nim;
            ys[f].push_back(x[j] + cplx(nre, nim));
        }
    }
    Tape t;
    UnfoldAe u = unfold_autoencoder(t, cfg, sys.mapper, sys.demapper, bits, snrs, noise);
    for (int f = 0; f < B; ++f) {
        double n0 = snr_to_n0(snrs[f], 0.5, 2);
        std::vector<double> ref = idd_receive(cfg, ys[f], snrs[f], n0);
        for (int j = 0; j < n; ++j)
            CHECK(clampd(t.value(u.final_llr)(f, j), -kLlrMax, kLlrMax) == ref[j]);
        // transmitted symbols equal the eval-path modulation
        for (int j = 0; j < s; ++j) {
            CHECK(t.value(u.x)(f * s + j, 0) == ys[f][j].real() - noise(f * s + j, 0));
            CHECK(t.value(u.x)(f * s + j, 1) == ys[f][j].imag() - noise(f * s + j, 1));
        }
    }
    t.backward(u.loss);
    double gnorm = 0.0;
    for (Tape::Id id : mapper_id_list(u.mapper))
        for (size_t i = 0; i < t.grad(id).size(); ++i) gnorm += t.grad(id)[i] * t.grad(id)[i];
    CHECK(gnorm > 0.0);
}

TEST_CASE("detached variant: identical forward values, different gradients") {
    ToySystem sys(12, 2);
    IddConfig cfg;
    cfg.graph = &sys.graph;
    cfg.m = 2;
    cfg.iterations = 3;
    cfg.neural = &sys.demapper;

    int B = 2, n = sys.graph.n, s = n / 2;
    Mat bits(B, n);
    Mat noise(B * s, 2);
    std::vector<double> snrs{3.0, 3.0};
    Rng rng(19);
    for (int f = 0; f < B; ++f) {
        std::vector<uint8_t> info(sys.enc.k());
        for (auto& b : info) b = uint8_t(rng.coin());
        std::vector<uint8_t> cw = sys.enc.encode(info);
        for (int j = 0; j < n; ++j) bits(f, j) = cw[j];
        double sd = std::sqrt(snr_to_n0(3.0, 0.5, 2) / 2.0);
        for (int j = 0; j < s; ++j) {
            noise(f * s + j, 0) = sd * rng.gaussian();
            noise(f * s + j, 1) = sd * rng.gaussian();
        }
    }
    Tape t1, t2;
    UnfoldAe full = unfold_autoencoder(t1, cfg, sys.mapper, sys.demapper, bits, snrs, noise, 0);
    UnfoldAe detached = unfold_autoencoder(t2, cfg, sys.mapper, sys.demapper, bits, snrs, noise, 1);
    CHECK(t1.value(full.loss)[0] == t2.value(detached.loss)[0]);
    CHECK(t1.value(full.final_llr) == t2.value(detached.final_llr));
    t1.backward(full.loss);
    t2.backward(detached.loss);
    double diff = 0.0;
    auto ids1 = demapper_id_list(full.demapper), ids2 = demapper_id_list(detached.demapper);
    for (size_t k = 0; k < ids1.size(); ++k)
        for (size_t i = 0; i < t1.grad(ids1[k]).size(); ++i)
            diff = std::max(diff, std::abs(t1.grad(ids1[k])[i] - t2.grad(ids2[k])[i]));
    CHECK(diff > 1e-9);
}

TEST_CASE("loss at I=1 reduces to the non-iterative bit-wise loss") {
    ToySystem sys(12, 2);
    IddConfig cfg;
    cfg.graph = &sys.graph;
    cfg.m = 2;
    cfg.iterations = 1;
    cfg.neural = &sys.demapper;

    Rng rng(23);
    std::vector<uint8_t> info(sys.enc.k());
    for (auto& b : info) b = uint8_t(rng.coin());
    std::vector<uint8_t> cw = sys.enc.encode(info);
    double n0 = snr_to_n0(3.0, 0.5, 2);
    std::vector<cplx> y = awgn(modulate(sys.con, cw), n0, rng);
    IddTrace tr;
    idd_receive(cfg, y, 3.0, n0, &tr);
    // direct bit-wise CE of the demapper outputs with zero prior
    double direct = 0.0;
    for (int j = 0; j < sys.graph.n; ++j)
        direct += softplus((2.0 * cw[j] - 1.0) * tr.demap_out[0][j]);
    CHECK(idd_loss_of_trace(tr, cw) == doctest::Approx(direct).epsilon(1e-15));
}

TEST_CASE("toy unfolded IDD gradient matches finite differences (rel err < 1e-4)") {
    ToySystem sys(12, 2, 31);
    IddConfig cfg;
    cfg.graph = &sys.graph;
    cfg.m = 2;
    cfg.iterations = 2;
    cfg.neural = &sys.demapper;

    int B = 2, n = sys.graph.n, s = n / 2;
    Mat bits(B, n);
    Mat noise(B * s, 2);
    std::vector<double> snrs{3.0, 4.0};
    Rng rng(37);
    for (int f = 0; f < B; ++f) {
        std::vector<uint8_t> info(sys.enc.k());
        for (auto& b : info) b = uint8_t(rng.coin());
        std::vector<uint8_t> cw = sys.enc.encode(info);
        for (int j = 0; j < n; ++j) bits(f, j) = cw[j];
        double sd = std::sqrt(snr_to_n0(snrs[f], 0.5, 2) / 2.0);
        for (int j = 0; j < s; ++j) {
            noise(f * s + j, 0) = sd * rng.gaussian();
            noise(f * s + j, 1) = sd * rng.gaussian();
        }
    }

    Tape t;
    UnfoldAe u = unfold_autoencoder(t, cfg, sys.mapper, sys.demapper, bits, snrs, noise);
    t.backward(u.loss);
    std::vector<Tape::Id> ids = mapper_id_list(u.mapper);
    auto did = demapper_id_list(u.demapper);
    ids.insert(ids.end(), did.begin(), did.end());
    std::vector<Mat> grads = collect_grads(t, ids);

    std::vector<Mat*> params = mapper_param_list(sys.mapper);
    auto dparams = demapper_param_list(sys.demapper);
    params.insert(params.end(), dparams.begin(), dparams.end());

    auto loss_now = [&]() {
        Tape t2;
        UnfoldAe u2 = unfold_autoencoder(t2, cfg, sys.mapper, sys.demapper, bits, snrs, noise);
        return t2.value(u2.loss)[0];
    };
    double h = 1e-5, worst = 0.0;
    for (size_t pi = 0; pi < params.size(); ++pi) {
        Mat& pm = *params[pi];
        for (size_t i = 0; i < pm.size(); i += 7) {  // stride keeps the toy check quick
            double keep = pm[i];
            pm[i] = keep + h;
            double fp = loss_now();
            pm[i] = keep - h;
            double fm = loss_now();
            pm[i] = keep;
            double fd = (fp - fm) / (2.0 * h);
            worst = std::max(worst, bicm::test::rel_err(fd, grads[pi][i]));
        }
    }
    CHECK(worst < 1e-4);
}
