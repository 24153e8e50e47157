#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "bicm/demapper.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace bicm;

TEST_CASE("zero-weight demapper emits zero logits (uniform posteriors)") {
    Rng rng(3);
    DemapperParams p = make_bitwise_demapper(2, 0.0, rng, 16);
    p.l3.w.set_zero();
    p.l3.b.set_zero();
    std::vector<double> l = nn_demap(p, cplx(0.4, -0.2), 1.0, {});
    for (double v : l) CHECK(v == 0.0);
}

TEST_CASE("nn demapper gradient w.r.t. prior inputs matches finite differences") {
    Rng rng(21);
    DemapperParams p = make_bitwise_demapper(2, 0.0, rng, 24);
    Mat feats(3, 5);
    for (size_t i = 0; i < feats.size(); ++i) feats[i] = rng.uniform(-1.0, 1.0);
    Mat mask = bicm::test::random_mat(3, 2, rng, 0.5, 1.5);
    double worst = bicm::test::gradcheck({feats, p.l1.w, p.l1.b, p.l2.w, p.l2.b, p.l3.w, p.l3.b},
                                         [&](Tape& t, const std::vector<Tape::Id>& ids) {
                                             DemapperIds d{{ids[1], ids[2]}, {ids[3], ids[4]}, {ids[5], ids[6]}};
                                             return t.sum_all(t.mul(demapper_node(t, d, ids[0]), t.leaf(mask)));
                                         });
    CHECK(worst < 1e-5);
}

TEST_CASE("exact MAP on BPSK with zero prior: l = 4 Re(y)/n0") {
    Constellation bpsk = gray_psk(1);
    for (double yre : {-0.8, -0.1, 0.3, 1.4}) {
        for (double n0 : {0.5, 1.0, 2.0}) {
            std::vector<double> l = map_demap_awgn(bpsk, cplx(yre, 0.37), n0, {});
            CHECK(l[0] == doctest::Approx(4.0 * yre / n0).epsilon(1e-12));
        }
    }
}

TEST_CASE("exact MAP symmetry: y=0 zeroes every bit with mirror-symmetric subsets") {
    // BPSK/QPSK: every bit is a sign bit
    for (int m : {1, 2}) {
        Constellation c = m == 1 ? gray_psk(1) : gray_qam(m);
        std::vector<double> l = map_demap_awgn(c, cplx(0.0, 0.0), 0.7, {});
        for (double v : l) CHECK(std::abs(v) < 1e-12);
    }
    // 16-QAM: bits 0 and 2 are the I/Q sign bits; the magnitude bits are
    // not mirror-symmetric and legitimately keep nonzero LLRs at y=0
    Constellation c16 = gray_qam(4);
    std::vector<double> l = map_demap_awgn(c16, cplx(0.0, 0.0), 0.7, {});
    CHECK(std::abs(l[0]) < 1e-12);
    CHECK(std::abs(l[2]) < 1e-12);
    CHECK(std::abs(l[1]) > 0.1);
    CHECK(std::abs(l[3]) > 0.1);
}

TEST_CASE("sign convention: strong positive Re(y) on BPSK favors bit 0") {
    Constellation bpsk = gray_psk(1);
    std::vector<double> l = map_demap_awgn(bpsk, cplx(2.0, 0.0), 1.0, {});
    CHECK(l[0] > 0.0);
}

TEST_CASE("saturated priors collapse the QPSK sums onto the consistent pair") {
    Constellation c = gray_qam(2);
    cplx y(0.33, -0.91);
    double n0 = 0.8;
    // prior on bit 0 -> +inf selects bit0 = 0; brute-force two-point ratio for bit 1
    std::vector<double> prior{18.0, 0.0};
    std::vector<double> l = map_demap_awgn(c, y, n0, prior);
    double num = std::exp(-std::norm(y - c.points[0]) / n0);   // bits 00
    double den = std::exp(-std::norm(y - c.points[1]) / n0);   // bits 01
    CHECK(l[1] == doctest::Approx(std::log(num / den)).epsilon(1e-6));
}

TEST_CASE("max-stabilized MAP equals naive extended-precision evaluation") {
    Rng rng(77);
    Constellation c = gray_qam(4);
    for (int trial = 0; trial < 50; ++trial) {
        cplx y(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6));
        std::vector<double> prior(4);
        for (double& p : prior) p = rng.uniform(-3.0, 3.0);
        std::vector<double> a = map_demap_awgn(c, y, 0.4, prior);
        std::vector<double> b = map_demap_awgn_naive(c, y, 0.4, prior);
        for (int j = 0; j < 4; ++j) CHECK(a[j] == doctest::Approx(b[j]).epsilon(1e-9));
    }
}

TEST_CASE("MAP output clamps to the LLR cap and rejects bad n0") {
    Constellation bpsk = gray_psk(1);
    std::vector<double> l = map_demap_awgn(bpsk, cplx(50.0, 0.0), 0.1, {});
    CHECK(l[0] == kLlrMax);
    CHECK_THROWS_AS(map_demap_awgn(bpsk, cplx(0, 0), 0.0, {}), std::invalid_argument);
}

TEST_CASE("full posterior includes own prior additively") {
    Constellation c = gray_qam(2);
    cplx y(0.1, 0.2);
    double n0 = 1.0;
    std::vector<double> l0 = map_demap_awgn(c, y, n0, {0.0, 0.0});
    std::vector<double> l1 = map_demap_awgn(c, y, n0, {1.3, 0.0});
    // prior on bit 0 shifts bit 0's posterior by exactly that prior
    CHECK(l1[0] == doctest::Approx(l0[0] + 1.3).epsilon(1e-12));
}
