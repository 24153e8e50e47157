#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "bicm/channel.hpp"
#include "doctest.h"

using namespace bicm;

TEST_CASE("snr_to_n0 instantiations and round trip") {
    CHECK(snr_to_n0(0.0, 0.5, 4) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(snr_to_n0(0.0, 1.0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(snr_to_n0(10.0, 0.5, 2) == doctest::Approx(0.1).epsilon(1e-12));
    for (double snr : {-3.0, 0.0, 2.5, 11.0}) {
        CHECK(n0_to_snr_db(snr_to_n0(snr, 0.5, 4), 0.5, 4) == doctest::Approx(snr).epsilon(1e-12));
    }
    CHECK_THROWS_AS(snr_to_n0(0.0, 0.0, 4), std::invalid_argument);
    CHECK_THROWS_AS(snr_to_n0(0.0, 1.5, 4), std::invalid_argument);
}

TEST_CASE("awgn: moments, determinism, small-noise limit, errors") {
    const long n = 1000000;
    std::vector<cplx> x(n, cplx(0, 0));
    Rng rng = frame_rng(9, 0);
    std::vector<cplx> y = awgn(x, 0.5, rng);
    double p = 0.0, re_mean = 0.0, im_mean = 0.0, cross = 0.0;
    for (const cplx& v : y) {
        p += std::norm(v);
        re_mean += v.real();
        im_mean += v.imag();
        cross += v.real() * v.imag();
    }
    p /= n;
    // E|y|^2 = 0.5; estimator sd = n0/sqrt(n) (|y|^2 is exponential)
    CHECK(std::abs(p - 0.5) < 3.0 * 0.5 / std::sqrt(double(n)));
    CHECK(std::abs(re_mean / n) < 3.0 * std::sqrt(0.25 / n));
    CHECK(std::abs(im_mean / n) < 3.0 * std::sqrt(0.25 / n));
    // independence of the two real dimensions
    CHECK(std::abs(cross / n) < 4.0 * 0.25 / std::sqrt(double(n)));

    // adjacent-sample independence: empirical cross-covariance of re parts
    double lag = 0.0;
    for (long i = 0; i + 1 < n; ++i) lag += y[i].real() * y[i + 1].real();
    CHECK(std::abs(lag / (n - 1)) < 4.0 * 0.25 / std::sqrt(double(n)));

    Rng r1 = frame_rng(9, 0), r2 = frame_rng(9, 0);
    std::vector<cplx> a = awgn(x, 0.5, r1), b = awgn(x, 0.5, r2);
    CHECK(a == b);

    std::vector<cplx> sig{cplx(1, -1), cplx(0.5, 0.25)};
    Rng r3(1);
    std::vector<cplx> tiny = awgn(sig, 1e-30, r3);
    for (size_t i = 0; i < sig.size(); ++i) CHECK(std::abs(tiny[i] - sig[i]) < 1e-12);

    CHECK_THROWS_AS(awgn(sig, 0.0, r3), std::invalid_argument);
    CHECK_THROWS_AS(awgn(sig, -1.0, r3), std::invalid_argument);
}

TEST_CASE("black box: composition identity, phase rotation, tanh Taylor") {
    std::vector<cplx> x{cplx(0.3, -0.2), cplx(-1.0, 0.7), cplx(0.05, 0.0)};

    // empty stage list + final AWGN(n0) == awgn(x, n0)
    BlackBoxChannel empty;
    Rng ra = frame_rng(4, 1), rb = frame_rng(4, 1);
    CHECK(empty.apply(x, 0.3, ra) == awgn(x, 0.3, rb));

    BlackBoxChannel rot;
    rot.stages.push_back({ChannelStage::Kind::phase_rotation, M_PI});
    Rng rc = frame_rng(4, 2);
    std::vector<cplx> yr = rot.apply(x, 1e-20, rc);
    for (size_t i = 0; i < x.size(); ++i) CHECK(std::abs(yr[i] + x[i]) < 1e-9);

    BlackBoxChannel th;
    th.stages.push_back({ChannelStage::Kind::tanh_amam, 0.0});
    std::vector<cplx> small{cplx(0.01, 0.0), cplx(0.0, -0.008), cplx(0.006, 0.004)};
    Rng rd = frame_rng(4, 3);
    std::vector<cplx> yt = th.apply(small, 1e-30, rd);
    for (size_t i = 0; i < small.size(); ++i) {
        // tanh(r)/r = 1 - r^2/3 + O(r^4)
        double r2 = std::norm(small[i]);
        CHECK(std::abs(yt[i] - small[i] * (1.0 - r2 / 3.0)) < 1e-8);
    }

    BlackBoxChannel cubic = BlackBoxChannel::default_impairments();
    Rng re = frame_rng(4, 4);
    std::vector<cplx> yc = cubic.apply({cplx(1.0, 0.0)}, 1e-30, re);
    // cubic compresses then rotates by 0.1 rad
    CHECK(std::abs(yc[0]) == doctest::Approx(0.95).epsilon(1e-9));
    CHECK(std::arg(yc[0]) == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("stage parsing") {
    ChannelStage s = parse_stage("cubic_amam", 0.07);
    CHECK(s.kind == ChannelStage::Kind::cubic_amam);
    CHECK(s.param == doctest::Approx(0.07));
    CHECK_THROWS_AS(parse_stage("warp", 1.0), std::invalid_argument);
}
