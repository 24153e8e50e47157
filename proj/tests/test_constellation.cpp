#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <bit>
#include <cmath>

#include "bicm/constellation.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace bicm;
using bicm::test::gradcheck;

TEST_CASE("gray baselines: bpsk, qpsk, unit power") {
    Constellation bpsk = gray_psk(1);
    CHECK(bpsk.points[0].real() == doctest::Approx(1.0));
    CHECK(bpsk.points[1].real() == doctest::Approx(-1.0));
    CHECK(bpsk.mean_power() == doctest::Approx(1.0).epsilon(1e-12));

    Constellation qpsk = gray_qam(2);
    double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (const cplx& p : qpsk.points) {
        CHECK(std::abs(p.real()) == doctest::Approx(inv_sqrt2));
        CHECK(std::abs(p.imag()) == doctest::Approx(inv_sqrt2));
    }
    CHECK(qpsk.mean_power() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(gray_fraction(qpsk) == doctest::Approx(1.0));
}

TEST_CASE("16-QAM: every minimum-distance pair differs in exactly one bit") {
    Constellation c = gray_qam(4);
    CHECK(c.mean_power() == doctest::Approx(1.0).epsilon(1e-9));
    auto pairs = min_distance_pairs(c.points);
    CHECK(pairs.size() == 24);  // 4x4 grid adjacencies
    for (auto [k, j] : pairs) CHECK(std::popcount(unsigned(k ^ j)) == 1);
    CHECK_THROWS_AS(gray_qam(3), std::invalid_argument);
}

TEST_CASE("psk gray labeling for every m up to 4") {
    for (int m = 1; m <= 4; ++m) {
        Constellation c = gray_psk(m);
        CHECK(c.mean_power() == doctest::Approx(1.0).epsilon(1e-12));
        int order = 1 << m;
        // neighbors on the circle differ in one bit
        std::vector<int> label_at(order);
        for (int k = 0; k < order; ++k) {
            double ang = std::arg(c.points[k]);
            int pos = int(std::llround(ang / (2.0 * M_PI / order) + order)) % order;
            label_at[pos] = k;
        }
        if (m == 1) continue;
        for (int p = 0; p < order; ++p)
            CHECK(std::popcount(unsigned(label_at[p] ^ label_at[(p + 1) % order])) == 1);
    }
}

TEST_CASE("map_bits conventions") {
    Constellation c = gray_qam(2);
    CHECK(map_bits(c, {0, 0}) == c.points[0]);
    CHECK(map_bits(c, {1, 0}) == c.points[2]);  // big-endian
    CHECK_THROWS_AS(map_bits(c, {1}), std::invalid_argument);
    // bijection
    std::vector<int> seen(4, 0);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) seen[bits_to_index({a, b})]++;
    for (int s : seen) CHECK(s == 1);
}

TEST_CASE("mapper builds normalized constellations and matches a straightline oracle") {
    Rng rng(123);
    int m = 3;
    MapperParams p = make_mapper(m, 5.0, rng);
    Constellation c = build_constellation(p, 10.0);
    CHECK(int(c.points.size()) == 8);
    CHECK(c.mean_power() == doctest::Approx(1.0).epsilon(1e-9));

    // straightline re-implementation of the two affine layers + normalization
    double x = (10.0 - 5.0) / 4.0;
    int width = 1 << (m + 1);
    std::vector<double> h(width), raw(width);
    for (int o = 0; o < width; ++o) {
        double v = p.l1.w(o, 0) * x + p.l1.b(0, o);
        h[o] = v > 0 ? v : 0;
    }
    for (int o = 0; o < width; ++o) {
        double v = p.l2.b(0, o);
        for (int k = 0; k < width; ++k) v += p.l2.w(o, k) * h[k];
        raw[o] = v;
    }
    double q = 0;
    for (double v : raw) q += v * v;
    double s = 1.0 / std::sqrt(q / (1 << m));
    for (int k = 0; k < (1 << m); ++k) {
        CHECK(c.points[k].real() == doctest::Approx(raw[2 * k] * s).epsilon(1e-12));
        CHECK(c.points[k].imag() == doctest::Approx(raw[2 * k + 1] * s).epsilon(1e-12));
    }

    // degenerate raw points: all equal -> normalization forces unit magnitude
    MapperParams pz = p;
    pz.l1.w.set_zero();
    pz.l1.b.set_zero();
    pz.l2.w.set_zero();
    for (int o = 0; o < width; ++o) pz.l2.b(0, o) = (o % 2 == 0) ? 1.0 : 0.0;  // every point 1+0j
    Constellation cz = build_constellation(pz, 0.0);
    for (const cplx& v : cz.points) {
        CHECK(v.real() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(v.imag() == 0.0);
    }
}

TEST_CASE("gradient of |map_bits|^2 w.r.t. mapper params matches finite differences") {
    Rng rng(5);
    int m = 2;
    MapperParams p = make_mapper(m, 0.0, rng);
    std::vector<Mat> leaves{p.l1.w, p.l1.b, p.l2.w, p.l2.b};
    double worst = bicm::test::gradcheck(leaves, [&](Tape& t, const std::vector<Tape::Id>& ids) {
        MapperIds mid{{ids[0], ids[1]}, {ids[2], ids[3]}};
        Mat snr(1, 1, {0.5});
        Tape::Id pts = mapper_node(t, mid, t.leaf(snr), m);
        Tape::Id x = t.select_point(pts, {0}, {2});
        return t.sum_all(t.mul(x, x));
    });
    CHECK(worst < 1e-6);
}

TEST_CASE("heuristic labeling: 2 points, cost never increases, 16-QAM raster reaches Gray") {
    // two points: both labelings cost-equal, identity returned
    std::vector<cplx> two{cplx(1, 0), cplx(-1, 0)};
    auto l2 = heuristic_label(two, 0.5);
    CHECK(l2 == std::vector<int>{0, 1});

    // raster-ordered 16-QAM (labels = raster index, which is not Gray)
    std::vector<cplx> raster;
    for (int r = 0; r < 4; ++r)
        for (int cidx = 0; cidx < 4; ++cidx) raster.emplace_back(2.0 * cidx - 3.0, 2.0 * r - 3.0);
    double n0 = 4.0;  // kernel scale = squared minimum distance
    std::vector<int> start(16);
    for (int i = 0; i < 16; ++i) start[i] = i;
    double q0 = labeling_cost(raster, start, n0);
    std::vector<int> labels = heuristic_label(raster, n0);
    double q1 = labeling_cost(raster, labels, n0);
    CHECK(q1 <= q0);

    Constellation relabeled = apply_labels(raster, labels);
    CHECK(relabeled.m == 4);
    // all minimum-distance pairs end up at Hamming distance 1 (a Gray labeling)
    CHECK(gray_fraction(relabeled) == doctest::Approx(1.0));
}

TEST_CASE("apply_labels permutes points by label") {
    std::vector<cplx> pts{cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
    std::vector<int> labels{2, 0, 3, 1};
    Constellation c = apply_labels(pts, labels);
    CHECK(c.points[2] == pts[0]);
    CHECK(c.points[0] == pts[1]);
    CHECK(c.points[3] == pts[2]);
    CHECK(c.points[1] == pts[3]);
}
