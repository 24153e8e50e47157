#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "bicm/nn.hpp"
#include "bicm/tape.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace bicm;
using bicm::test::gradcheck;
using bicm::test::random_mat;

TEST_CASE("dense forward identity and relu") {
    Tape t;
    Mat w(2, 2, {1, 0, 0, 1});
    Mat b(1, 2, {0, 0});
    Mat x(1, 2, {1, -2});
    Tape::Id y = t.dense(t.leaf(x), t.leaf(w), t.leaf(b), Act::linear);
    CHECK(t.value(y)(0, 0) == doctest::Approx(1.0));
    CHECK(t.value(y)(0, 1) == doctest::Approx(-2.0));

    Tape::Id r = t.relu(t.leaf(Mat(1, 2, {-1, 3})));
    CHECK(t.value(r)(0, 0) == 0.0);
    CHECK(t.value(r)(0, 1) == 3.0);
}

TEST_CASE("dense layer jacobian vs finite differences, 3x3") {
    Rng rng(42);
    Mat w = random_mat(3, 3, rng), b = random_mat(1, 3, rng), x = random_mat(1, 3, rng);
    // row o of the jacobian via unit cotangents: check loss = sum(mask*y)
    for (int o = 0; o < 3; ++o) {
        Mat mask(1, 3);
        mask(0, o) = 1.0;
        double worst = gradcheck({x, w, b}, [&](Tape& t, const std::vector<Tape::Id>& ids) {
            Tape::Id y = t.dense(ids[0], ids[1], ids[2], Act::tanh);
            return t.sum_all(t.mul(y, t.leaf(mask)));
        });
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("sigmoid derivative at zero is 0.25") {
    Tape t;
    Tape::Id x = t.leaf(Mat::scalar(0.0));
    Tape::Id y = t.sigmoid(x);
    t.backward(y);
    CHECK(t.grad(x)[0] == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("two identity affine layers pass the upstream gradient through") {
    Tape t;
    Mat w(2, 2, {1, 0, 0, 1}), b(1, 2);
    Tape::Id x = t.leaf(Mat(1, 2, {0.3, -0.7}));
    Tape::Id h = t.dense(x, t.leaf(w), t.leaf(b), Act::linear);
    Tape::Id y = t.dense(h, t.leaf(w), t.leaf(b), Act::linear);
    Mat cot(1, 2, {2.5, -1.5});
    Tape::Id loss = t.sum_all(t.mul(y, t.leaf(cot)));
    t.backward(loss);
    CHECK(t.grad(x)(0, 0) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(t.grad(x)(0, 1) == doctest::Approx(-1.5).epsilon(1e-15));
}

TEST_CASE("atanh_clamped values") {
    Tape t;
    Tape::Id a = t.atanh_clamped(t.leaf(Mat(1, 3, {0.0, std::tanh(2.0), 1.0})));
    CHECK(t.value(a)(0, 0) == 0.0);
    CHECK(t.value(a)(0, 1) == doctest::Approx(2.0).epsilon(1e-12));
    double capped = t.value(a)(0, 2);
    CHECK(std::isfinite(capped));
    CHECK(capped == doctest::Approx(std::atanh(1.0 - kAtanhClip)));
    // monotone below the clip
    Tape::Id b = t.atanh_clamped(t.leaf(Mat(1, 2, {0.999, 0.9999})));
    CHECK(t.value(b)(0, 0) < t.value(b)(0, 1));
}

TEST_CASE("gradcheck: elementwise and reduction primitives") {
    Rng rng(7);
    Mat a = random_mat(2, 3, rng, 0.1, 0.9);
    Mat b = random_mat(2, 3, rng, 0.2, 0.8);

    auto scalarize = [](Tape& t, Tape::Id x, const Mat& mask) { return t.sum_all(t.mul(x, t.leaf(mask))); };
    Mat mask = random_mat(2, 3, rng, 0.5, 1.5);

    auto check1 = [&](const std::function<Tape::Id(Tape&, Tape::Id)>& op, Mat in) {
        double worst = gradcheck({in}, [&](Tape& t, const std::vector<Tape::Id>& ids) {
            return scalarize(t, op(t, ids[0]), mask);
        });
        CHECK(worst < 1e-6);
    };

    check1([](Tape& t, Tape::Id x) { return t.relu(x); }, a);                        // values > 0.1, off the kink
    check1([](Tape& t, Tape::Id x) { return t.sigmoid(x); }, a);
    check1([](Tape& t, Tape::Id x) { return t.tanh_(x); }, a);
    check1([](Tape& t, Tape::Id x) { return t.atanh_clamped(x); }, a);
    check1([](Tape& t, Tape::Id x) { return t.log_(x); }, a);
    check1([](Tape& t, Tape::Id x) { return t.exp_(x); }, a);
    check1([](Tape& t, Tape::Id x) { return t.neg(x); }, a);
    check1([](Tape& t, Tape::Id x) { return t.pow_const(x, -0.5); }, a);
    check1([](Tape& t, Tape::Id x) { return t.axpb(x, 2.5, -1.0); }, a);
    check1([](Tape& t, Tape::Id x) { return t.clamp(x, -0.95, 0.95); }, a);          // interior points only

    double worst2 = gradcheck({a, b}, [&](Tape& t, const std::vector<Tape::Id>& ids) {
        return scalarize(t, t.mul(t.add(ids[0], ids[1]), t.sub(ids[0], ids[1])), mask);
    });
    CHECK(worst2 < 1e-6);

    double worst3 = gradcheck({a}, [&](Tape& t, const std::vector<Tape::Id>& ids) {
        return t.mean_all(ids[0]);
    });
    CHECK(worst3 < 1e-6);

    double worst4 = gradcheck({a, Mat::scalar(0.7)}, [&](Tape& t, const std::vector<Tape::Id>& ids) {
        return scalarize(t, t.mul_scalar(ids[0], ids[1]), mask);
    });
    CHECK(worst4 < 1e-6);
}

TEST_CASE("gradcheck: structural primitives") {
    Rng rng(11);
    Mat a = random_mat(2, 4, rng), b = random_mat(2, 2, rng);
    Mat mask6 = random_mat(2, 6, rng, 0.5, 1.5), mask2 = random_mat(2, 2, rng, 0.5, 1.5);
    Mat mask42 = random_mat(4, 2, rng, 0.5, 1.5);

    double w1 = gradcheck({a, b}, [&](Tape& t, const std::vector<Tape::Id>& ids) {
        return t.sum_all(t.mul(t.concat_cols(ids[0], ids[1]), t.leaf(mask6)));
    });
    CHECK(w1 < 1e-6);

    double w2 = gradcheck({a}, [&](Tape& t, const std::vector<Tape::Id>& ids) {
        return t.sum_all(t.mul(t.slice_cols(ids[0], 1, 3), t.leaf(mask2)));
    });
    CHECK(w2 < 1e-6);

    double w3 = gradcheck({a}, [&](Tape& t, const std::vector<Tape::Id>& ids) {
        return t.sum_all(t.mul(t.reshape(ids[0], 4, 2), t.leaf(mask42)));
    });
    CHECK(w3 < 1e-6);

    // select_point with repeated rows exercises adjoint accumulation
    Mat pts = random_mat(2, 8, rng);
    Mat mask32 = random_mat(3, 2, rng, 0.5, 1.5);
    double w4 = gradcheck({pts}, [&](Tape& t, const std::vector<Tape::Id>& ids) {
        return t.sum_all(t.mul(t.select_point(ids[0], {0, 1, 0}, {2, 0, 2}), t.leaf(mask32)));
    });
    CHECK(w4 < 1e-6);

    std::vector<int> map{0, 2, 1, 1, 3};
    Mat e = random_mat(2, 5, rng);
    Mat mask5 = random_mat(2, 5, rng, 0.5, 1.5), mask4 = random_mat(2, 4, rng, 0.5, 1.5);
    double w5 = gradcheck({a}, [&](Tape& t, const std::vector<Tape::Id>& ids) {
        return t.sum_all(t.mul(t.gather_cols(ids[0], map), t.leaf(mask5)));
    });
    CHECK(w5 < 1e-6);
    double w6 = gradcheck({e}, [&](Tape& t, const std::vector<Tape::Id>& ids) {
        return t.sum_all(t.mul(t.scatter_cols_sum(ids[0], map, 4), t.leaf(mask4)));
    });
    CHECK(w6 < 1e-6);
}

TEST_CASE("gradcheck: normalize_rows, check_extrinsic, losses, dense acts") {
    Rng rng(13);
    Mat pts = random_mat(2, 8, rng, 0.2, 1.0);
    Mat mask8 = random_mat(2, 8, rng, 0.5, 1.5);
    double w1 = gradcheck({pts}, [&](Tape& t, const std::vector<Tape::Id>& ids) {
        return t.sum_all(t.mul(t.normalize_rows(ids[0], 4.0), t.leaf(mask8)));
    });
    CHECK(w1 < 1e-6);

    CheckSegments segs;
    segs.offsets = {0, 3, 7};
    Mat mu = random_mat(2, 7, rng, -2.0, 2.0);
    Mat mask7 = random_mat(2, 7, rng, 0.5, 1.5);
    double w2 = gradcheck({mu}, [&](Tape& t, const std::vector<Tape::Id>& ids) {
        return t.sum_all(t.mul(t.check_extrinsic(ids[0], &segs), t.leaf(mask7)));
    });
    CHECK(w2 < 1e-6);

    Mat logits = random_mat(3, 4, rng, -2.0, 2.0);
    Mat bits(3, 4);
    for (size_t i = 0; i < bits.size(); ++i) bits[i] = double(rng.coin());
    double w3 = gradcheck({logits}, [&](Tape& t, const std::vector<Tape::Id>& ids) {
        return t.bce_logits(ids[0], bits);
    });
    CHECK(w3 < 1e-6);

    double w4 = gradcheck({logits}, [&](Tape& t, const std::vector<Tape::Id>& ids) {
        return t.softmax_ce(ids[0], {1, 3, 0});
    });
    CHECK(w4 < 1e-6);

    for (Act act : {Act::linear, Act::relu, Act::sigmoid, Act::tanh}) {
        Mat x = random_mat(3, 4, rng, 0.1, 1.0);
        Mat w = random_mat(2, 4, rng, 0.1, 0.8), b = random_mat(1, 2, rng, 0.1, 0.5);
        Mat mask = random_mat(3, 2, rng, 0.5, 1.5);
        double worst = gradcheck({x, w, b}, [&](Tape& t, const std::vector<Tape::Id>& ids) {
            return t.sum_all(t.mul(t.dense(ids[0], ids[1], ids[2], act), t.leaf(mask)));
        });
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("backward twice yields bit-identical adjoints; recompute matches") {
    Rng rng(17);
    Mat x = random_mat(3, 5, rng), w = random_mat(4, 5, rng), b = random_mat(1, 4, rng);
    Mat bits(3, 4);
    for (size_t i = 0; i < bits.size(); ++i) bits[i] = double(rng.coin());
    Tape t;
    Tape::Id xi = t.leaf(x), wi = t.leaf(w), bi = t.leaf(b);
    Tape::Id y = t.dense(xi, wi, bi, Act::tanh);
    Tape::Id loss = t.bce_logits(y, bits);
    t.backward(loss);
    Mat g1 = t.grad(wi), gx1 = t.grad(xi);
    t.backward(loss);
    CHECK(t.grad(wi) == g1);
    CHECK(t.grad(xi) == gx1);
    CHECK(t.recompute_matches());
}

TEST_CASE("error paths: non-scalar loss and dimension mismatches rejected") {
    Tape t;
    Tape::Id a = t.leaf(Mat(2, 2));
    CHECK_THROWS_AS(t.backward(a), std::invalid_argument);
    CHECK_THROWS_AS(t.add(a, t.leaf(Mat(2, 3))), std::invalid_argument);
    Mat w(3, 4), b(1, 3);
    CHECK_THROWS_AS(t.dense(a, t.leaf(w), t.leaf(b), Act::linear), std::invalid_argument);
}
