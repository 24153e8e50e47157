#include "bicm/constellation.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace bicm {

double Constellation::mean_power() const {
    double s = 0.0;
    for (const cplx& p : points) s += std::norm(p);
    return s / double(points.size());
}

int bits_to_index(const std::vector<int>& bits) {
    int k = 0;
    for (int b : bits) k = (k << 1) | (b & 1);
    return k;
}

std::vector<int> index_to_bits(int k, int m) {
    std::vector<int> bits(m);
    for (int j = 0; j < m; ++j) bits[j] = (k >> (m - 1 - j)) & 1;
    return bits;
}

cplx map_bits(const Constellation& c, const std::vector<int>& bits) {
    if (int(bits.size()) != c.m) throw std::invalid_argument("map_bits: bit vector length != m");
    return c.points[bits_to_index(bits)];
}

namespace {
// position p whose binary-reflected Gray code equals g
int gray_inverse(int g) {
    int b = 0;
    for (; g; g >>= 1) b ^= g;
    return b;
}
}  // namespace

Constellation gray_qam(int m) {
    if (m < 2 || m % 2 != 0) throw std::invalid_argument("gray_qam: m must be even and >= 2");
    int half = m / 2;
    int levels = 1 << half;
    Constellation c;
    c.m = m;
    c.points.resize(size_t(1) << m);
    double scale = std::sqrt(3.0 / (2.0 * (levels * levels - 1.0)));
    for (int k = 0; k < (1 << m); ++k) {
        int ibits = k >> half;
        int qbits = k & (levels - 1);
        double re = (2.0 * gray_inverse(ibits) - (levels - 1)) * scale;
        double im = (2.0 * gray_inverse(qbits) - (levels - 1)) * scale;
        c.points[k] = cplx(re, im);
    }
    return c;
}

Constellation gray_psk(int m) {
    if (m < 1) throw std::invalid_argument("gray_psk: m must be >= 1");
    Constellation c;
    c.m = m;
    int order = 1 << m;
    c.points.resize(order);
    for (int k = 0; k < order; ++k) {
        double ang = 2.0 * M_PI * double(gray_inverse(k)) / double(order);
        c.points[k] = cplx(std::cos(ang), std::sin(ang));
    }
    return c;
}

double labeling_cost(const std::vector<cplx>& points, const std::vector<int>& labels, double n0) {
    double q = 0.0;
    int n = int(points.size());
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            if (j == k) continue;
            int h = std::popcount(unsigned(labels[k] ^ labels[j]));
            q += h * std::exp(-std::norm(points[k] - points[j]) / n0);
        }
    return q;
}

std::vector<int> heuristic_label(const std::vector<cplx>& points, double n0) {
    int n = int(points.size());
    std::vector<int> labels(n);
    for (int k = 0; k < n; ++k) labels[k] = k;
    if (n < 2) return labels;

    // pairwise kernel and per-point cost contributions
    std::vector<double> w(size_t(n) * n, 0.0);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            if (j != k) w[size_t(k) * n + j] = std::exp(-std::norm(points[k] - points[j]) / n0);

    auto swap_delta = [&](int a, int b) {
        // change of Q if labels of points a and b are exchanged
        double d = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == a || j == b) continue;
            int ha_old = std::popcount(unsigned(labels[a] ^ labels[j]));
            int hb_old = std::popcount(unsigned(labels[b] ^ labels[j]));
            d += 2.0 * ((hb_old - ha_old) * w[size_t(a) * n + j] + (ha_old - hb_old) * w[size_t(b) * n + j]);
        }
        return d;
    };

    for (;;) {
        double best = -1e-12;
        int ba = -1, bb = -1;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) {
                double d = swap_delta(a, b);
                if (d < best) {
                    best = d;
                    ba = a;
                    bb = b;
                }
            }
        if (ba < 0) break;
        std::swap(labels[ba], labels[bb]);
    }
    return labels;
}

Constellation apply_labels(const std::vector<cplx>& points, const std::vector<int>& labels) {
    Constellation c;
    c.m = 0;
    for (size_t v = points.size(); v > 1; v >>= 1) ++c.m;
    c.points.resize(points.size());
    for (size_t k = 0; k < points.size(); ++k) c.points[labels[k]] = points[k];
    return c;
}

MapperParams make_mapper(int m, double snr_mid, Rng& rng) {
    MapperParams p;
    p.m = m;
    p.snr_mid = snr_mid;
    int width = 1 << (m + 1);
    p.l1 = make_dense(width, 1, Act::relu, rng);
    p.l2 = make_dense(width, width, Act::linear, rng);
    return p;
}

Constellation build_constellation(const MapperParams& p, double snr_db) {
    Mat x(1, 1);
    x(0, 0) = p.standardize(snr_db);
    Mat h = dense_eval(p.l1, x);
    Mat raw = dense_eval(p.l2, h);
    int order = 1 << p.m;
    double q = 0.0;
    for (int c = 0; c < raw.cols(); ++c) q += raw(0, c) * raw(0, c);
    double s = 1.0 / std::sqrt(q / double(order));
    Constellation out;
    out.m = p.m;
    out.points.resize(order);
    for (int k = 0; k < order; ++k) out.points[k] = cplx(raw(0, 2 * k) * s, raw(0, 2 * k + 1) * s);
    return out;
}

MapperIds register_mapper(Tape& t, const MapperParams& p) {
    return MapperIds{register_layer(t, p.l1), register_layer(t, p.l2)};
}

Tape::Id mapper_node(Tape& t, const MapperIds& ids, Tape::Id std_snr_col, int m) {
    Tape::Id h = t.dense(std_snr_col, ids.l1.w, ids.l1.b, Act::relu);
    Tape::Id raw = t.dense(h, ids.l2.w, ids.l2.b, Act::linear);
    return t.normalize_rows(raw, double(1 << m));
}

std::vector<std::pair<int, int>> min_distance_pairs(const std::vector<cplx>& points, double tol_rel) {
    int n = int(points.size());
    std::vector<double> nearest(n, 1e300);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            if (j != k) nearest[k] = std::min(nearest[k], std::abs(points[k] - points[j]));
    std::vector<std::pair<int, int>> pairs;
    for (int k = 0; k < n; ++k)
        for (int j = k + 1; j < n; ++j) {
            double d = std::abs(points[k] - points[j]);
            if (d <= tol_rel * nearest[k] || d <= tol_rel * nearest[j]) pairs.emplace_back(k, j);
        }
    return pairs;
}

double gray_fraction(const Constellation& c, double tol_rel) {
    auto pairs = min_distance_pairs(c.points, tol_rel);
    if (pairs.empty()) return 0.0;
    int ok = 0;
    for (auto [k, j] : pairs)
        if (std::popcount(unsigned(k ^ j)) == 1) ++ok;
    return double(ok) / double(pairs.size());
}

void export_constellation_csv(const Constellation& c, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << "index,label_bits,re,im\n";
    f.precision(17);
    for (int k = 0; k < c.order(); ++k) {
        f << k << ",";
        for (int j = 0; j < c.m; ++j) f << bit_of(k, j, c.m);
        f << "," << c.points[k].real() << "," << c.points[k].imag() << "\n";
    }
}

}  // namespace bicm
