#include "bicm/ldpc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bicm {

// defined in tape.cpp, shared with the tape's check_extrinsic op
void check_extrinsic_row(const CheckSegments& segs, const double* mu, double* out, std::vector<double>& scratch);

TannerGraph TannerGraph::from_edges(int n, int n_checks, std::vector<std::pair<int, int>> cv) {
    std::sort(cv.begin(), cv.end());
    for (size_t i = 1; i < cv.size(); ++i)
        if (cv[i] == cv[i - 1]) throw std::invalid_argument("TannerGraph: duplicate edge");
    TannerGraph g;
    g.n = n;
    g.n_checks = n_checks;
    g.edge_vn.resize(cv.size());
    g.edge_check.resize(cv.size());
    g.check_segs.offsets.assign(n_checks + 1, 0);
    for (size_t e = 0; e < cv.size(); ++e) {
        auto [c, v] = cv[e];
        if (c < 0 || c >= n_checks || v < 0 || v >= n) throw std::invalid_argument("TannerGraph: edge out of range");
        g.edge_check[e] = c;
        g.edge_vn[e] = v;
        g.check_segs.offsets[c + 1]++;
    }
    for (int c = 0; c < n_checks; ++c) g.check_segs.offsets[c + 1] += g.check_segs.offsets[c];
    g.vn_offsets.assign(n + 1, 0);
    for (int v : g.edge_vn) g.vn_offsets[v + 1]++;
    for (int v = 0; v < n; ++v) g.vn_offsets[v + 1] += g.vn_offsets[v];
    g.vn_edges.resize(cv.size());
    std::vector<int> fill(g.vn_offsets.begin(), g.vn_offsets.end() - 1);
    for (int e = 0; e < int(cv.size()); ++e) g.vn_edges[fill[g.edge_vn[e]]++] = e;  // ascending edge ids
    for (int v = 0; v < n; ++v)
        if (g.vn_offsets[v + 1] == g.vn_offsets[v]) throw std::invalid_argument("TannerGraph: isolated variable node");
    for (int c = 0; c < n_checks; ++c)
        if (g.check_segs.offsets[c + 1] == g.check_segs.offsets[c])
            throw std::invalid_argument("TannerGraph: isolated check node");
    return g;
}

bool syndrome_ok(const TannerGraph& g, const std::vector<uint8_t>& codeword) {
    for (int c = 0; c < g.n_checks; ++c) {
        int acc = 0;
        for (int e = g.check_segs.offsets[c]; e < g.check_segs.offsets[c + 1]; ++e) acc ^= codeword[g.edge_vn[e]] & 1;
        if (acc) return false;
    }
    return true;
}

double DegreeProfile::lambda_sum_over_i() const {
    double s = 0.0;
    for (size_t i = 2; i < lambda.size(); ++i) s += lambda[i] / double(i);
    return s;
}

double DegreeProfile::rho_sum_over_j() const {
    double s = 0.0;
    for (size_t j = 2; j < rho.size(); ++j) s += rho[j] / double(j);
    return s;
}

void DegreeProfile::validate() const {
    double sl = 0.0, sr = 0.0;
    for (size_t i = 2; i < lambda.size(); ++i) {
        if (lambda[i] < -1e-12) throw std::invalid_argument("DegreeProfile: negative lambda");
        sl += lambda[i];
    }
    for (size_t j = 2; j < rho.size(); ++j) {
        if (rho[j] < -1e-12) throw std::invalid_argument("DegreeProfile: negative rho");
        sr += rho[j];
    }
    if (std::abs(sl - 1.0) > 1e-9 || std::abs(sr - 1.0) > 1e-9)
        throw std::invalid_argument("DegreeProfile: fractions must sum to 1");
}

DegreeProfile extract_profile(const TannerGraph& g) {
    DegreeProfile p;
    int e_total = g.num_edges();
    for (int v = 0; v < g.n; ++v) {
        int d = g.vn_degree(v);
        if (int(p.lambda.size()) <= d) p.lambda.resize(d + 1, 0.0);
        p.lambda[d] += double(d) / e_total;
    }
    for (int c = 0; c < g.n_checks; ++c) {
        int d = g.cn_degree(c);
        if (int(p.rho.size()) <= d) p.rho.resize(d + 1, 0.0);
        p.rho[d] += double(d) / e_total;
    }
    return p;
}

std::vector<int> vn_degrees_from_lambda(const std::vector<double>& lambda, int n) {
    // node fractions proportional to lambda_i / i
    double denom = 0.0;
    for (size_t i = 2; i < lambda.size(); ++i) denom += lambda[i] / double(i);
    std::vector<int> counts(lambda.size(), 0);
    std::vector<std::pair<double, int>> rem;
    int assigned = 0;
    for (size_t i = 2; i < lambda.size(); ++i) {
        double exact = n * (lambda[i] / double(i)) / denom;
        counts[i] = int(std::floor(exact));
        assigned += counts[i];
        rem.emplace_back(exact - counts[i], int(i));
    }
    std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (int t = 0; t < n - assigned && t < int(rem.size()); ++t) counts[rem[t].second]++;
    int total = 0;
    for (int c : counts) total += c;
    if (total != n) throw std::invalid_argument("vn_degrees_from_lambda: rounding failed to hit n nodes");
    std::vector<int> degs;
    degs.reserve(n);
    for (size_t i = 2; i < counts.size(); ++i)
        for (int t = 0; t < counts[i]; ++t) degs.push_back(int(i));
    return degs;
}

Gf2Encoder::Gf2Encoder(const TannerGraph& g) {
    n_ = g.n;
    int m = g.n_checks;
    int wn = (n_ + 63) / 64;
    std::vector<uint64_t> h(size_t(m) * wn, 0);
    for (int e = 0; e < g.num_edges(); ++e) {
        int c = g.edge_check[e], v = g.edge_vn[e];
        h[size_t(c) * wn + v / 64] ^= 1ULL << (v % 64);
    }
    auto get = [&](int r, int c) { return (h[size_t(r) * wn + c / 64] >> (c % 64)) & 1ULL; };
    auto xor_rows = [&](int dst, int src) {
        for (int w = 0; w < wn; ++w) h[size_t(dst) * wn + w] ^= h[size_t(src) * wn + w];
    };

    // Gauss-Jordan, pivots chosen right-to-left so parity lands in the tail
    std::vector<int> pivot_col(m, -1);
    std::vector<char> is_pivot(n_, 0);
    int rank = 0;
    for (int col = n_ - 1; col >= 0 && rank < m; --col) {
        int pr = -1;
        for (int r = rank; r < m; ++r)
            if (get(r, col)) {
                pr = r;
                break;
            }
        if (pr < 0) continue;
        for (int w = 0; w < wn; ++w) std::swap(h[size_t(pr) * wn + w], h[size_t(rank) * wn + w]);
        for (int r = 0; r < m; ++r)
            if (r != rank && get(r, col)) xor_rows(r, rank);
        pivot_col[rank] = col;
        is_pivot[col] = 1;
        ++rank;
    }
    if (rank < m) {
        throw std::runtime_error("Gf2Encoder: parity-check matrix is rank-deficient (rank " + std::to_string(rank) +
                                 " of " + std::to_string(m) + " checks); remove dependent checks first");
    }
    k_ = n_ - m;
    for (int c = 0; c < n_; ++c)
        if (!is_pivot[c]) info_pos_.push_back(c);
    parity_pos_.assign(pivot_col.begin(), pivot_col.end());

    // compact rows over info positions: parity(pivot_col[r]) = <row_r, info>
    words_ = (k_ + 63) / 64;
    rows_.assign(size_t(m) * words_, 0);
    for (int r = 0; r < m; ++r)
        for (int j = 0; j < k_; ++j)
            if (get(r, info_pos_[j])) rows_[size_t(r) * words_ + j / 64] ^= 1ULL << (j % 64);
}

std::vector<uint8_t> Gf2Encoder::encode(const std::vector<uint8_t>& info) const {
    if (int(info.size()) != k_) throw std::invalid_argument("encode: info length != k");
    std::vector<uint64_t> iw(words_, 0);
    for (int j = 0; j < k_; ++j)
        if (info[j] & 1) iw[j / 64] ^= 1ULL << (j % 64);
    std::vector<uint8_t> cw(n_, 0);
    for (int j = 0; j < k_; ++j) cw[info_pos_[j]] = info[j] & 1;
    int m = n_ - k_;
    for (int r = 0; r < m; ++r) {
        uint64_t acc = 0;
        for (int w = 0; w < words_; ++w) acc ^= rows_[size_t(r) * words_ + w] & iw[w];
        cw[parity_pos_[r]] = uint8_t(__builtin_parityll(acc));
    }
    return cw;
}

void bp_iteration(const TannerGraph& g, const std::vector<double>& llr_in, BpState& st) {
    int e_total = g.num_edges();
    // S[v] = sum of incoming cn messages, ascending edge id
    std::vector<double> a(g.n);
    for (int v = 0; v < g.n; ++v) {
        double s = 0.0;
        for (int i = g.vn_offsets[v]; i < g.vn_offsets[v + 1]; ++i) s += st.mu_cv[g.vn_edges[i]];
        a[v] = llr_in[v] + s;
    }
    for (int e = 0; e < e_total; ++e) st.mu_vc[e] = clampd(a[g.edge_vn[e]] - st.mu_cv[e], -kLlrMax, kLlrMax);
    std::vector<double> scratch;
    check_extrinsic_row(g.check_segs, st.mu_vc.data(), st.mu_cv.data(), scratch);
    st.iteration++;
}

std::vector<double> bp_output(const TannerGraph& g, const std::vector<double>& llr_in, const BpState& st) {
    std::vector<double> out(g.n);
    for (int v = 0; v < g.n; ++v) {
        double s = 0.0;
        for (int i = g.vn_offsets[v]; i < g.vn_offsets[v + 1]; ++i) s += st.mu_cv[g.vn_edges[i]];
        out[v] = llr_in[v] + s;
    }
    return out;
}

std::vector<double> bp_decode(const TannerGraph& g, const std::vector<double>& llr_in, int iterations) {
    if (iterations < 1) throw std::invalid_argument("bp_decode: iterations must be >= 1");
    if (int(llr_in.size()) != g.n) throw std::invalid_argument("bp_decode: llr length != n");
    BpState st = BpState::init(g);
    for (int i = 0; i < iterations; ++i) bp_iteration(g, llr_in, st);
    std::vector<double> out = bp_output(g, llr_in, st);
    for (double& x : out) x = clampd(x, -kLlrMax, kLlrMax);
    return out;
}

std::vector<double> bp_decode_unclamped(const TannerGraph& g, const std::vector<double>& llr_in, int iterations) {
    int e_total = g.num_edges();
    std::vector<long double> mu_vc(e_total, 0.0L), mu_cv(e_total, 0.0L);
    for (int it = 0; it < iterations; ++it) {
        std::vector<long double> a(g.n);
        for (int v = 0; v < g.n; ++v) {
            long double s = 0.0L;
            for (int i = g.vn_offsets[v]; i < g.vn_offsets[v + 1]; ++i) s += mu_cv[g.vn_edges[i]];
            a[v] = llr_in[v] + s;
        }
        for (int e = 0; e < e_total; ++e) mu_vc[e] = a[g.edge_vn[e]] - mu_cv[e];
        for (int c = 0; c < g.n_checks; ++c) {
            int s0 = g.check_segs.offsets[c], s1 = g.check_segs.offsets[c + 1];
            for (int e = s0; e < s1; ++e) {
                long double p = 1.0L;
                for (int f = s0; f < s1; ++f)
                    if (f != e) p *= std::tanh(0.5L * mu_vc[f]);
                p = std::min(std::max(p, -1.0L + 1e-18L), 1.0L - 1e-18L);
                mu_cv[e] = 2.0L * std::atanh(p);
            }
        }
    }
    std::vector<double> out(g.n);
    for (int v = 0; v < g.n; ++v) {
        long double s = 0.0L;
        for (int i = g.vn_offsets[v]; i < g.vn_offsets[v + 1]; ++i) s += mu_cv[g.vn_edges[i]];
        out[v] = double(llr_in[v] + s);
    }
    return out;
}

void save_alist(const TannerGraph& g, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    int dv = 0, dc = 0;
    for (int v = 0; v < g.n; ++v) dv = std::max(dv, g.vn_degree(v));
    for (int c = 0; c < g.n_checks; ++c) dc = std::max(dc, g.cn_degree(c));
    f << g.n << " " << g.n_checks << "\n" << dv << " " << dc << "\n";
    for (int v = 0; v < g.n; ++v) f << g.vn_degree(v) << (v + 1 < g.n ? " " : "\n");
    for (int c = 0; c < g.n_checks; ++c) f << g.cn_degree(c) << (c + 1 < g.n_checks ? " " : "\n");
    for (int v = 0; v < g.n; ++v) {
        int cnt = 0;
        for (int i = g.vn_offsets[v]; i < g.vn_offsets[v + 1]; ++i, ++cnt) f << g.edge_check[g.vn_edges[i]] + 1 << " ";
        for (; cnt < dv; ++cnt) f << 0 << " ";
        f << "\n";
    }
    for (int c = 0; c < g.n_checks; ++c) {
        int cnt = 0;
        for (int e = g.check_segs.offsets[c]; e < g.check_segs.offsets[c + 1]; ++e, ++cnt) f << g.edge_vn[e] + 1 << " ";
        for (; cnt < dc; ++cnt) f << 0 << " ";
        f << "\n";
    }
}

TannerGraph load_alist(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    int n, m, dv, dc;
    f >> n >> m >> dv >> dc;
    std::vector<int> vdeg(n), cdeg(m);
    for (int& x : vdeg) f >> x;
    for (int& x : cdeg) f >> x;
    std::vector<std::pair<int, int>> edges;
    for (int v = 0; v < n; ++v) {
        for (int i = 0; i < dv; ++i) {
            int c;
            f >> c;
            if (c > 0) edges.emplace_back(c - 1, v);
        }
    }
    if (!f) throw std::runtime_error("alist parse error in " + path);
    return TannerGraph::from_edges(n, m, std::move(edges));
}

TannerGraph expand_qc(const std::vector<std::vector<int>>& base, int z) {
    int br = int(base.size());
    int bc = int(base[0].size());
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < br; ++i) {
        if (int(base[i].size()) != bc) throw std::invalid_argument("expand_qc: ragged base matrix");
        for (int j = 0; j < bc; ++j) {
            int s = base[i][j];
            if (s < 0) continue;
            if (s >= z) throw std::invalid_argument("expand_qc: shift >= z");
            for (int r = 0; r < z; ++r) edges.emplace_back(i * z + r, j * z + (r + s) % z);
        }
    }
    return TannerGraph::from_edges(bc * z, br * z, std::move(edges));
}

void save_qc_table(const std::vector<std::vector<int>>& base, int z, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << base.size() << " " << base[0].size() << " " << z << "\n";
    for (const auto& row : base) {
        for (size_t j = 0; j < row.size(); ++j) f << row[j] << (j + 1 < row.size() ? " " : "\n");
    }
}

std::pair<std::vector<std::vector<int>>, int> load_qc_table(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    int r, c, z;
    f >> r >> c >> z;
    std::vector<std::vector<int>> base(r, std::vector<int>(c));
    for (auto& row : base)
        for (int& x : row) f >> x;
    if (!f) throw std::runtime_error("qc table parse error in " + path);
    return {base, z};
}

uint64_t shift_table_checksum(const std::vector<std::vector<int>>& base, int z) {
    uint64_t h = 1469598103934665603ULL;  // FNV-1a
    auto mix = [&](int v) {
        for (int b = 0; b < 4; ++b) {
            h ^= uint64_t((v >> (8 * b)) & 0xff);
            h *= 1099511628211ULL;
        }
    };
    mix(z);
    for (const auto& row : base)
        for (int v : row) mix(v);
    return h;
}

}  // namespace bicm
