#include "bicm/peg.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace bicm {

namespace {

struct Builder {
    int n, n_checks;
    std::vector<std::vector<int>> vn_adj, cn_adj;  // adjacency by node

    bool adjacent(int v, int c) const {
        for (int x : vn_adj[v])
            if (x == c) return true;
        return false;
    }

    // BFS from vn v; returns per-check depth (-1 = unreached)
    std::vector<int> check_depths(int v) const {
        std::vector<int> cdep(n_checks, -1), vdep(n, -1);
        std::deque<int> q;  // vns
        vdep[v] = 0;
        q.push_back(v);
        while (!q.empty()) {
            int u = q.front();
            q.pop_front();
            for (int c : vn_adj[u]) {
                if (cdep[c] >= 0) continue;
                cdep[c] = vdep[u] + 1;
                for (int w : cn_adj[c]) {
                    if (vdep[w] < 0) {
                        vdep[w] = cdep[c] + 1;
                        q.push_back(w);
                    }
                }
            }
        }
        return cdep;
    }
};

}  // namespace

TannerGraph peg_construct(int n, std::vector<int> vn_degrees, int n_checks, Rng& rng) {
    if (int(vn_degrees.size()) != n) throw std::invalid_argument("peg_construct: degree sequence length != n");
    long total_edges = std::accumulate(vn_degrees.begin(), vn_degrees.end(), 0L);
    int cap = int((total_edges + n_checks - 1) / n_checks);
    for (int d : vn_degrees) {
        if (d < 1) throw std::invalid_argument("peg_construct: vn degree must be >= 1");
        if (d > n_checks)
            throw std::invalid_argument("peg_construct: vn degree " + std::to_string(d) + " exceeds " +
                                        std::to_string(n_checks) + " checks (unrealizable, " +
                                        std::to_string(total_edges) + " edges requested)");
    }

    // process vns ascending in degree; rng shuffles within a degree class
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int i = n - 1; i > 0; --i) std::swap(order[i], order[rng.below(uint64_t(i) + 1)]);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return vn_degrees[a] < vn_degrees[b]; });

    Builder b{n, n_checks, std::vector<std::vector<int>>(n), std::vector<std::vector<int>>(n_checks)};

    auto place = [&](int v, int c) {
        b.vn_adj[v].push_back(c);
        b.cn_adj[c].push_back(v);
    };

    for (int v : order) {
        int dv = vn_degrees[v];
        for (int t = 0; t < dv; ++t) {
            std::vector<int> dep = t == 0 ? std::vector<int>(n_checks, -1) : b.check_depths(v);
            // preference tiers: unreached checks avoid cycles entirely and the
            // soft degree cap keeps the check side concentrated; depth only
            // decides once every check is reachable
            std::vector<int> cand;
            auto fill = [&](bool need_unreached, bool need_under_cap) {
                cand.clear();
                int maxd = -1;
                if (!need_unreached) {
                    for (int c = 0; c < n_checks; ++c)
                        if (!b.adjacent(v, c) && dep[c] >= 0 && (!need_under_cap || int(b.cn_adj[c].size()) < cap))
                            maxd = std::max(maxd, dep[c]);
                }
                for (int c = 0; c < n_checks; ++c) {
                    if (b.adjacent(v, c)) continue;
                    if (need_under_cap && int(b.cn_adj[c].size()) >= cap) continue;
                    if (need_unreached ? dep[c] < 0 : dep[c] == maxd) cand.push_back(c);
                }
            };
            fill(true, true);
            if (cand.empty()) fill(true, false);
            if (cand.empty()) fill(false, false);  // depth beats the degree cap
            if (cand.empty())
                throw std::invalid_argument("peg_construct: no admissible check for vn " + std::to_string(v) +
                                            " edge " + std::to_string(t + 1) + " of " + std::to_string(dv) +
                                            " (n_checks " + std::to_string(n_checks) + ")");
            // degree-2 vns must not close 4-cycles among themselves
            if (dv == 2 && t == 1) {
                int c1 = b.vn_adj[v][0];
                std::vector<int> filt;
                for (int c2 : cand) {
                    bool closes = false;
                    for (int u : b.cn_adj[c2]) {
                        if (u != v && vn_degrees[u] == 2 && b.adjacent(u, c1)) {
                            closes = true;
                            break;
                        }
                    }
                    if (!closes) filt.push_back(c2);
                }
                if (!filt.empty()) cand.swap(filt);
            }
            int best = cand[0];
            for (int c : cand) {
                if (b.cn_adj[c].size() < b.cn_adj[best].size() ||
                    (b.cn_adj[c].size() == b.cn_adj[best].size() && c < best))
                    best = c;
            }
            place(v, best);
        }
    }

    std::vector<std::pair<int, int>> edges;
    edges.reserve(total_edges);
    for (int v = 0; v < n; ++v)
        for (int c : b.vn_adj[v]) edges.emplace_back(c, v);
    return TannerGraph::from_edges(n, n_checks, std::move(edges));
}

int girth(const TannerGraph& g) {
    int best = 0;
    auto note = [&](int len) {
        if (len >= 4 && (best == 0 || len < best)) best = len;
    };
    // BFS from every vn with parent-edge tracking; each closure event is a
    // cycle length upper bound, and roots on a minimal cycle yield it exactly.
    for (int src = 0; src < g.n; ++src) {
        std::vector<int> vdep(g.n, -1), cdep(g.n_checks, -1), parent(g.n, -1);
        std::deque<int> q;
        vdep[src] = 0;
        q.push_back(src);
        while (!q.empty()) {
            int u = q.front();
            q.pop_front();
            for (int i = g.vn_offsets[u]; i < g.vn_offsets[u + 1]; ++i) {
                int e = g.vn_edges[i];
                if (e == parent[u]) continue;
                int c = g.edge_check[e];
                if (cdep[c] >= 0) {
                    note(cdep[c] + vdep[u] + 1);
                    continue;
                }
                cdep[c] = vdep[u] + 1;
                for (int f = g.check_segs.offsets[c]; f < g.check_segs.offsets[c + 1]; ++f) {
                    int w = g.edge_vn[f];
                    if (w == u) continue;
                    if (vdep[w] < 0) {
                        vdep[w] = cdep[c] + 1;
                        parent[w] = f;
                        q.push_back(w);
                    } else {
                        note(cdep[c] + 1 + vdep[w]);
                    }
                }
            }
        }
    }
    return best;
}

}  // namespace bicm
