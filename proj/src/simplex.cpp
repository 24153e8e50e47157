#include "bicm/simplex.hpp"

#include <cmath>
#include <stdexcept>

namespace bicm {

namespace {

constexpr double kEps = 1e-9;

struct Tableau {
    int rows, cols;                 // constraint rows, total columns (vars + rhs)
    std::vector<double> t;          // (rows+1) x cols, last row = objective (maximize)
    std::vector<int> basis;         // basic variable per row

    double& at(int r, int c) { return t[size_t(r) * cols + c]; }
    double at(int r, int c) const { return t[size_t(r) * cols + c]; }

    void pivot(int pr, int pc) {
        double pv = at(pr, pc);
        for (int c = 0; c < cols; ++c) at(pr, c) /= pv;
        for (int r = 0; r <= rows; ++r) {
            if (r == pr) continue;
            double f = at(r, pc);
            if (f == 0.0) continue;
            for (int c = 0; c < cols; ++c) at(r, c) -= f * at(pr, c);
        }
        basis[pr] = pc;
    }

    // Bland: entering = lowest-index column with positive reduced profit;
    // leaving = min ratio, ties by lowest basis variable index.
    bool iterate(int nvars, bool& unbounded) {
        int pc = -1;
        for (int c = 0; c < nvars; ++c) {
            if (at(rows, c) > kEps) {
                pc = c;
                break;
            }
        }
        if (pc < 0) return false;
        int pr = -1;
        double best = 0.0;
        for (int r = 0; r < rows; ++r) {
            if (at(r, pc) > kEps) {
                double ratio = at(r, cols - 1) / at(r, pc);
                if (pr < 0 || ratio < best - kEps ||
                    (std::abs(ratio - best) <= kEps && basis[r] < basis[pr])) {
                    pr = r;
                    best = ratio;
                }
            }
        }
        if (pr < 0) {
            unbounded = true;
            return false;
        }
        pivot(pr, pc);
        unbounded = false;
        return true;
    }
};

}  // namespace

LpResult solve_lp_max(const std::vector<double>& c, const std::vector<std::vector<double>>& a,
                      const std::vector<char>& rel, const std::vector<double>& b) {
    int m = int(a.size()), n = int(c.size());
    if (int(rel.size()) != m || int(b.size()) != m) throw std::invalid_argument("solve_lp_max: size mismatch");
    for (const auto& row : a)
        if (int(row.size()) != n) throw std::invalid_argument("solve_lp_max: ragged constraint matrix");

    // normalize to b >= 0
    std::vector<std::vector<double>> A = a;
    std::vector<double> B = b;
    std::vector<char> R = rel;
    for (int r = 0; r < m; ++r) {
        if (B[r] < 0.0) {
            for (double& v : A[r]) v = -v;
            B[r] = -B[r];
            R[r] = R[r] == '<' ? '>' : (R[r] == '>' ? '<' : '=');
        }
    }

    int n_slack = 0, n_art = 0;
    for (char rc : R) {
        if (rc == '<') n_slack++;
        if (rc == '>') {
            n_slack++;
            n_art++;
        }
        if (rc == '=') n_art++;
    }
    int total = n + n_slack + n_art;

    Tableau tb;
    tb.rows = m;
    tb.cols = total + 1;
    tb.t.assign(size_t(m + 1) * tb.cols, 0.0);
    tb.basis.assign(m, -1);

    int si = n, ai = n + n_slack;
    std::vector<int> art_rows;
    for (int r = 0; r < m; ++r) {
        for (int cidx = 0; cidx < n; ++cidx) tb.at(r, cidx) = A[r][cidx];
        tb.at(r, tb.cols - 1) = B[r];
        if (R[r] == '<') {
            tb.at(r, si) = 1.0;
            tb.basis[r] = si++;
        } else if (R[r] == '>') {
            tb.at(r, si) = -1.0;
            ++si;
            tb.at(r, ai) = 1.0;
            tb.basis[r] = ai;
            art_rows.push_back(ai++);
        } else {
            tb.at(r, ai) = 1.0;
            tb.basis[r] = ai;
            art_rows.push_back(ai++);
        }
    }

    LpResult res;
    // phase 1: maximize -(sum of artificials)
    if (n_art > 0) {
        for (int r = 0; r < m; ++r) {
            if (tb.basis[r] >= n + n_slack) {
                for (int cidx = 0; cidx < tb.cols; ++cidx) tb.at(m, cidx) += tb.at(r, cidx);
            }
        }
        for (int v = n + n_slack; v < total; ++v) tb.at(m, v) = 0.0;
        bool unb = false;
        while (tb.iterate(total, unb)) {
        }
        if (tb.at(m, tb.cols - 1) > 1e-7) {
            res.status = LpResult::Status::infeasible;
            return res;
        }
        // drive leftover artificials out of the basis
        for (int r = 0; r < m; ++r) {
            if (tb.basis[r] >= n + n_slack) {
                int pc = -1;
                for (int cidx = 0; cidx < n + n_slack; ++cidx) {
                    if (std::abs(tb.at(r, cidx)) > kEps) {
                        pc = cidx;
                        break;
                    }
                }
                if (pc >= 0) tb.pivot(r, pc);
            }
        }
    }

    // phase 2 objective; artificial columns are barred from entering by
    // limiting the pivot scan to the structural+slack columns
    for (int cidx = 0; cidx < tb.cols; ++cidx) tb.at(m, cidx) = 0.0;
    for (int cidx = 0; cidx < n; ++cidx) tb.at(m, cidx) = c[cidx];
    for (int r = 0; r < m; ++r) {
        int bv = tb.basis[r];
        double f = tb.at(m, bv);
        if (f != 0.0) {
            for (int cidx = 0; cidx < tb.cols; ++cidx) tb.at(m, cidx) -= f * tb.at(r, cidx);
        }
    }
    bool unb = false;
    while (tb.iterate(n + n_slack, unb)) {
    }
    if (unb) {
        res.status = LpResult::Status::unbounded;
        return res;
    }
    res.status = LpResult::Status::optimal;
    res.x.assign(n, 0.0);
    for (int r = 0; r < m; ++r) {
        if (tb.basis[r] < n) res.x[tb.basis[r]] = tb.at(r, tb.cols - 1);
    }
    res.objective = 0.0;
    for (int cidx = 0; cidx < n; ++cidx) res.objective += c[cidx] * res.x[cidx];
    return res;
}

}  // namespace bicm
