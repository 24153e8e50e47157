#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bicm/tape.hpp"

namespace bicm {

// Bipartite parity-check graph. Edges are kept sorted by (check, vn); per-vn
// edge lists are ascending in global edge id, which pins the accumulation
// order used by both the plain and the tape BP paths.
struct TannerGraph {
    int n = 0;
    int n_checks = 0;
    std::vector<int> edge_vn;     // per edge
    std::vector<int> edge_check;  // per edge
    CheckSegments check_segs;     // edge ranges per check
    std::vector<int> vn_offsets;  // CSR over vns
    std::vector<int> vn_edges;

    int num_edges() const { return int(edge_vn.size()); }
    int vn_degree(int v) const { return vn_offsets[v + 1] - vn_offsets[v]; }
    int cn_degree(int c) const { return check_segs.offsets[c + 1] - check_segs.offsets[c]; }

    static TannerGraph from_edges(int n, int n_checks, std::vector<std::pair<int, int>> check_vn_pairs);
};

bool syndrome_ok(const TannerGraph& g, const std::vector<uint8_t>& codeword);

// Edge-perspective degree polynomials; lambda[i] (rho[j]) is the fraction of
// edges incident to degree-i vns (degree-j cns). Index 0 and 1 unused.
struct DegreeProfile {
    std::vector<double> lambda;
    std::vector<double> rho;

    double lambda_sum_over_i() const;  // sum lambda_i / i
    double rho_sum_over_j() const;
    double v_avg() const { return 1.0 / lambda_sum_over_i(); }
    double c_avg() const { return 1.0 / rho_sum_over_j(); }
    double rate() const { return 1.0 - rho_sum_over_j() / lambda_sum_over_i(); }

    void validate() const;  // nonnegative, sums to one
};

DegreeProfile extract_profile(const TannerGraph& g);

// Node-perspective degree sequence realizing lambda on n vns
// (largest-remainder rounding of node counts).
std::vector<int> vn_degrees_from_lambda(const std::vector<double>& lambda, int n);

// Systematic-where-possible GF(2) encoder derived from H by Gauss-Jordan
// elimination with pivots preferred in the rightmost columns.
class Gf2Encoder {
  public:
    explicit Gf2Encoder(const TannerGraph& g);

    int n() const { return n_; }
    int k() const { return k_; }
    const std::vector<int>& info_positions() const { return info_pos_; }
    const std::vector<int>& parity_positions() const { return parity_pos_; }

    std::vector<uint8_t> encode(const std::vector<uint8_t>& info) const;

  private:
    int n_ = 0, k_ = 0;
    std::vector<int> info_pos_, parity_pos_;
    int words_ = 0;
    std::vector<uint64_t> rows_;  // n_checks x words over info positions
};

// Flooding sum-product state; messages indexed by global edge id.
struct BpState {
    std::vector<double> mu_vc, mu_cv;
    int iteration = 0;

    static BpState init(const TannerGraph& g) {
        return BpState{std::vector<double>(g.num_edges(), 0.0), std::vector<double>(g.num_edges(), 0.0), 0};
    }
};

// One flooding iteration (vn update from previous cn messages, then cn
// update). llr_in is the intrinsic input of this iteration.
void bp_iteration(const TannerGraph& g, const std::vector<double>& llr_in, BpState& st);

// Posterior output: llr_in + sum of cn messages.
std::vector<double> bp_output(const TannerGraph& g, const std::vector<double>& llr_in, const BpState& st);

// I flooding iterations from cold start; returns clamped posterior LLRs.
std::vector<double> bp_decode(const TannerGraph& g, const std::vector<double>& llr_in, int iterations);

// Reference decoder without message clamps, long-double check-node update
// (test oracle for the clamping-never-changes-decisions property).
std::vector<double> bp_decode_unclamped(const TannerGraph& g, const std::vector<double>& llr_in, int iterations);

// alist text format
void save_alist(const TannerGraph& g, const std::string& path);
TannerGraph load_alist(const std::string& path);

// QC expansion: base(i,j) < 0 means a zero block, otherwise a Z x Z identity
// cyclically right-shifted by base(i,j).
TannerGraph expand_qc(const std::vector<std::vector<int>>& base, int z);

// shift-table text format: "rows cols z" then the base matrix entries
void save_qc_table(const std::vector<std::vector<int>>& base, int z, const std::string& path);
std::pair<std::vector<std::vector<int>>, int> load_qc_table(const std::string& path);

// 802.11n rate-1/2 codes, n in {648, 1296, 1944}
TannerGraph load_80211n(int n, double rate = 0.5);
const std::vector<std::vector<int>>& base_80211n_r12(int n);
uint64_t shift_table_checksum(const std::vector<std::vector<int>>& base, int z);

}  // namespace bicm
