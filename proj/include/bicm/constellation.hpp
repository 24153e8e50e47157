#pragma once

#include <complex>
#include <vector>

#include "bicm/nn.hpp"

namespace bicm {

using cplx = std::complex<double>;

// 2^m complex points, unit average power under uniform inputs. The label of
// point k is the m-bit big-endian expansion of k (bits[0] is the MSB).
struct Constellation {
    int m = 0;
    std::vector<cplx> points;

    int order() const { return int(points.size()); }
    double mean_power() const;
};

int bits_to_index(const std::vector<int>& bits);
std::vector<int> index_to_bits(int k, int m);
inline int bit_of(int k, int j, int m) { return (k >> (m - 1 - j)) & 1; }

cplx map_bits(const Constellation& c, const std::vector<int>& bits);

// Gray-labeled baselines, unit average power.
Constellation gray_qam(int m);  // m even
Constellation gray_psk(int m);  // m >= 1

// Binary-switching labeling: starting from identity, repeatedly apply the
// label swap with the largest decrease of
//   Q = sum_{k != k'} hamming(label_k, label_k') * exp(-|x_k - x_k'|^2 / n0)
// until no swap improves. Returns perm with perm[k] = label of point k.
std::vector<int> heuristic_label(const std::vector<cplx>& points, double n0);
double labeling_cost(const std::vector<cplx>& points, const std::vector<int>& labels, double n0);
Constellation apply_labels(const std::vector<cplx>& points, const std::vector<int>& labels);

// SNR-conditioned trainable mapper: std_snr -> dense(2^{m+1}, relu)
// -> dense(2^{m+1}, linear) -> unit-power normalization. The 2^{m+1} outputs
// are the interleaved re/im parts of the 2^m points.
struct MapperParams {
    int m = 0;
    DenseLayer l1, l2;
    double snr_mid = 0.0;  // standardization: (snr_db - snr_mid) / 4

    double standardize(double snr_db) const { return (snr_db - snr_mid) / 4.0; }
};

MapperParams make_mapper(int m, double snr_mid, Rng& rng);

Constellation build_constellation(const MapperParams& p, double snr_db);

// Tape subgraph: rows of std_snr_col (B x 1) -> per-row flattened normalized
// constellation (B x 2^{m+1}).
struct MapperIds {
    LayerIds l1, l2;
};
MapperIds register_mapper(Tape& t, const MapperParams& p);
Tape::Id mapper_node(Tape& t, const MapperIds& ids, Tape::Id std_snr_col, int m);

// Nearest-neighbor pairs: all unordered (k, k') with
// |x_k - x_k'| <= tol_rel * min_{j != k} |x_k - x_j| for either endpoint.
std::vector<std::pair<int, int>> min_distance_pairs(const std::vector<cplx>& points, double tol_rel = 1.05);
// Fraction of min-distance pairs whose labels differ in exactly one bit.
double gray_fraction(const Constellation& c, double tol_rel = 1.05);

// CSV export: index, label_bits, re, im
void export_constellation_csv(const Constellation& c, const std::string& path);

}  // namespace bicm
