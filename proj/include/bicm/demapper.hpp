#pragma once

#include "bicm/constellation.hpp"
#include "bicm/nn.hpp"

namespace bicm {

// Neural demapper: [re(y), im(y), standardized snr, m prior LLRs]
// -> dense(128, relu) -> dense(128, relu) -> dense(out, linear).
// out = m logits for the bit-wise system, 2^m for the symbol-wise one
// (the symbol-wise variant takes no prior inputs).
struct DemapperParams {
    int m = 0;
    bool prior_inputs = true;
    DenseLayer l1, l2, l3;
    double snr_mid = 0.0;

    int in_dim() const { return l1.in(); }
    int out_dim() const { return l3.out(); }
    double standardize(double snr_db) const { return (snr_db - snr_mid) / 4.0; }
};

DemapperParams make_bitwise_demapper(int m, double snr_mid, Rng& rng, int hidden = 128);
DemapperParams make_symbolwise_demapper(int m, double snr_mid, Rng& rng, int hidden = 128);

// Single-sample evaluation. prior may be empty (treated as zeros).
std::vector<double> nn_demap(const DemapperParams& p, cplx y, double snr_db, const std::vector<double>& prior);

// Batch evaluation over a prebuilt feature matrix (rows = samples).
Mat nn_demap_batch(const DemapperParams& p, const Mat& features);

struct DemapperIds {
    LayerIds l1, l2, l3;
};
DemapperIds register_demapper(Tape& t, const DemapperParams& p);
Tape::Id demapper_node(Tape& t, const DemapperIds& ids, Tape::Id features);

// Exact AWGN-MAP bit demapper with prior support. Returns the bit
// posteriors l_j = log p(b_j=0|y,priors) - log p(b_j=1|y,priors); the prior
// of bit j itself enters additively, so the extrinsic subtraction of the
// IDD loop recovers the conventional extrinsic output. Max-stabilized
// log-sum-exp, output clamped to +-kLlrMax.
std::vector<double> map_demap_awgn(const Constellation& c, cplx y, double n0, const std::vector<double>& prior);

// Same, without stabilization and in extended precision (test oracle).
std::vector<double> map_demap_awgn_naive(const Constellation& c, cplx y, double n0, const std::vector<double>& prior);

}  // namespace bicm
