#pragma once

#include "bicm/channel.hpp"
#include "bicm/demapper.hpp"
#include "bicm/ldpc.hpp"

namespace bicm {

// Iterative demapping-and-decoding receiver. Exactly one demapper kind is
// set; the MAP kind also needs the transmit constellation.
struct IddConfig {
    const TannerGraph* graph = nullptr;
    int m = 0;
    int iterations = 40;
    const DemapperParams* neural = nullptr;
    const Constellation* map_constellation = nullptr;

    int s() const { return graph->n / m; }
    void validate() const;
};

// Per-iteration instrumentation of the extrinsic bookkeeping.
struct IddTrace {
    std::vector<std::vector<double>> prior_used;  // clamped decoder extrinsic fed to the demapper
    std::vector<std::vector<double>> demap_out;   // l
    std::vector<std::vector<double>> demap_ext;   // l_E = l - prior_used
    std::vector<std::vector<double>> dec_out;     // l_hat
    std::vector<std::vector<double>> dec_ext;     // l_hat_E = l_hat - l_E
};

// I iterations of: demap with prior, extrinsic subtraction, one BP flooding
// iteration, decoder extrinsic feedback. Returns the clamped decoder output.
std::vector<double> idd_receive(const IddConfig& cfg, const std::vector<cplx>& y, double snr_db, double n0,
                                IddTrace* trace = nullptr);

// Single demap (zero prior) followed by bp_iters BP iterations.
std::vector<double> plain_receive(const IddConfig& cfg, const std::vector<cplx>& y, double snr_db, double n0,
                                  int bp_iters);

// J of Eq.-(13) form: binary CE of the demapper output against the codeword,
// summed over bits and iterations.
double idd_loss_of_trace(const IddTrace& trace, const std::vector<uint8_t>& codeword);

std::vector<cplx> modulate(const Constellation& c, const std::vector<uint8_t>& bits);
std::vector<uint8_t> hard_decide(const std::vector<double>& llr);  // l > 0 -> bit 0

// ---- unfolded differentiable receiver ----------------------------------

struct UnfoldRx {
    Tape::Id loss = -1;       // mean over frames of sum_{i,j} BCE
    Tape::Id final_llr = -1;  // B x n decoder output
    std::vector<Tape::Id> iter_logits;  // demapper output per iteration, B x n
    DemapperIds demapper;
};

// Receiver-only unfolding over fixed channel outputs y (B frames of s
// symbols). truncate_every = 0 backpropagates through the full unroll; a
// positive value detaches the decoder feedback every that many iterations.
UnfoldRx unfold_receiver(Tape& t, const IddConfig& cfg, const DemapperParams& dp,
                         const std::vector<std::vector<cplx>>& y, const std::vector<double>& snr_db,
                         const Mat& codeword_bits, int truncate_every = 0);

struct UnfoldAe {
    Tape::Id loss = -1;
    Tape::Id final_llr = -1;
    Tape::Id x = -1;  // transmitted symbols, (B*s) x 2
    std::vector<Tape::Id> iter_logits;
    MapperIds mapper;
    DemapperIds demapper;
};

// Full autoencoder over a differentiable AWGN channel: codeword bits are
// mapped through the SNR-conditioned mapper, the caller-provided noise
// realization is added, and the unfolded receiver produces the loss.
// noise is (B*s) x 2, already scaled to per-frame sqrt(n0/2).
UnfoldAe unfold_autoencoder(Tape& t, const IddConfig& cfg, const MapperParams& mp, const DemapperParams& dp,
                            const Mat& codeword_bits, const std::vector<double>& snr_db, const Mat& noise,
                            int truncate_every = 0);

}  // namespace bicm
