#pragma once

#include <string>
#include <vector>

#include "bicm/constellation.hpp"
#include "bicm/rng.hpp"

namespace bicm {

// SNR here is E_b/N_0: SNR_lin = 1/(r*m*N0).
double snr_to_n0(double snr_db, double rate, int m);
double n0_to_snr_db(double n0, double rate, int m);

// y = x + w, w circularly-symmetric complex Gaussian, E|w|^2 = n0.
void awgn_inplace(std::vector<cplx>& x, double n0, Rng& rng);
std::vector<cplx> awgn(const std::vector<cplx>& x, double n0, Rng& rng);

// Sampling-only channel: an ordered impairment chain followed by AWGN.
// No operation here ever records anything on a tape.
struct ChannelStage {
    enum class Kind { cubic_amam, tanh_amam, phase_rotation, awgn };
    Kind kind;
    double param = 0.0;  // cubic/tanh coefficient, rotation angle, or n0
};

struct BlackBoxChannel {
    std::vector<ChannelStage> stages;  // applied in order; final AWGN(n0) is implicit

    std::vector<cplx> apply(const std::vector<cplx>& x, double n0, Rng& rng) const;

    // Default stand-in for an over-the-air link: mild cubic compression plus
    // a fixed phase rotation ahead of the AWGN.
    static BlackBoxChannel default_impairments();
    static BlackBoxChannel pure_awgn() { return BlackBoxChannel{}; }
};

ChannelStage parse_stage(const std::string& kind, double param);

}  // namespace bicm
