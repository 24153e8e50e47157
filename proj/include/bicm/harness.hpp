#pragma once

#include "bicm/config.hpp"
#include "bicm/exit_design.hpp"
#include "bicm/training.hpp"

namespace bicm {

// One transmit/receive chain under test.
struct SystemSpec {
    std::string name = "system";
    // transmit: either a fixed constellation or an SNR-conditioned mapper
    const Constellation* fixed_constellation = nullptr;
    const MapperParams* mapper = nullptr;
    // receive: neural demapper, or exact AWGN-MAP when null
    const DemapperParams* neural = nullptr;
    // code
    const TannerGraph* graph = nullptr;
    const Gf2Encoder* encoder = nullptr;
    int m = 0;
    // receiver schedule: IDD iterations, or one demap + `iterations` BP rounds
    bool use_idd = false;
    int iterations = 40;
    // optional impairment chain ahead of the AWGN
    const BlackBoxChannel* channel = nullptr;

    double code_rate() const { return double(encoder->k()) / encoder->n(); }
};

struct SweepSpec {
    std::vector<double> snr_grid_db;
    long min_bit_errors = 2000;
    long max_bits = 100000000;
    uint64_t seed = 1;
    int threads = 1;
    int frames_per_chunk = 16;
};

struct BerRecord {
    double snr_db = 0.0;
    long bits = 0, bit_errors = 0, frames = 0, frame_errors = 0;
    bool censored = false;  // max_bits hit below min_bit_errors

    double ber() const { return bits ? double(bit_errors) / double(bits) : 0.0; }
    double bler() const { return frames ? double(frame_errors) / double(frames) : 0.0; }
};

// Monte-Carlo coded BER/BLER over the SNR grid. Info-bit errors are counted.
// Frames are processed in fixed index chunks scheduled in waves, so results
// are identical for any thread count.
std::vector<BerRecord> ber_sweep(const SystemSpec& sys, const SweepSpec& spec);

// log-linear interpolation of the SNR achieving target_ber; NaN if the grid
// does not bracket the target.
double snr_at_ber(const std::vector<BerRecord>& records, double target_ber);

struct GapEntry {
    std::string a, b;
    double snr_a, snr_b, gap_db;
    bool available;
};
std::vector<GapEntry> compare_systems(const std::vector<std::string>& names,
                                      const std::vector<std::vector<BerRecord>>& curves, double target_ber);

// Paired Monte-Carlo BMI (bits/symbol) of a neural demapper and the exact
// MAP demapper on the same AWGN samples; nn omitted when dp is null.
struct BmiEstimate {
    double nn = 0.0;
    double map = 0.0;
};
BmiEstimate estimate_bmi(const Constellation& c, const DemapperParams* dp, double snr_db, double n0, long symbols,
                         uint64_t seed);

// SNR (dB) at which the Gray baseline with MAP demapping and 40 BP
// iterations crosses target_ber; coarse scan + interpolation. This anchors
// the "waterfall region" used to center training SNR ranges.
double find_waterfall_snr(const TannerGraph& g, const Gf2Encoder& enc, int m, double target_ber = 1e-3,
                          uint64_t seed = 7);

Constellation baseline_constellation(int m);  // QAM for even m, PSK otherwise

// ---- artifact export -----------------------------------------------------

void write_ber_csv(const std::vector<BerRecord>& records, const std::string& path);
uint64_t fnv1a_file(const std::string& path);
// writes manifest.txt with per-file content hashes and a combined hash
void write_manifest(const std::vector<std::string>& files, const std::string& dir);

// Executes a sweep experiment config; returns the artifact directory.
std::string run_experiment(const Config& cfg, const std::string& out_dir, int threads_override = 0,
                           int64_t seed_override = -1);

}  // namespace bicm
