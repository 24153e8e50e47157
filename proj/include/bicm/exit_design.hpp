#pragma once

#include <functional>
#include <string>

#include "bicm/idd.hpp"

namespace bicm {

// Mutual information of a consistent Gaussian LLR (mean mu, variance 2*mu),
// evaluated by 96-node Gauss-Hermite quadrature. J(0) = 0, J(inf) -> 1.
double j_function(double mu);
// Bisection inverse on [0, 1); rejects i >= 1.
double j_inverse(double i);

// I(B;L) = 1 - mean log2(1 + exp(-l * (-2b+1))), clamped to [0,1].
double estimate_mi(const std::vector<double>& llrs, const std::vector<uint8_t>& bits);

// Channel front-end whose EXIT characteristic T(.) is being measured:
// constellation (fixed or SNR-conditioned mapper), demapper (neural or
// AWGN-MAP), and an optional impairment chain replacing the plain AWGN.
struct ExitSystem {
    int m = 0;
    double rate = 0.5;
    const Constellation* constellation = nullptr;
    const MapperParams* mapper = nullptr;
    const DemapperParams* neural = nullptr;  // null -> exact AWGN-MAP demapper
    const BlackBoxChannel* channel = nullptr;
    uint64_t seed = 99;
};

// Demapper EXIT transfer in the mean-LLR domain: transmit random bit blocks,
// draw Gaussian priors of mean mu_tilde = J^-1(i_a), demap once, subtract the
// prior, flip LLR signs where the transmitted bit is 1 (the scrambling
// symmetrization), and return J^-1 of the MI estimate. A warning flag is set
// when fewer than 10^4 LLR samples back the estimate.
struct TMeasurement {
    double t = 0.0;        // mean-LLR domain
    double mi = 0.0;       // MI domain
    long samples = 0;
    bool low_sample_warning = false;
};
TMeasurement measure_T(const ExitSystem& sys, double snr_db, double i_a, long min_llr_samples);

// T on the LP grid j/D, j = 0..D-1.
using TProvider = std::function<std::vector<double>(double snr_db, const std::vector<double>& iagrid)>;
TProvider monte_carlo_T(const ExitSystem& sys, long min_llr_samples);

// Degree-profile LP (check-concentrated rho_c = 1): maximize sum lambda_i/i
// subject to the D discretized tunnel constraints (strictness realized as
// >= rhs + delta_margin) and lambda_2 <= beta.
struct LpProfile {
    bool feasible = false;
    std::vector<double> lambda;  // index = degree, 0..d
    double rate = 0.0;           // 1 - 1/(c * sum lambda_j/j)
};
LpProfile design_lp(const std::vector<double>& t_grid, int c, int d, double beta, int grid_D,
                    double delta_margin = 1e-4);

// SNR-bisection code design: measure T on the grid, solve the LP, accept and
// lower the SNR while the achieved rate exceeds the target, halve the step,
// stop below epsilon.
struct DesignConfig {
    double initial_snr_db = 3.0;
    double target_rate = 0.5;
    double delta_snr_db = 1.0;
    double epsilon_db = 0.01;
    int c = 7;
    int grid_D = 101;
    int d_max = 12;
    double beta = 0.26;
    double delta_margin = 1e-4;
};

struct DesignProbe {
    double snr_db;
    bool feasible;
    double rate;
};

struct DesignResult {
    bool found = false;
    std::vector<double> lambda;
    int c = 0;
    double final_snr_db = 0.0;
    std::vector<DesignProbe> probes;
};
DesignResult code_design_search(const DesignConfig& cfg, const TProvider& t_provider);
// Algorithm repeated over candidate check degrees; lowest threshold kept.
DesignResult code_design_scan_c(DesignConfig cfg, const std::vector<int>& c_candidates, const TProvider& t_provider);

// beta cap from the AWGN stability condition, exp(1/n0)/(c-1).
double stability_cap(double n0, int c);

// Inverse of the CN transfer 1 - J((c-1) J^-1(1-x)); closed form for the
// check-concentrated case, bisection for general rho.
double cn_curve_inverse_concentrated(double h, int c);
double cn_curve(double i_a, const std::vector<double>& rho);
double cn_curve_inverse(double h, const std::vector<double>& rho);

// Lowest SNR (within [lo, hi], tolerance tol) with an open decoding tunnel
// for the profile against the measured T; NaN if closed everywhere.
double exit_threshold_snr(const std::vector<double>& lambda, const std::vector<double>& rho,
                          const TProvider& t_provider, int grid_D, double lo_db, double hi_db, double tol_db,
                          double margin = 0.0);

struct ExitChartData {
    std::vector<double> i_a, i_e_vn, i_e_cn_inv;
    // measured decoding trajectory: (MI of decoder extrinsic, MI of demapper
    // extrinsic) after each IDD iteration
    std::vector<std::pair<double, double>> trajectory;
};
ExitChartData exit_chart(const std::vector<double>& lambda, int c, const std::vector<double>& t_grid, int grid_D);

// Simulated trajectory for a full IDD system at one SNR, averaged over frames.
void append_trajectory(ExitChartData& chart, const IddConfig& cfg, const Constellation& c, double snr_db, double n0,
                       int frames, uint64_t seed);

void write_exit_csv(const ExitChartData& chart, const std::string& path);
void write_profile_txt(const std::vector<double>& lambda, int c, double rate, double threshold_snr_db,
                       const std::string& path);

}  // namespace bicm
