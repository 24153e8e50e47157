#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "bicm/idd.hpp"

namespace bicm {

// All trainable weights of one end-to-end system plus bookkeeping needed to
// reuse them (SNR standardization midpoint, config echo).
struct ParameterSet {
    int version = 1;
    int m = 0;
    double snr_mid = 0.0;
    bool has_mapper = false;
    MapperParams mapper;
    DemapperParams demapper;
    std::string config_echo;
};

// Textual checkpoint container: named arrays with shapes, values in C99
// hexfloat so round-trips are bit-exact.
void save_checkpoint(const ParameterSet& ps, const std::string& path);
ParameterSet load_checkpoint(const std::string& path);

// Adam over an explicit parameter list. Moments are kept per parameter in
// list order; updates are elementwise and deterministic.
class Adam {
  public:
    explicit Adam(std::vector<Mat*> params, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
    void step(const std::vector<Mat>& grads, double lr);
    int64_t steps_done() const { return t_; }

  private:
    std::vector<Mat*> params_;
    std::vector<Mat> m1_, m2_;
    double b1_, b2_, eps_;
    int64_t t_ = 0;
};

std::vector<Mat*> mapper_param_list(MapperParams& p);
std::vector<Mat*> demapper_param_list(DemapperParams& p);
std::vector<Mat> collect_grads(const Tape& t, const std::vector<Tape::Id>& ids);
std::vector<Tape::Id> mapper_id_list(const MapperIds& ids);
std::vector<Tape::Id> demapper_id_list(const DemapperIds& ids);

// geometric interpolation lr_start -> lr_end over total steps
double lr_schedule(double lr_start, double lr_end, int64_t step, int64_t total);

struct TrainConfig {
    int m = 4;
    int batch = 500;
    int steps = 10000;
    double lr_start = 1e-3;
    double lr_end = 1e-5;
    double snr_lo = 1.0;  // dB, training range (4 dB around the waterfall)
    double snr_hi = 5.0;
    double rate = 0.5;  // code rate entering the Eb/N0 <-> N0 conversion
    int hidden = 128;
    uint64_t seed = 1;

    double snr_mid() const { return 0.5 * (snr_lo + snr_hi); }
};

// Bit-wise autoencoder over AWGN (no channel code in the loop): joint
// geometric shaping, labeling, and demapper training on the total binary CE.
ParameterSet train_bitwise_ae(const TrainConfig& cfg);

// Symbol-wise system trained on the categorical CE (labeling experiments).
ParameterSet train_symbolwise_ae(const TrainConfig& cfg);

struct IddTrainConfig {
    TrainConfig base;
    const TannerGraph* graph = nullptr;
    int iterations = 40;
    int truncate_every = 0;
    const ParameterSet* warm_start = nullptr;  // bit-wise AE checkpoint
};

// Joint mapper/demapper training through the unfolded IDD receiver on the
// multi-iteration demapper-CE loss.
ParameterSet idd_train(const IddTrainConfig& cfg);

// ---- model-free (black-box channel) training ----------------------------

struct PerturbConfig {
    double sigma2_start = 0.05;
    double sigma2_end = 0.01;

    void validate() const;
    // linear annealing over the tx-step budget
    double sigma2_at(int64_t step, int64_t total) const;
};

struct AltTrainConfig {
    TrainConfig base;
    const TannerGraph* graph = nullptr;
    int iterations = 5;       // IDD iterations of the receiver during training
    int rx_steps = 10;        // per round
    int tx_steps = 10;        // per round
    int rounds = 20;
    int tx_batch = 256;
    PerturbConfig perturb;
    BlackBoxChannel channel;
    const ParameterSet* warm_start = nullptr;
};

// One receiver step: transmit known codewords through the black box, one
// Adam step on the demapper from the unfolded receiver loss. Returns the loss.
double rx_train_step(ParameterSet& ps, const AltTrainConfig& cfg, Adam& opt_rx, double lr, Rng& rng);

// Perturbation gradient of the transmitter loss (paper's score-function
// estimator with positive CE terms), averaged over the batch.
std::vector<Mat> tx_gradient_estimate(const ParameterSet& ps, const AltTrainConfig& cfg, double sigma2, Rng& rng);

// One transmitter step: estimate the gradient, one Adam step on the mapper.
double tx_train_step(ParameterSet& ps, const AltTrainConfig& cfg, double sigma2, Adam& opt_tx, double lr, Rng& rng);

// Alternating receiver/transmitter rounds with sigma_w^2 annealing.
ParameterSet alternating_train(const AltTrainConfig& cfg);

}  // namespace bicm
