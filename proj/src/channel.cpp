#include "bicm/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace bicm {

double snr_to_n0(double snr_db, double rate, int m) {
    if (rate <= 0.0 || rate > 1.0) throw std::invalid_argument("snr_to_n0: rate must be in (0,1]");
    if (m < 1) throw std::invalid_argument("snr_to_n0: m must be >= 1");
    return 1.0 / (rate * m * std::pow(10.0, snr_db / 10.0));
}

double n0_to_snr_db(double n0, double rate, int m) {
    if (n0 <= 0.0) throw std::invalid_argument("n0_to_snr_db: n0 must be > 0");
    return 10.0 * std::log10(1.0 / (rate * m * n0));
}

void awgn_inplace(std::vector<cplx>& x, double n0, Rng& rng) {
    if (n0 <= 0.0) throw std::invalid_argument("awgn: n0 must be > 0");
    double s = std::sqrt(n0 / 2.0);
    for (cplx& v : x) {
        double re = rng.gaussian();
        double im = rng.gaussian();
        v += cplx(s * re, s * im);
    }
}

std::vector<cplx> awgn(const std::vector<cplx>& x, double n0, Rng& rng) {
    std::vector<cplx> y = x;
    awgn_inplace(y, n0, rng);
    return y;
}

std::vector<cplx> BlackBoxChannel::apply(const std::vector<cplx>& x, double n0, Rng& rng) const {
    std::vector<cplx> y = x;
    for (const ChannelStage& st : stages) {
        switch (st.kind) {
            case ChannelStage::Kind::cubic_amam:
                for (cplx& v : y) v *= 1.0 - st.param * std::norm(v);
                break;
            case ChannelStage::Kind::tanh_amam:
                for (cplx& v : y) {
                    double r = std::abs(v);
                    // tanh(r)/r, series below the cancellation region
                    double g = r < 1e-6 ? 1.0 - r * r / 3.0 : std::tanh(r) / r;
                    v *= g;
                }
                break;
            case ChannelStage::Kind::phase_rotation:
                for (cplx& v : y) v *= cplx(std::cos(st.param), std::sin(st.param));
                break;
            case ChannelStage::Kind::awgn:
                awgn_inplace(y, st.param, rng);
                break;
        }
    }
    awgn_inplace(y, n0, rng);
    return y;
}

BlackBoxChannel BlackBoxChannel::default_impairments() {
    BlackBoxChannel ch;
    ch.stages.push_back({ChannelStage::Kind::cubic_amam, 0.05});
    ch.stages.push_back({ChannelStage::Kind::phase_rotation, 0.1});
    return ch;
}

ChannelStage parse_stage(const std::string& kind, double param) {
    if (kind == "cubic_amam") return {ChannelStage::Kind::cubic_amam, param};
    if (kind == "tanh_amam") return {ChannelStage::Kind::tanh_amam, param};
    if (kind == "phase_rotation") return {ChannelStage::Kind::phase_rotation, param};
    if (kind == "awgn") return {ChannelStage::Kind::awgn, param};
    throw std::invalid_argument("unknown channel stage kind: " + kind);
}

}  // namespace bicm
