#include "bicm/exit_design.hpp"

#include "bicm/simplex.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace bicm {

namespace {

struct GaussHermite {
    std::vector<double> x, w;
};

// Golub-Welsch on the Hermite recurrence (physicists' weight e^{-x^2}).
GaussHermite gauss_hermite(int n) {
    Eigen::MatrixXd jm = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        double b = std::sqrt(i / 2.0);
        jm(i - 1, i) = b;
        jm(i, i - 1) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jm);
    GaussHermite gh;
    gh.x.resize(n);
    gh.w.resize(n);
    double sqrt_pi = std::sqrt(M_PI);
    for (int i = 0; i < n; ++i) {
        gh.x[i] = es.eigenvalues()(i);
        double v = es.eigenvectors()(0, i);
        gh.w[i] = sqrt_pi * v * v;
    }
    return gh;
}

const GaussHermite& gh96() {
    static const GaussHermite gh = gauss_hermite(96);
    return gh;
}

constexpr double kInvSqrtPi = 0.5641895835477562869;

}  // namespace

double j_function(double mu) {
    if (mu < 0.0) throw std::invalid_argument("j_function: mu must be >= 0");
    if (mu == 0.0) return 0.0;
    // substitute tau = mu + 2 sqrt(mu) t against weight e^{-t^2}
    const GaussHermite& gh = gh96();
    double root = 2.0 * std::sqrt(mu);
    double acc = 0.0;
    for (size_t i = 0; i < gh.x.size(); ++i) acc += gh.w[i] * log2_1p_exp(-(mu + root * gh.x[i]));
    return 1.0 - kInvSqrtPi * acc;
}

double j_inverse(double i) {
    if (i < 0.0 || i >= 1.0) throw std::invalid_argument("j_inverse: argument must be in [0,1)");
    if (i == 0.0) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (j_function(hi) < i) {
        hi *= 2.0;
        if (hi > 1e6) return hi;  // J saturates to 1 in double precision
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double v = j_function(mid);
        if (std::abs(v - i) < 1e-12) return mid;
        (v < i ? lo : hi) = mid;
        if (hi - lo < 1e-13 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

double estimate_mi(const std::vector<double>& llrs, const std::vector<uint8_t>& bits) {
    if (llrs.size() != bits.size() || llrs.empty())
        throw std::invalid_argument("estimate_mi: length mismatch or empty input");
    double acc = 0.0;
    for (size_t i = 0; i < llrs.size(); ++i) acc += log2_1p_exp(-llrs[i] * (bits[i] ? -1.0 : 1.0));
    double mi = 1.0 - acc / double(llrs.size());
    return clampd(mi, 0.0, 1.0);
}

TMeasurement measure_T(const ExitSystem& sys, double snr_db, double i_a, long min_llr_samples) {
    if (i_a < 0.0 || i_a >= 1.0) throw std::invalid_argument("measure_T: i_a must be in [0,1)");
    if (!sys.constellation && !sys.mapper) throw std::invalid_argument("measure_T: no transmit constellation");
    int m = sys.m;
    double n0 = snr_to_n0(snr_db, sys.rate, m);
    Constellation built;
    const Constellation* con = sys.constellation;
    if (sys.mapper) {
        built = build_constellation(*sys.mapper, snr_db);
        con = &built;
    }
    double mu = i_a > 0.0 ? j_inverse(i_a) : 0.0;
    double psd = std::sqrt(2.0 * mu);

    long symbols = (min_llr_samples + m - 1) / m;
    Rng rng = frame_rng(sys.seed, 0x7e5u);
    std::vector<uint8_t> bits(size_t(symbols) * m);
    std::vector<double> priors(size_t(symbols) * m), lext(size_t(symbols) * m);
    std::vector<cplx> x(symbols);
    for (long j = 0; j < symbols; ++j) {
        int k = 0;
        for (int b = 0; b < m; ++b) {
            int bit = int(rng.coin());
            bits[j * m + b] = uint8_t(bit);
            k = (k << 1) | bit;
        }
        x[j] = con->points[k];
        for (int b = 0; b < m; ++b)
            priors[j * m + b] = mu * (bits[j * m + b] ? -1.0 : 1.0) + psd * rng.gaussian();
    }
    std::vector<cplx> y =
        sys.channel ? sys.channel->apply(x, n0, rng) : awgn(x, n0, rng);

    if (sys.neural) {
        const DemapperParams& p = *sys.neural;
        Mat f(int(symbols), p.in_dim());
        for (long j = 0; j < symbols; ++j) {
            f(int(j), 0) = y[j].real();
            f(int(j), 1) = y[j].imag();
            f(int(j), 2) = p.standardize(snr_db);
            for (int b = 0; b < m; ++b) f(int(j), 3 + b) = clampd(priors[j * m + b], -kLlrMax, kLlrMax);
        }
        Mat logits = nn_demap_batch(p, f);
        for (long j = 0; j < symbols; ++j)
            for (int b = 0; b < m; ++b)
                lext[j * m + b] = logits(int(j), b) - clampd(priors[j * m + b], -kLlrMax, kLlrMax);
    } else {
        std::vector<double> pr(m);
        for (long j = 0; j < symbols; ++j) {
            for (int b = 0; b < m; ++b) pr[b] = clampd(priors[j * m + b], -kLlrMax, kLlrMax);
            std::vector<double> l = map_demap_awgn(*con, y[j], n0, pr);
            for (int b = 0; b < m; ++b) lext[j * m + b] = l[b] - pr[b];
        }
    }
    TMeasurement t;
    t.samples = symbols * m;
    t.low_sample_warning = t.samples < 10000;
    t.mi = estimate_mi(lext, bits);
    t.t = j_inverse(std::min(t.mi, 1.0 - 1e-12));
    return t;
}

TProvider monte_carlo_T(const ExitSystem& sys, long min_llr_samples) {
    ExitSystem copy = sys;
    return [copy, min_llr_samples](double snr_db, const std::vector<double>& iagrid) {
        std::vector<double> out;
        out.reserve(iagrid.size());
        ExitSystem s = copy;
        for (double ia : iagrid) {
            s.seed = mix64(copy.seed ^ mix64(uint64_t(ia * 1e9) ^ uint64_t(int64_t(snr_db * 1e6))));
            out.push_back(measure_T(s, snr_db, ia, min_llr_samples).t);
        }
        return out;
    };
}

LpProfile design_lp(const std::vector<double>& t_grid, int c, int d, double beta, int grid_D, double delta_margin) {
    if (int(t_grid.size()) != grid_D) throw std::invalid_argument("design_lp: t grid size != D");
    if (d < 2 || c < 2) throw std::invalid_argument("design_lp: need d >= 2 and c >= 2");
    int nv = d - 1;  // lambda_2 .. lambda_d
    std::vector<double> obj(nv);
    for (int i = 2; i <= d; ++i) obj[i - 2] = 1.0 / double(i);

    std::vector<std::vector<double>> a;
    std::vector<char> rel;
    std::vector<double> b;

    a.emplace_back(nv, 1.0);
    rel.push_back('=');
    b.push_back(1.0);

    {
        std::vector<double> row(nv, 0.0);
        row[0] = 1.0;
        a.push_back(row);
        rel.push_back('<');
        b.push_back(beta);
    }

    for (int j = 0; j < grid_D; ++j) {
        double h = double(j) / grid_D;
        double mu = h > 0.0 ? j_inverse(h) : 0.0;
        double rhs = h > 0.0 ? 1.0 - j_function(j_inverse(1.0 - h) / double(c - 1)) : 0.0;
        std::vector<double> row(nv);
        for (int i = 2; i <= d; ++i) row[i - 2] = j_function(t_grid[j] + (i - 1) * mu);
        a.push_back(std::move(row));
        rel.push_back('>');
        b.push_back(rhs + delta_margin);
    }

    LpResult r = solve_lp_max(obj, a, rel, b);
    LpProfile p;
    if (r.status != LpResult::Status::optimal) return p;
    p.feasible = true;
    p.lambda.assign(d + 1, 0.0);
    double sum_over = 0.0;
    for (int i = 2; i <= d; ++i) {
        p.lambda[i] = std::max(0.0, r.x[i - 2]);
        sum_over += p.lambda[i] / double(i);
    }
    p.rate = 1.0 - 1.0 / (double(c) * sum_over);
    return p;
}

DesignResult code_design_search(const DesignConfig& cfg, const TProvider& t_provider) {
    DesignResult res;
    res.c = cfg.c;
    double snr = cfg.initial_snr_db;
    double step = cfg.delta_snr_db;
    std::vector<double> iagrid(cfg.grid_D);
    for (int j = 0; j < cfg.grid_D; ++j) iagrid[j] = double(j) / cfg.grid_D;
    for (;;) {
        std::vector<double> t = t_provider(snr, iagrid);
        LpProfile lp = design_lp(t, cfg.c, cfg.d_max, cfg.beta, cfg.grid_D, cfg.delta_margin);
        res.probes.push_back({snr, lp.feasible, lp.rate});
        if (lp.feasible && lp.rate > cfg.target_rate) {
            res.found = true;
            res.lambda = lp.lambda;
            res.final_snr_db = snr;
            snr -= step;
        } else {
            snr += step;
        }
        step *= 0.5;
        if (step < cfg.epsilon_db) break;
    }
    return res;
}

DesignResult code_design_scan_c(DesignConfig cfg, const std::vector<int>& c_candidates, const TProvider& t_provider) {
    DesignResult best;
    for (int c : c_candidates) {
        cfg.c = c;
        DesignResult r = code_design_search(cfg, t_provider);
        if (r.found && (!best.found || r.final_snr_db < best.final_snr_db)) best = r;
    }
    return best;
}

double stability_cap(double n0, int c) {
    if (n0 <= 0.0) throw std::invalid_argument("stability_cap: n0 must be > 0");
    if (c < 2) throw std::invalid_argument("stability_cap: c must be >= 2");
    return std::exp(1.0 / n0) / double(c - 1);
}

double cn_curve_inverse_concentrated(double h, int c) {
    if (h <= 0.0) return 0.0;
    if (h >= 1.0) return 1.0;
    return 1.0 - j_function(j_inverse(1.0 - h) / double(c - 1));
}

double cn_curve(double i_a, const std::vector<double>& rho) {
    if (i_a <= 0.0) return 0.0;
    if (i_a >= 1.0) return 1.0;
    double mu = j_inverse(1.0 - i_a);
    double acc = 0.0;
    for (size_t j = 2; j < rho.size(); ++j) {
        if (rho[j] > 0.0) acc += rho[j] * j_function((j - 1) * mu);
    }
    return 1.0 - acc;
}

double cn_curve_inverse(double h, const std::vector<double>& rho) {
    if (h <= 0.0) return 0.0;
    if (h >= 1.0) return 1.0;
    double lo = 0.0, hi = 1.0 - 1e-12;
    for (int it = 0; it < 100; ++it) {
        double mid = 0.5 * (lo + hi);
        (cn_curve(mid, rho) < h ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

bool tunnel_open(const std::vector<double>& lambda, const std::vector<double>& rho, const std::vector<double>& t_grid,
                 int grid_D, double margin) {
    for (int j = 0; j < grid_D; ++j) {
        double h = double(j) / grid_D;
        double mu = h > 0.0 ? j_inverse(h) : 0.0;
        double lhs = 0.0;
        for (size_t i = 2; i < lambda.size(); ++i) {
            if (lambda[i] > 0.0) lhs += lambda[i] * j_function(t_grid[j] + (i - 1) * mu);
        }
        double rhs = cn_curve_inverse(h, rho);
        if (lhs <= rhs + margin) return false;
    }
    return true;
}

}  // namespace

double exit_threshold_snr(const std::vector<double>& lambda, const std::vector<double>& rho,
                          const TProvider& t_provider, int grid_D, double lo_db, double hi_db, double tol_db,
                          double margin) {
    std::vector<double> iagrid(grid_D);
    for (int j = 0; j < grid_D; ++j) iagrid[j] = double(j) / grid_D;
    auto open_at = [&](double snr) {
        std::vector<double> t = t_provider(snr, iagrid);
        return tunnel_open(lambda, rho, t, grid_D, margin);
    };
    if (!open_at(hi_db)) return std::nan("");
    if (open_at(lo_db)) return lo_db;
    double lo = lo_db, hi = hi_db;
    while (hi - lo > tol_db) {
        double mid = 0.5 * (lo + hi);
        (open_at(mid) ? hi : lo) = mid;
    }
    return hi;
}

ExitChartData exit_chart(const std::vector<double>& lambda, int c, const std::vector<double>& t_grid, int grid_D) {
    ExitChartData chart;
    for (int j = 0; j < grid_D; ++j) {
        double h = double(j) / grid_D;
        double mu = h > 0.0 ? j_inverse(h) : 0.0;
        double vn = 0.0;
        for (size_t i = 2; i < lambda.size(); ++i) {
            if (lambda[i] > 0.0) vn += lambda[i] * j_function(t_grid[j] + (i - 1) * mu);
        }
        chart.i_a.push_back(h);
        chart.i_e_vn.push_back(std::min(vn, 1.0));
        chart.i_e_cn_inv.push_back(cn_curve_inverse_concentrated(h, c));
    }
    return chart;
}

void append_trajectory(ExitChartData& chart, const IddConfig& cfg, const Constellation& con, double snr_db, double n0,
                       int frames, uint64_t seed) {
    cfg.validate();
    int n = cfg.graph->n;
    Gf2Encoder enc(*cfg.graph);
    std::vector<std::vector<double>> dec_mi(cfg.iterations), dem_mi(cfg.iterations);
    std::vector<double> acc_dec(cfg.iterations, 0.0), acc_dem(cfg.iterations, 0.0);
    for (int f = 0; f < frames; ++f) {
        Rng rng = frame_rng(seed, uint64_t(f));
        std::vector<uint8_t> info(enc.k());
        for (auto& b : info) b = uint8_t(rng.coin());
        std::vector<uint8_t> cw = enc.encode(info);
        std::vector<cplx> x = modulate(con, cw);
        std::vector<cplx> y = awgn(x, n0, rng);
        IddTrace trace;
        idd_receive(cfg, y, snr_db, n0, &trace);
        for (int i = 0; i < cfg.iterations; ++i) {
            acc_dem[i] += estimate_mi(trace.demap_ext[i], cw);
            acc_dec[i] += estimate_mi(trace.dec_ext[i], cw);
        }
    }
    (void)n;
    for (int i = 0; i < cfg.iterations; ++i)
        chart.trajectory.emplace_back(acc_dec[i] / frames, acc_dem[i] / frames);
}

void write_exit_csv(const ExitChartData& chart, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f.precision(12);
    f << "i_a,i_e_vn,i_e_cn_inv\n";
    for (size_t i = 0; i < chart.i_a.size(); ++i)
        f << chart.i_a[i] << "," << chart.i_e_vn[i] << "," << chart.i_e_cn_inv[i] << "\n";
    f << "trajectory_i_dec,trajectory_i_dem\n";
    for (auto [a, e] : chart.trajectory) f << a << "," << e << "\n";
}

void write_profile_txt(const std::vector<double>& lambda, int c, double rate, double threshold_snr_db,
                       const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f.precision(12);
    f << "c " << c << "\n";
    f << "rate " << rate << "\n";
    f << "threshold_snr_db " << threshold_snr_db << "\n";
    for (size_t i = 2; i < lambda.size(); ++i) {
        if (lambda[i] > 0.0) f << i << " " << lambda[i] << "\n";
    }
}

}  // namespace bicm
