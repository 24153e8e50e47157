#include "bicm/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace bicm {

namespace {

struct ChunkResult {
    long bits = 0, bit_errors = 0, frames = 0, frame_errors = 0;
};

void simulate_frame(const SystemSpec& sys, double snr_db, double n0, Rng& rng, ChunkResult& acc) {
    const Gf2Encoder& enc = *sys.encoder;
    std::vector<uint8_t> info(enc.k());
    for (auto& b : info) b = uint8_t(rng.coin());
    std::vector<uint8_t> cw = enc.encode(info);

    Constellation built;
    const Constellation* con = sys.fixed_constellation;
    if (sys.mapper) {
        built = build_constellation(*sys.mapper, snr_db);
        con = &built;
    }
    std::vector<cplx> x = modulate(*con, cw);
    std::vector<cplx> y = sys.channel ? sys.channel->apply(x, n0, rng) : awgn(x, n0, rng);

    IddConfig icfg;
    icfg.graph = sys.graph;
    icfg.m = sys.m;
    icfg.iterations = sys.iterations;
    if (sys.neural)
        icfg.neural = sys.neural;
    else
        icfg.map_constellation = con;

    std::vector<double> llr = sys.use_idd ? idd_receive(icfg, y, snr_db, n0)
                                          : plain_receive(icfg, y, snr_db, n0, sys.iterations);
    std::vector<uint8_t> bits = hard_decide(llr);
    int errs = 0;
    for (int pos : enc.info_positions()) errs += bits[pos] != cw[pos];
    acc.bits += enc.k();
    acc.bit_errors += errs;
    acc.frames += 1;
    acc.frame_errors += errs > 0;
}

}  // namespace

std::vector<BerRecord> ber_sweep(const SystemSpec& sys, const SweepSpec& spec) {
    if (!sys.graph || !sys.encoder) throw std::invalid_argument("ber_sweep: system needs graph and encoder");
    if (spec.min_bit_errors < 100)
        throw std::invalid_argument("ber_sweep: min_bit_errors must be >= 100 for a reported point");
    int threads = std::max(1, spec.threads);
    int chunk = std::max(1, spec.frames_per_chunk);

    std::vector<BerRecord> out;
    for (size_t pi = 0; pi < spec.snr_grid_db.size(); ++pi) {
        double snr = spec.snr_grid_db[pi];
        double n0 = snr_to_n0(snr, sys.code_rate(), sys.m);
        uint64_t point_seed = mix64(spec.seed ^ mix64(0x5eed0000ULL + pi));
        BerRecord rec;
        rec.snr_db = snr;

        long wave = long(threads) * 4;
        long next_chunk = 0;
        while (rec.bit_errors < spec.min_bit_errors && rec.bits < spec.max_bits) {
            std::vector<ChunkResult> results(wave);
            std::atomic<long> cursor{0};
            auto worker = [&]() {
                for (;;) {
                    long slot = cursor.fetch_add(1);
                    if (slot >= wave) return;
                    long c0 = (next_chunk + slot) * chunk;
                    ChunkResult cr;
                    for (long f = c0; f < c0 + chunk; ++f) {
                        Rng rng = frame_rng(point_seed, uint64_t(f));
                        simulate_frame(sys, snr, n0, rng, cr);
                    }
                    results[slot] = cr;
                }
            };
            std::vector<std::thread> pool;
            for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
            worker();
            for (auto& th : pool) th.join();
            for (const ChunkResult& cr : results) {
                rec.bits += cr.bits;
                rec.bit_errors += cr.bit_errors;
                rec.frames += cr.frames;
                rec.frame_errors += cr.frame_errors;
            }
            next_chunk += wave;
        }
        rec.censored = rec.bit_errors < spec.min_bit_errors;
        out.push_back(rec);
    }
    return out;
}

double snr_at_ber(const std::vector<BerRecord>& records, double target_ber) {
    std::vector<BerRecord> r = records;
    std::sort(r.begin(), r.end(), [](const BerRecord& a, const BerRecord& b) { return a.snr_db < b.snr_db; });
    auto ber_floor = [](const BerRecord& rec) {
        double b = rec.ber();
        if (b <= 0.0) b = 0.5 / std::max(1L, rec.bits);  // Monte-Carlo floor for log interpolation
        return b;
    };
    for (size_t i = 0; i + 1 < r.size(); ++i) {
        double b0 = ber_floor(r[i]), b1 = ber_floor(r[i + 1]);
        if (b0 >= target_ber && target_ber >= b1 && b0 > b1) {
            double t = (std::log10(target_ber) - std::log10(b0)) / (std::log10(b1) - std::log10(b0));
            return r[i].snr_db + t * (r[i + 1].snr_db - r[i].snr_db);
        }
    }
    return std::nan("");
}

std::vector<GapEntry> compare_systems(const std::vector<std::string>& names,
                                      const std::vector<std::vector<BerRecord>>& curves, double target_ber) {
    std::vector<GapEntry> out;
    for (size_t i = 0; i < curves.size(); ++i) {
        for (size_t j = i + 1; j < curves.size(); ++j) {
            GapEntry e;
            e.a = names[i];
            e.b = names[j];
            e.snr_a = snr_at_ber(curves[i], target_ber);
            e.snr_b = snr_at_ber(curves[j], target_ber);
            e.gap_db = e.snr_a - e.snr_b;
            e.available = !std::isnan(e.snr_a) && !std::isnan(e.snr_b);
            out.push_back(e);
        }
    }
    return out;
}

BmiEstimate estimate_bmi(const Constellation& c, const DemapperParams* dp, double snr_db, double n0, long symbols,
                         uint64_t seed) {
    int m = c.m;
    Rng rng = frame_rng(seed, 0xb313u);
    double ce_nn = 0.0, ce_map = 0.0;
    const long chunk = 8192;
    std::vector<uint8_t> bits(chunk * m);
    std::vector<cplx> x(chunk);
    for (long done = 0; done < symbols; done += chunk) {
        long nb = std::min(chunk, symbols - done);
        for (long j = 0; j < nb; ++j) {
            int k = 0;
            for (int b = 0; b < m; ++b) {
                int bit = int(rng.coin());
                bits[j * m + b] = uint8_t(bit);
                k = (k << 1) | bit;
            }
            x[j] = c.points[k];
        }
        std::vector<cplx> y(x.begin(), x.begin() + nb);
        awgn_inplace(y, n0, rng);
        if (dp) {
            Mat f(int(nb), dp->in_dim());
            for (long j = 0; j < nb; ++j) {
                f(int(j), 0) = y[j].real();
                f(int(j), 1) = y[j].imag();
                f(int(j), 2) = dp->standardize(snr_db);
                for (int b = 3; b < dp->in_dim(); ++b) f(int(j), b) = 0.0;
            }
            Mat logits = nn_demap_batch(*dp, f);
            for (long j = 0; j < nb; ++j)
                for (int b = 0; b < m; ++b)
                    ce_nn += softplus((2.0 * bits[j * m + b] - 1.0) * logits(int(j), b));
        }
        for (long j = 0; j < nb; ++j) {
            std::vector<double> l = map_demap_awgn(c, y[j], n0, {});
            for (int b = 0; b < m; ++b) ce_map += softplus((2.0 * bits[j * m + b] - 1.0) * l[b]);
        }
    }
    double inv = 1.0 / (double(symbols) * std::log(2.0));
    BmiEstimate e;
    e.map = m - ce_map * inv;
    if (dp) e.nn = m - ce_nn * inv;
    return e;
}

Constellation baseline_constellation(int m) {
    if (m >= 2 && m % 2 == 0) return gray_qam(m);
    return gray_psk(m);
}

double find_waterfall_snr(const TannerGraph& g, const Gf2Encoder& enc, int m, double target_ber, uint64_t seed) {
    Constellation con = baseline_constellation(m);
    SystemSpec sys;
    sys.name = "baseline";
    sys.fixed_constellation = &con;
    sys.graph = &g;
    sys.encoder = &enc;
    sys.m = m;
    sys.use_idd = false;
    sys.iterations = 40;

    double snr = -2.0, prev_snr = 0.0, prev_ber = 1.0;
    for (int step = 0; step < 40; ++step) {
        SweepSpec sp;
        sp.snr_grid_db = {snr};
        sp.min_bit_errors = 120;
        sp.max_bits = 800000;
        sp.seed = seed;
        sp.threads = 2;
        BerRecord rec = ber_sweep(sys, sp)[0];
        double ber = std::max(rec.ber(), 1e-12);
        if (ber < target_ber) {
            if (step == 0) return snr;
            double t = (std::log10(target_ber) - std::log10(prev_ber)) / (std::log10(ber) - std::log10(prev_ber));
            return prev_snr + t * (snr - prev_snr);
        }
        prev_snr = snr;
        prev_ber = ber;
        snr += 0.5;
    }
    return snr;
}

void write_ber_csv(const std::vector<BerRecord>& records, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << "snr_db,bits,bit_errors,frames,frame_errors,ber,bler,censored\n";
    f.precision(12);
    for (const BerRecord& r : records) {
        f << r.snr_db << "," << r.bits << "," << r.bit_errors << "," << r.frames << "," << r.frame_errors << ","
          << r.ber() << "," << r.bler() << "," << (r.censored ? 1 : 0) << "\n";
    }
}

uint64_t fnv1a_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    uint64_t h = 1469598103934665603ULL;
    char buf[4096];
    while (f.read(buf, sizeof(buf)) || f.gcount() > 0) {
        for (std::streamsize i = 0; i < f.gcount(); ++i) {
            h ^= uint8_t(buf[i]);
            h *= 1099511628211ULL;
        }
        if (!f) break;
    }
    return h;
}

void write_manifest(const std::vector<std::string>& files, const std::string& dir) {
    std::ostringstream body;
    uint64_t all = 1469598103934665603ULL;
    for (const std::string& rel : files) {
        uint64_t h = fnv1a_file(dir + "/" + rel);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)h);
        body << buf << "  " << rel << "\n";
        for (char c : rel) {
            all ^= uint8_t(c);
            all *= 1099511628211ULL;
        }
        for (int i = 0; i < 8; ++i) {
            all ^= uint8_t(h >> (8 * i));
            all *= 1099511628211ULL;
        }
    }
    std::ofstream f(dir + "/manifest.txt");
    if (!f) throw std::runtime_error("cannot open manifest in " + dir);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)all);
    f << "combined " << buf << "\n" << body.str();
}

std::string run_experiment(const Config& cfg, const std::string& out_dir, int threads_override,
                           int64_t seed_override) {
    cfg.check_schema(1);
    cfg.require({"experiment.kind", "experiment.name", "system.m", "system.tx", "system.rx", "code.n",
                 "sweep.snr_db"});
    if (cfg.get_string("experiment.kind") != "sweep")
        throw std::runtime_error("config: experiment.kind: only 'sweep' runs through run_experiment");

    std::filesystem::create_directories(out_dir);
    {
        std::ofstream echo(out_dir + "/config.toml");
        echo << cfg.text();
    }

    int m = int(cfg.get_int("system.m"));
    int n = int(cfg.get_int("code.n"));
    std::string family = cfg.get_string("code.family", "80211n");
    TannerGraph graph;
    if (family == "80211n")
        graph = load_80211n(n);
    else if (family.rfind("alist:", 0) == 0)
        graph = load_alist(family.substr(6));
    else
        throw std::runtime_error("config: code.family: unknown family " + family);
    Gf2Encoder enc(graph);

    ParameterSet ps;
    Constellation fixed;
    SystemSpec sys;
    sys.name = cfg.get_string("system.name", cfg.get_string("experiment.name"));
    sys.graph = &graph;
    sys.encoder = &enc;
    sys.m = m;
    sys.use_idd = cfg.get_bool("system.idd", false);
    sys.iterations = int(cfg.get_int("system.iterations", 40));

    std::string tx = cfg.get_string("system.tx");
    std::string rx = cfg.get_string("system.rx");
    bool need_ckpt = tx == "checkpoint" || rx == "checkpoint";
    if (need_ckpt) {
        cfg.require({"system.checkpoint"});
        ps = load_checkpoint(cfg.get_string("system.checkpoint"));
        if (ps.m != m) throw std::runtime_error("config: checkpoint m mismatch");
    }
    if (tx == "gray") {
        fixed = baseline_constellation(m);
        sys.fixed_constellation = &fixed;
    } else if (tx == "checkpoint") {
        if (!ps.has_mapper) throw std::runtime_error("config: checkpoint has no mapper");
        sys.mapper = &ps.mapper;
    } else {
        throw std::runtime_error("config: system.tx: expected 'gray' or 'checkpoint'");
    }
    if (rx == "checkpoint") {
        sys.neural = &ps.demapper;
    } else if (rx != "map") {
        throw std::runtime_error("config: system.rx: expected 'map' or 'checkpoint'");
    }

    BlackBoxChannel chan;
    bool has_chan = cfg.has("channel.stages");
    if (has_chan) {
        for (const std::string& st : cfg.get_string_array("channel.stages")) {
            size_t colon = st.find(':');
            if (colon == std::string::npos) throw std::runtime_error("config: channel.stages: expected kind:param");
            chan.stages.push_back(parse_stage(st.substr(0, colon), std::stod(st.substr(colon + 1))));
        }
        sys.channel = &chan;
    }

    SweepSpec sp;
    sp.snr_grid_db = cfg.get_double_array("sweep.snr_db");
    sp.min_bit_errors = cfg.get_int("sweep.min_bit_errors", 2000);
    sp.max_bits = cfg.get_int("sweep.max_bits", 100000000);
    sp.seed = uint64_t(cfg.get_int("sweep.seed", 1));
    sp.threads = int(cfg.get_int("sweep.threads", 1));
    if (threads_override > 0) sp.threads = threads_override;
    if (seed_override >= 0) sp.seed = uint64_t(seed_override);

    std::vector<BerRecord> recs = ber_sweep(sys, sp);
    std::vector<std::string> files;
    std::string ber_name = "ber_" + sys.name + ".csv";
    write_ber_csv(recs, out_dir + "/" + ber_name);
    files.push_back(ber_name);
    if (sys.mapper) {
        Constellation mid = build_constellation(*sys.mapper, ps.snr_mid);
        std::string cname = "constellation_" + sys.name + ".csv";
        export_constellation_csv(mid, out_dir + "/" + cname);
        files.push_back(cname);
    }
    files.push_back("config.toml");
    write_manifest(files, out_dir);
    return out_dir;
}

}  // namespace bicm
