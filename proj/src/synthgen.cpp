#include "resp/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "resp/binio.hpp"
#include "resp/errors.hpp"

namespace resp::synth {

namespace {

constexpr char kMagic[4] = {'R', 'S', 'P', 'D'};
constexpr std::uint16_t kFormatVersion = 1;

// Fixed stream tags so each random decision has its own derived stream.
enum StreamTag : std::uint64_t {
    kTagRecordBase = 0x1000,
};

double peak_abs(const std::vector<double>& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

} // namespace

int GenConfig::samples_per_record() const { return static_cast<int>(std::lround(duration_s * fs_hz)); }

void GenConfig::validate() const {
    if (!(fs_hz > 0.0)) throw config_error("data.fs_hz must be > 0");
    if (!(duration_s > 0.0)) throw config_error("data.duration_s must be > 0");
    if (records_per_class <= 0) throw config_error("data.records_per_class must be >= 1");
    if (distances_m.empty()) throw config_error("data.distances_m must be non-empty");
    if (noise_std < 0.0) throw config_error("data.noise_std must be >= 0");
    if (trend_max_coeff < 0.0) throw config_error("data.trend_max_coeff must be >= 0");
    const double n = duration_s * fs_hz;
    if (std::abs(n - std::lround(n)) > 1e-9)
        throw config_error("data.fs_hz * data.duration_s must be an integer sample count");
    for (double d : distances_m)
        if (!distance_gain.count(d)) throw config_error("data.distance_gain is missing an entry for a listed distance");
}

const std::vector<BreathClassSpec>& class_table() {
    static const std::vector<BreathClassSpec> table = {
        {0, "Eupnea", {12, 20}, {30, 58}},
        {1, "Apnea", {0, 0}, {0, 0}},
        {2, "Tachypnea", {21, 50}, {30, 58}},
        {3, "Bradypnea", {1, 11}, {30, 58}},
        {4, "Hyperpnea", {12, 20}, {59, 100}},
        {5, "Hypopnea", {12, 20}, {1, 29}},
        {6, "Kussmaul's", {21, 50}, {59, 100}},
        {7, "Faulty data", {0, 50}, {0, 100}},
    };
    return table;
}

std::pair<double, double> sample_params(const BreathClassSpec& spec, Rng& rng) {
    if (spec.class_id == kFaultyClass) {
        const auto& base = class_table()[static_cast<std::size_t>(rng.uniform_int(0, kFaultyClass - 1))];
        return sample_params(base, rng);
    }
    // Closed intervals; uniform(lo, hi) is half-open but the endpoint has
    // measure zero, and degenerate intervals (apnea) collapse to the point.
    const double rate = spec.rate_bpm.lo == spec.rate_bpm.hi
                            ? spec.rate_bpm.lo
                            : rng.uniform(spec.rate_bpm.lo, spec.rate_bpm.hi);
    const double depth = spec.depth_pct.lo == spec.depth_pct.hi
                             ? spec.depth_pct.lo
                             : rng.uniform(spec.depth_pct.lo, spec.depth_pct.hi);
    return {rate, depth};
}

std::vector<double> synth_waveform(double rate_bpm, double depth_pct, double fs_hz,
                                   double duration_s, double phase) {
    if (!std::isfinite(rate_bpm) || !std::isfinite(depth_pct) || !std::isfinite(phase) || !(fs_hz > 0))
        throw std::invalid_argument("synth_waveform: inputs must be finite with fs_hz > 0");
    if (rate_bpm < 0 || depth_pct < 0)
        throw std::invalid_argument("synth_waveform: rate and depth must be non-negative");

    const auto n = static_cast<std::size_t>(std::lround(duration_s * fs_hz));
    const double amplitude = depth_pct / 100.0;
    const double freq_hz = rate_bpm / 60.0;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double s = std::sin(std::numbers::pi * freq_hz * (static_cast<double>(i) / fs_hz) + phase);
        const double s2 = s * s;
        x[i] = amplitude * s2 * s2 * s2;
    }
    return x;
}

std::vector<double> corrupt(const std::vector<double>& samples, double distance_m,
                            const GenConfig& cfg, Rng& rng) {
    const auto it = cfg.distance_gain.find(distance_m);
    if (it == cfg.distance_gain.end())
        throw std::invalid_argument("corrupt: no gain entry for requested distance");
    const double gain = it->second;

    double c0 = 0.0, c1 = 0.0, c2 = 0.0;
    if (cfg.trend_max_coeff > 0.0) {
        c0 = rng.uniform(-cfg.trend_max_coeff, cfg.trend_max_coeff);
        c1 = rng.uniform(-cfg.trend_max_coeff, cfg.trend_max_coeff);
        c2 = rng.uniform(-cfg.trend_max_coeff, cfg.trend_max_coeff);
    }

    const std::size_t n = samples.size();
    std::vector<double> out(n);
    const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / denom; // [0, 1]
        const double noise = cfg.noise_std > 0.0 ? rng.normal(0.0, cfg.noise_std) : 0.0;
        out[i] = gain * samples[i] + noise + c0 + c1 * t + c2 * t * t;
    }
    return out;
}

void apply_step(std::vector<double>& x, std::size_t pos, double height) {
    for (std::size_t i = pos; i < x.size(); ++i) x[i] += height;
}

void apply_spike(std::vector<double>& x, std::size_t pos, std::size_t width, double height) {
    const std::size_t end = std::min(x.size(), pos + width);
    for (std::size_t i = pos; i < end; ++i) x[i] += height;
}

void apply_saturation(std::vector<double>& x, std::size_t begin, std::size_t end, double value) {
    end = std::min(end, x.size());
    for (std::size_t i = begin; i < end; ++i) x[i] = value;
}

std::vector<double> make_faulty(const std::vector<double>& base, double fs_hz, Rng& rng) {
    std::vector<double> out = base;
    if (out.empty()) return out;

    // Heights are relative to the base peak; the floor keeps artifacts visible
    // on near-silent bases (apnea).
    const double ref = std::max(peak_abs(base), 0.25);
    const auto n = static_cast<std::int64_t>(out.size());
    const int artifact_count = static_cast<int>(rng.uniform_int(1, 4));

    for (int k = 0; k < artifact_count; ++k) {
        const auto kind = rng.uniform_int(0, 2);
        const auto pos = static_cast<std::size_t>(rng.uniform_int(0, n - 1));
        const double sign = rng.uniform01() < 0.5 ? -1.0 : 1.0;
        switch (kind) {
        case 0: // step jump, height >= 3x peak
            apply_step(out, pos, sign * ref * rng.uniform(3.0, 6.0));
            break;
        case 1: // spike, width <= 5 samples
            apply_spike(out, pos, static_cast<std::size_t>(rng.uniform_int(1, 5)),
                        sign * ref * rng.uniform(3.0, 6.0));
            break;
        default: { // flat saturation, 1-5 s
            const double dur = rng.uniform(1.0, 5.0);
            const auto len = static_cast<std::size_t>(std::lround(dur * fs_hz));
            apply_saturation(out, pos, pos + std::max<std::size_t>(len, 1), sign * ref * rng.uniform(1.5, 3.0));
            break;
        }
        }
    }
    return out;
}

Dataset generate_dataset(const GenConfig& cfg) {
    cfg.validate();

    const auto& table = class_table();
    const int n_distances = static_cast<int>(cfg.distances_m.size());
    const int base_quota = cfg.records_per_class / n_distances;
    const int remainder = cfg.records_per_class % n_distances;
    const Rng root(cfg.seed);

    Dataset ds;
    ds.fs_hz = cfg.fs_hz;
    ds.duration_s = cfg.duration_s;
    ds.records.reserve(static_cast<std::size_t>(kNumClasses) * cfg.records_per_class);

    std::int64_t index = 0;
    for (int class_id = 0; class_id < kNumClasses; ++class_id) {
        for (int di = 0; di < n_distances; ++di) {
            const double distance = cfg.distances_m[static_cast<std::size_t>(di)];
            // Remainder records go to the nearest distances, keeping the
            // per-class total exactly records_per_class.
            const int quota = base_quota + (di < remainder ? 1 : 0);
            for (int i = 0; i < quota; ++i, ++index) {
                // One independent stream per record, derived from (seed, index),
                // so generation order and parallelism cannot change the output.
                Rng rec_rng = root.fork(kTagRecordBase + static_cast<std::uint64_t>(index));

                const auto [rate, depth] = sample_params(table[class_id], rec_rng);
                const double phase = rec_rng.uniform(0.0, 2.0 * std::numbers::pi);
                auto clean = synth_waveform(rate, depth, cfg.fs_hz, cfg.duration_s, phase);
                auto noisy = corrupt(clean, distance, cfg, rec_rng);
                if (class_id == kFaultyClass) noisy = make_faulty(noisy, cfg.fs_hz, rec_rng);

                BreathRecord rec;
                rec.samples = std::move(noisy);
                rec.class_id = class_id;
                rec.rate_bpm = rate;
                rec.depth_pct = depth;
                rec.distance_m = distance;
                rec.seed_tag = index;
                ds.records.push_back(std::move(rec));
            }
        }
    }
    return ds;
}

void write_dataset(const Dataset& ds, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open for writing: " + path);

    const std::size_t samples_per_record = ds.records.empty() ? 0 : ds.records.front().samples.size();
    for (const auto& r : ds.records)
        if (r.samples.size() != samples_per_record)
            throw io_error("write_dataset: record lengths are not uniform");

    binio::write_bytes(os, kMagic, 4);
    binio::write_u16(os, kFormatVersion);
    binio::write_u32(os, static_cast<std::uint32_t>(ds.records.size()));
    binio::write_u32(os, static_cast<std::uint32_t>(samples_per_record));
    binio::write_f64(os, ds.fs_hz);
    binio::write_f64(os, ds.duration_s);

    for (const auto& r : ds.records) {
        binio::write_u8(os, static_cast<std::uint8_t>(r.class_id));
        binio::write_f64(os, r.distance_m);
        binio::write_f64(os, r.rate_bpm);
        binio::write_f64(os, r.depth_pct);
        binio::write_f64_array(os, r.samples.data(), r.samples.size());
    }
    os.flush();
    if (!os) throw io_error("write failed: " + path);
}

Dataset read_dataset(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open for reading: " + path);

    char magic[4];
    binio::read_bytes(is, magic, 4, "magic");
    if (std::memcmp(magic, kMagic, 4) != 0) throw io_error("bad magic: not a dataset file");
    const auto version = binio::read_u16(is, "version");
    if (version != kFormatVersion) throw io_error("unsupported dataset format version");

    const auto count = binio::read_u32(is, "record count");
    const auto samples_per_record = binio::read_u32(is, "samples per record");

    Dataset ds;
    ds.fs_hz = binio::read_f64(is, "fs_hz");
    ds.duration_s = binio::read_f64(is, "duration_s");
    ds.records.resize(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        auto& r = ds.records[i];
        r.class_id = binio::read_u8(is, "class id");
        if (r.class_id >= kNumClasses) throw io_error("record class id out of range");
        r.distance_m = binio::read_f64(is, "distance");
        r.rate_bpm = binio::read_f64(is, "rate");
        r.depth_pct = binio::read_f64(is, "depth");
        r.samples.resize(samples_per_record);
        binio::read_f64_array(is, r.samples.data(), samples_per_record, "samples");
        r.seed_tag = i;
    }
    return ds;
}

void write_dataset_csv(const Dataset& ds, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot open for writing: " + path);
    os.precision(17);
    for (const auto& r : ds.records) {
        os << r.class_id;
        for (double v : r.samples) os << ',' << v;
        os << '\n';
    }
    if (!os) throw io_error("write failed: " + path);
}

} // namespace resp::synth
