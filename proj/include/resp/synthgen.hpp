#pragma once

// Synthetic respiration dataset generation. Eight classes of breathing are
// produced from a sin^6 waveform model parameterized by breathing rate (BPM)
// and depth (% of maximum chest excursion), then degraded with distance
// attenuation, sensor noise and baseline drift. Class 7 ("faulty") carries
// injected measurement artifacts on top of an otherwise valid waveform.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "resp/rng.hpp"

namespace resp::synth {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double v) const { return v >= lo && v <= hi; }
};

struct BreathClassSpec {
    int class_id = 0;
    std::string name;
    Interval rate_bpm;  // breaths per minute
    Interval depth_pct; // percent of maximum chest excursion
};

struct BreathRecord {
    std::vector<double> samples;
    int class_id = 0;
    double rate_bpm = 0.0;
    double depth_pct = 0.0;
    double distance_m = 0.0;
    std::int64_t seed_tag = 0; // position in generation order; not serialized

    bool operator==(const BreathRecord&) const = default;
};

struct GenConfig {
    double fs_hz = 100.0;
    double duration_s = 30.0;
    int records_per_class = 300;
    std::vector<double> distances_m = {0.5, 1.0, 1.5};
    std::map<double, double> distance_gain = {{0.5, 1.0}, {1.0, 0.55}, {1.5, 0.3}};
    double noise_std = 0.005;
    double trend_max_coeff = 0.05;
    std::uint64_t seed = 42;

    int samples_per_record() const;
    void validate() const; // throws config_error on violated invariants
};

// Records plus the sampling header they were generated under. Record lengths
// are uniform within a dataset; the file format stores them once.
struct Dataset {
    double fs_hz = 0.0;
    double duration_s = 0.0;
    std::vector<BreathRecord> records;

    bool operator==(const Dataset&) const = default;
};

inline constexpr int kNumClasses = 8;
inline constexpr int kFaultyClass = 7;

// The eight breathing classes with their (rate, depth) rectangles.
// Class 7 is the faulty-data class and permits any value.
const std::vector<BreathClassSpec>& class_table();

// Draws (rate_bpm, depth_pct) uniformly from the spec's rectangle. The faulty
// class delegates to a uniformly chosen class 0-6 rectangle.
std::pair<double, double> sample_params(const BreathClassSpec& spec, Rng& rng);

// x[n] = (depth/100) * sin^6(pi * (rate/60) * n/fs + phase), one breath cycle
// per 60/rate seconds. Throws on negative rate or depth.
std::vector<double> synth_waveform(double rate_bpm, double depth_pct, double fs_hz,
                                   double duration_s, double phase);

// Applies distance attenuation, additive Gaussian noise and a random
// polynomial baseline trend (degree <= 2, abscissa normalized to [0,1]).
// Throws on a distance missing from cfg.distance_gain.
std::vector<double> corrupt(const std::vector<double>& samples, double distance_m,
                            const GenConfig& cfg, Rng& rng);

// Artifact primitives used by make_faulty (exposed for direct construction).
void apply_step(std::vector<double>& x, std::size_t pos, double height);
void apply_spike(std::vector<double>& x, std::size_t pos, std::size_t width, double height);
void apply_saturation(std::vector<double>& x, std::size_t begin, std::size_t end, double value);

// Injects 1-4 artifacts (step jump, narrow spike, flat saturation segment)
// at uniform positions. Step/spike heights are at least 3x the base signal
// peak; saturation segments span 1-5 seconds.
std::vector<double> make_faulty(const std::vector<double>& base, double fs_hz, Rng& rng);

// Full dataset: records_per_class records per class, split evenly across
// distances, deterministic in cfg.seed. Class 7 superimposes artifacts on a
// randomly chosen class 0-6 waveform.
Dataset generate_dataset(const GenConfig& cfg);

// Binary dataset file, little-endian (magic "RSPD", version 1). seed_tag is
// positional and restored as the record index on read.
void write_dataset(const Dataset& ds, const std::string& path);
Dataset read_dataset(const std::string& path);

// Plain-text export: one row per record, comma-separated, label first.
void write_dataset_csv(const Dataset& ds, const std::string& path);

} // namespace resp::synth
