#pragma once

// Run configuration: profile defaults, JSON config files, and validation.
// Precedence is profile defaults < config file < command-line flags; the
// flag layer is applied by the CLI, everything else lives here.

#include <array>
#include <cstdint>
#include <string>

namespace resp::config {

struct RunConfig {
    // synthesis
    double fs_hz = 100.0;
    double duration_s = 30.0;
    int records_per_class = 300;
    double noise_std = 0.005;
    double trend_max_coeff = 0.05;
    std::array<double, 3> distance_gains{1.0, 0.55, 0.3}; // at 0.5 / 1.0 / 1.5 m

    // preprocessing + split
    int ma_window = 50;
    int detrend_degree = 5;
    double train_fraction = 0.8;

    // base network
    std::array<int, 3> base_filters{256, 128, 64};
    std::array<int, 3> base_kernels{64, 32, 16};
    int base_pool = 2;
    int base_hidden = 64;

    // optimization
    int pretrain_epochs = 30;
    int final_epochs = 30;
    int batch_size = 50;
    double step_size = 1e-3;

    // genetic search
    int generations = 200;
    std::string parent_strategy = "topk"; // or "roulette"
    double crossover_prob = 0.8;
    double mutation_prob = 0.4;
    int subset_size = 1000;
    int population_size = 8;
    int parent_count = 6;
    int elite_count = 2;

    // command modifiers
    std::string final_mode = "both";  // train-final: transfer | scratch | both
    std::string chromosome;           // train-final: "g1,g2,g3,g4"; empty = from search output

    // run environment
    std::uint64_t seed = 42;
    int threads = 1;
    std::string out_dir = "out";
};

// "paper" (full-scale defaults above) or "desk" (scaled-down: fs 20 Hz,
// 40 records/class, gentler attenuation, base 64/32/16 filters with 16/8/4
// kernels, 10-point smoothing, step 2e-3, subset 200, 20 generations).
// Throws config_error otherwise.
RunConfig profile_defaults(const std::string& name);

// Applies a flat JSON object onto cfg. Unknown keys, wrong types, and
// malformed JSON each raise config_error with a distinct message.
void apply_json_file(RunConfig& cfg, const std::string& path);

// Field-by-field bounds checks; each failure names the offending field.
void validate(const RunConfig& cfg);

} // namespace resp::config
