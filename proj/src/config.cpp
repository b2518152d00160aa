#include "resp/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "resp/errors.hpp"

namespace resp::config {

using nlohmann::json;

RunConfig profile_defaults(const std::string& name) {
    RunConfig cfg; // paper-scale values are the struct defaults
    if (name == "paper") return cfg;
    if (name == "desk") {
        cfg.fs_hz = 20.0;
        cfg.records_per_class = 40;
        // Milder attenuation than the full-scale map: at 600 samples and 40
        // records per class the depth classes stay learnable only if distance
        // does not fold their amplitude ranges into each other.
        cfg.distance_gains = {1.0, 0.9, 0.8};
        cfg.base_filters = {64, 32, 16};
        cfg.base_kernels = {16, 8, 4};
        cfg.ma_window = 10;
        // Fewer records mean fewer optimizer steps per epoch, so each step is
        // larger to converge within the same 30-epoch budget. Above 2e-3 the
        // final epochs wobble instead of settling.
        cfg.step_size = 2e-3;
        cfg.subset_size = 200;
        cfg.generations = 20;
        return cfg;
    }
    throw config_error("unknown profile '" + name + "' (expected 'paper' or 'desk')");
}

namespace {

double as_number(const json& v, const std::string& key) {
    if (!v.is_number()) throw config_error("config key '" + key + "' must be a number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& key) {
    if (!v.is_number_integer()) throw config_error("config key '" + key + "' must be an integer");
    return v.get<int>();
}

std::uint64_t as_u64(const json& v, const std::string& key) {
    if (!v.is_number_unsigned() && !v.is_number_integer())
        throw config_error("config key '" + key + "' must be a nonnegative integer");
    const auto s = v.get<std::int64_t>();
    if (s < 0) throw config_error("config key '" + key + "' must be a nonnegative integer");
    return static_cast<std::uint64_t>(s);
}

std::string as_string(const json& v, const std::string& key) {
    if (!v.is_string()) throw config_error("config key '" + key + "' must be a string");
    return v.get<std::string>();
}

std::array<int, 3> as_int3(const json& v, const std::string& key) {
    if (!v.is_array() || v.size() != 3)
        throw config_error("config key '" + key + "' must be an array of 3 integers");
    std::array<int, 3> out{};
    for (std::size_t i = 0; i < 3; ++i) out[i] = as_int(v[i], key);
    return out;
}

std::array<double, 3> as_double3(const json& v, const std::string& key) {
    if (!v.is_array() || v.size() != 3)
        throw config_error("config key '" + key + "' must be an array of 3 numbers");
    std::array<double, 3> out{};
    for (std::size_t i = 0; i < 3; ++i) out[i] = as_number(v[i], key);
    return out;
}

} // namespace

void apply_json_file(RunConfig& cfg, const std::string& path) {
    std::ifstream is(path);
    if (!is) throw config_error("config file not found: " + path);
    json doc;
    try {
        doc = json::parse(is);
    } catch (const json::parse_error& e) {
        throw config_error("config file is not valid JSON: " + std::string(e.what()));
    }
    if (!doc.is_object()) throw config_error("config file must contain a JSON object");

    for (const auto& [key, value] : doc.items()) {
        if (key == "fs_hz") cfg.fs_hz = as_number(value, key);
        else if (key == "duration_s") cfg.duration_s = as_number(value, key);
        else if (key == "records_per_class") cfg.records_per_class = as_int(value, key);
        else if (key == "noise_std") cfg.noise_std = as_number(value, key);
        else if (key == "trend_max_coeff") cfg.trend_max_coeff = as_number(value, key);
        else if (key == "distance_gains") cfg.distance_gains = as_double3(value, key);
        else if (key == "ma_window") cfg.ma_window = as_int(value, key);
        else if (key == "detrend_degree") cfg.detrend_degree = as_int(value, key);
        else if (key == "train_fraction") cfg.train_fraction = as_number(value, key);
        else if (key == "base_filters") cfg.base_filters = as_int3(value, key);
        else if (key == "base_kernels") cfg.base_kernels = as_int3(value, key);
        else if (key == "base_pool") cfg.base_pool = as_int(value, key);
        else if (key == "base_hidden") cfg.base_hidden = as_int(value, key);
        else if (key == "pretrain_epochs") cfg.pretrain_epochs = as_int(value, key);
        else if (key == "final_epochs") cfg.final_epochs = as_int(value, key);
        else if (key == "batch_size") cfg.batch_size = as_int(value, key);
        else if (key == "step_size") cfg.step_size = as_number(value, key);
        else if (key == "generations") cfg.generations = as_int(value, key);
        else if (key == "parent_strategy") cfg.parent_strategy = as_string(value, key);
        else if (key == "crossover_prob") cfg.crossover_prob = as_number(value, key);
        else if (key == "mutation_prob") cfg.mutation_prob = as_number(value, key);
        else if (key == "subset_size") cfg.subset_size = as_int(value, key);
        else if (key == "population_size") cfg.population_size = as_int(value, key);
        else if (key == "parent_count") cfg.parent_count = as_int(value, key);
        else if (key == "elite_count") cfg.elite_count = as_int(value, key);
        else if (key == "final_mode") cfg.final_mode = as_string(value, key);
        else if (key == "chromosome") cfg.chromosome = as_string(value, key);
        else if (key == "seed") cfg.seed = as_u64(value, key);
        else if (key == "threads") cfg.threads = as_int(value, key);
        else if (key == "out_dir") cfg.out_dir = as_string(value, key);
        else throw config_error("unknown config key '" + key + "'");
    }
}

void validate(const RunConfig& cfg) {
    auto fail = [](const std::string& msg) { throw config_error(msg); };

    if (!(cfg.fs_hz > 0.0) || !std::isfinite(cfg.fs_hz)) fail("fs_hz must be a positive number");
    if (!(cfg.duration_s > 0.0) || !std::isfinite(cfg.duration_s))
        fail("duration_s must be a positive number");
    const double samples = cfg.fs_hz * cfg.duration_s;
    if (samples < 16.0) fail("fs_hz * duration_s must give at least 16 samples");
    if (samples > 1e7) fail("fs_hz * duration_s is implausibly large");
    if (cfg.records_per_class < 1) fail("records_per_class must be at least 1");
    if (cfg.noise_std < 0.0) fail("noise_std must be nonnegative");
    if (cfg.trend_max_coeff < 0.0) fail("trend_max_coeff must be nonnegative");
    for (const double g : cfg.distance_gains)
        if (!(g > 0.0) || !std::isfinite(g) || g > 10.0)
            fail("distance_gains entries must be positive and plausible");

    if (cfg.ma_window < 1) fail("ma_window must be at least 1");
    if (cfg.ma_window > static_cast<int>(samples)) fail("ma_window exceeds the record length");
    if (cfg.detrend_degree < 0) fail("detrend_degree must be nonnegative");
    if (cfg.detrend_degree >= static_cast<int>(samples))
        fail("detrend_degree must be smaller than the record length");
    if (!(cfg.train_fraction > 0.0) || !(cfg.train_fraction < 1.0))
        fail("train_fraction must lie strictly between 0 and 1");

    for (const int f : cfg.base_filters)
        if (f < 1) fail("base_filters entries must be positive");
    for (const int k : cfg.base_kernels)
        if (k < 1) fail("base_kernels entries must be positive");
    if (cfg.base_pool < 1) fail("base_pool must be positive");
    if (cfg.base_hidden < 1) fail("base_hidden must be positive");

    if (cfg.pretrain_epochs < 1) fail("pretrain_epochs must be at least 1");
    if (cfg.final_epochs < 1) fail("final_epochs must be at least 1");
    if (cfg.batch_size < 1) fail("batch_size must be at least 1");
    if (!(cfg.step_size > 0.0)) fail("step_size must be positive");

    if (cfg.generations < 0) fail("generations must be nonnegative");
    if (cfg.parent_strategy != "topk" && cfg.parent_strategy != "roulette")
        fail("parent_strategy must be 'topk' or 'roulette'");
    if (cfg.crossover_prob < 0.0 || cfg.crossover_prob > 1.0)
        fail("crossover_prob must be within [0,1]");
    if (cfg.mutation_prob < 0.0 || cfg.mutation_prob > 1.0)
        fail("mutation_prob must be within [0,1]");
    if (cfg.subset_size < 10) fail("subset_size must be at least 10");
    if (cfg.population_size < 2) fail("population_size must be at least 2");
    if (cfg.parent_count < 2 || cfg.parent_count % 2 != 0)
        fail("parent_count must be even and at least 2");
    if (cfg.parent_count > cfg.population_size)
        fail("parent_count cannot exceed population_size");
    if (cfg.elite_count < 0 || cfg.elite_count >= cfg.population_size)
        fail("elite_count must be in [0, population_size)");

    if (cfg.final_mode != "transfer" && cfg.final_mode != "scratch" && cfg.final_mode != "both")
        fail("final_mode must be 'transfer', 'scratch' or 'both'");
    if (cfg.threads < 1) fail("threads must be at least 1");
    if (cfg.threads > 256) fail("threads is implausibly large");
    if (cfg.out_dir.empty()) fail("out_dir must not be empty");
}

} // namespace resp::config
