#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "resp/errors.hpp"
#include "resp/synthgen.hpp"

using namespace resp;
using namespace resp::synth;

namespace {

GenConfig tiny_config() {
    GenConfig cfg;
    cfg.fs_hz = 20.0;
    cfg.duration_s = 10.0;
    cfg.records_per_class = 6;
    cfg.seed = 5;
    return cfg;
}

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

} // namespace

TEST_CASE("class table carries the published rate/depth rectangles") {
    const auto& table = class_table();
    REQUIRE(table.size() == 8);
    const struct {
        int id;
        double rlo, rhi, dlo, dhi;
    } want[] = {
        {0, 12, 20, 30, 58}, {1, 0, 0, 0, 0},    {2, 21, 50, 30, 58},  {3, 1, 11, 30, 58},
        {4, 12, 20, 59, 100}, {5, 12, 20, 1, 29}, {6, 21, 50, 59, 100},
    };
    for (const auto& w : want) {
        const auto& row = table[static_cast<std::size_t>(w.id)];
        CHECK(row.class_id == w.id);
        CHECK(row.rate_bpm.lo == w.rlo);
        CHECK(row.rate_bpm.hi == w.rhi);
        CHECK(row.depth_pct.lo == w.dlo);
        CHECK(row.depth_pct.hi == w.dhi);
    }
    CHECK(table[7].class_id == kFaultyClass);
}

TEST_CASE("parameter sampling stays inside each class rectangle") {
    const auto& table = class_table();
    Rng rng(77);
    for (int c = 0; c < 7; ++c) {
        for (int k = 0; k < 200; ++k) {
            const auto [rate, depth] = sample_params(table[static_cast<std::size_t>(c)], rng);
            CHECK(table[static_cast<std::size_t>(c)].rate_bpm.contains(rate));
            CHECK(table[static_cast<std::size_t>(c)].depth_pct.contains(depth));
        }
    }
    // Apnea's rectangle is the single point (0, 0).
    const auto [r1, d1] = sample_params(table[1], rng);
    CHECK(r1 == 0.0);
    CHECK(d1 == 0.0);
    // The faulty class borrows a real class's rectangle, so values stay in
    // the union of the others.
    for (int k = 0; k < 200; ++k) {
        const auto [rate, depth] = sample_params(table[7], rng);
        CHECK(rate <= 50.0);
        CHECK(depth <= 100.0);
        CHECK(rate >= 0.0);
        CHECK(depth >= 0.0);
    }
}

TEST_CASE("waveform model: amplitude, period and the apnea flatline") {
    const auto x = synth_waveform(12.0, 48.0, 100.0, 30.0, 0.3);
    REQUIRE(x.size() == 3000);
    double peak = 0.0, mn = 1e9;
    for (const double v : x) {
        peak = std::max(peak, v);
        mn = std::min(mn, v);
    }
    CHECK(mn >= 0.0);            // sin^6 is nonnegative
    CHECK(peak <= 0.48 + 1e-12); // depth/100 bounds the amplitude
    CHECK(peak > 0.45);          // and is actually reached during 6 cycles

    // 12 BPM = one cycle per 5 s = 500 samples at 100 Hz.
    for (std::size_t i = 0; i + 500 < x.size(); i += 97)
        CHECK(x[i] == doctest::Approx(x[i + 500]).epsilon(1e-9));

    const auto flat = synth_waveform(0.0, 0.0, 100.0, 5.0, 0.0);
    for (const double v : flat) CHECK(v == 0.0);

    CHECK_THROWS_AS(synth_waveform(-1.0, 10.0, 100.0, 5.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(synth_waveform(10.0, -1.0, 100.0, 5.0, 0.0), std::invalid_argument);
}

TEST_CASE("corruption applies the distance gain and a bounded drift") {
    GenConfig cfg = tiny_config();
    const auto x = synth_waveform(15.0, 50.0, cfg.fs_hz, cfg.duration_s, 0.0);

    SUBCASE("pure attenuation when noise and drift are disabled") {
        cfg.noise_std = 0.0;
        cfg.trend_max_coeff = 0.0;
        Rng rng(3);
        const auto y = corrupt(x, 1.0, cfg, rng);
        for (std::size_t i = 0; i < x.size(); ++i) CHECK(y[i] == 0.55 * x[i]);
        const auto z = corrupt(x, 1.5, cfg, rng);
        for (std::size_t i = 0; i < x.size(); ++i) CHECK(z[i] == 0.3 * x[i]);
    }

    SUBCASE("drift stays within the coefficient budget") {
        cfg.noise_std = 0.0;
        cfg.trend_max_coeff = 0.05;
        Rng rng(4);
        const auto y = corrupt(x, 0.5, cfg, rng);
        for (std::size_t i = 0; i < x.size(); ++i)
            CHECK(std::abs(y[i] - x[i]) <= 3 * 0.05 + 1e-12); // |c0| + |c1 t| + |c2 t^2|
    }

    SUBCASE("unknown distance is rejected") {
        Rng rng(5);
        CHECK_THROWS_AS(corrupt(x, 0.75, cfg, rng), std::invalid_argument);
    }
}

TEST_CASE("artifact primitives edit the expected sample ranges") {
    std::vector<double> x(10, 1.0);
    apply_step(x, 4, 2.0); // everything from pos on shifts
    for (std::size_t i = 0; i < 4; ++i) CHECK(x[i] == 1.0);
    for (std::size_t i = 4; i < 10; ++i) CHECK(x[i] == 3.0);

    std::vector<double> y(10, 0.0);
    apply_spike(y, 8, 5, 2.0); // width clamps at the end
    for (std::size_t i = 0; i < 8; ++i) CHECK(y[i] == 0.0);
    CHECK(y[8] == 2.0);
    CHECK(y[9] == 2.0);

    std::vector<double> z(10, 0.5);
    apply_saturation(z, 2, 5, -1.0);
    CHECK(z[1] == 0.5);
    CHECK(z[2] == -1.0);
    CHECK(z[4] == -1.0);
    CHECK(z[5] == 0.5);
}

TEST_CASE("faulty records deviate hard from their base waveform") {
    const auto base = synth_waveform(15.0, 50.0, 20.0, 10.0, 0.1);
    double peak = 0.0;
    for (const double v : base) peak = std::max(peak, std::abs(v));
    for (std::uint64_t seed = 0; seed < 32; ++seed) {
        Rng rng(seed);
        const auto bad = make_faulty(base, 20.0, rng);
        REQUIRE(bad.size() == base.size());
        double dev = 0.0;
        for (std::size_t i = 0; i < bad.size(); ++i) dev = std::max(dev, std::abs(bad[i] - base[i]));
        // Steps and spikes reach 3x the reference, saturation at least 1.5x
        // of max(peak, 0.25) minus the base value underneath.
        CHECK(dev >= 1.5 * std::max(peak, 0.25) - peak);
        CHECK(dev > 0.0);
    }
}

TEST_CASE("dataset generation: counts, labels, distances, determinism") {
    const GenConfig cfg = tiny_config();
    const Dataset ds = generate_dataset(cfg);
    REQUIRE(ds.records.size() == static_cast<std::size_t>(8 * cfg.records_per_class));
    CHECK(ds.fs_hz == cfg.fs_hz);
    CHECK(ds.duration_s == cfg.duration_s);

    std::vector<int> per_class(8, 0);
    std::vector<int> per_distance_c0;
    for (const auto& r : ds.records) {
        REQUIRE(r.class_id >= 0);
        REQUIRE(r.class_id < 8);
        ++per_class[static_cast<std::size_t>(r.class_id)];
        CHECK(r.samples.size() == static_cast<std::size_t>(cfg.samples_per_record()));
        const bool known = r.distance_m == 0.5 || r.distance_m == 1.0 || r.distance_m == 1.5;
        CHECK(known);
        if (r.class_id == 0) per_distance_c0.push_back(static_cast<int>(r.distance_m * 2));
    }
    for (const int n : per_class) CHECK(n == cfg.records_per_class);
    // 6 per class over 3 distances = 2 each.
    CHECK(std::count(per_distance_c0.begin(), per_distance_c0.end(), 1) == 2);
    CHECK(std::count(per_distance_c0.begin(), per_distance_c0.end(), 2) == 2);
    CHECK(std::count(per_distance_c0.begin(), per_distance_c0.end(), 3) == 2);

    const Dataset again = generate_dataset(cfg);
    CHECK(again == ds);
    GenConfig other = cfg;
    other.seed = 6;
    CHECK(generate_dataset(other) != ds);
}

TEST_CASE("per-class count that does not divide the distance count still lands exactly") {
    GenConfig cfg = tiny_config();
    cfg.records_per_class = 40; // 3 distances -> 14/13/13
    const Dataset ds = generate_dataset(cfg);
    std::vector<int> per_class(8, 0);
    int c2_near = 0;
    for (const auto& r : ds.records) {
        ++per_class[static_cast<std::size_t>(r.class_id)];
        if (r.class_id == 2 && r.distance_m == 0.5) ++c2_near;
    }
    for (const int n : per_class) CHECK(n == 40);
    CHECK(c2_near == 14); // remainder goes to the nearest distance
}

TEST_CASE("apnea records stay near the noise floor while faulty ones spike") {
    GenConfig cfg = tiny_config();
    cfg.records_per_class = 3;
    const Dataset ds = generate_dataset(cfg);
    for (const auto& r : ds.records) {
        double peak = 0.0;
        for (const double v : r.samples) peak = std::max(peak, std::abs(v));
        if (r.class_id == 1)
            CHECK(peak < 3 * cfg.trend_max_coeff + 8 * cfg.noise_std); // drift + noise only
        if (r.class_id == kFaultyClass) CHECK(peak > 0.3); // artifact floor 1.5 * 0.25
    }
}

TEST_CASE("binary dataset files round-trip and reject damage") {
    GenConfig cfg = tiny_config();
    cfg.records_per_class = 2;
    const Dataset ds = generate_dataset(cfg);
    const auto path = temp_file("synthgen_roundtrip.rspd");
    write_dataset(ds, path.string());
    const Dataset back = read_dataset(path.string());
    CHECK(back == ds); // bitwise: doubles are stored raw

    SUBCASE("truncated file") {
        std::error_code ec;
        const auto full = std::filesystem::file_size(path, ec);
        REQUIRE(!ec);
        std::filesystem::resize_file(path, full / 2);
        CHECK_THROWS_AS(read_dataset(path.string()), io_error);
    }
    SUBCASE("bad magic") {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.write("NOPE", 4);
        f.close();
        CHECK_THROWS_AS(read_dataset(path.string()), io_error);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(read_dataset("/nonexistent/nowhere.rspd"), io_error);
    }
    std::filesystem::remove(path);
}

TEST_CASE("csv export writes one labeled row per record") {
    GenConfig cfg = tiny_config();
    cfg.records_per_class = 1;
    cfg.duration_s = 1.0;
    const Dataset ds = generate_dataset(cfg);
    const auto path = temp_file("synthgen_export.csv");
    write_dataset_csv(ds, path.string());
    std::ifstream in(path);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') ==
              static_cast<std::ptrdiff_t>(ds.records.front().samples.size()));
    }
    CHECK(rows == ds.records.size());
    std::filesystem::remove(path);
}

TEST_CASE("generation config validation catches bad values") {
    GenConfig cfg = tiny_config();
    cfg.fs_hz = 0.0;
    CHECK_THROWS_AS(cfg.validate(), config_error);
    cfg = tiny_config();
    cfg.records_per_class = 0;
    CHECK_THROWS_AS(cfg.validate(), config_error);
    cfg = tiny_config();
    cfg.distances_m = {0.5, 2.0}; // 2.0 has no gain entry
    CHECK_THROWS_AS(cfg.validate(), config_error);
    cfg = tiny_config();
    cfg.noise_std = -1.0;
    CHECK_THROWS_AS(cfg.validate(), config_error);
}
