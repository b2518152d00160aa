// Acceptance suite: one PASS/FAIL line per shipped guarantee, running the
// real pipeline end to end at desk scale. Slower than the unit suites by
// design; ctest gives it a generous timeout.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "resp/config.hpp"
#include "resp/dsp.hpp"
#include "resp/ga.hpp"
#include "resp/nn.hpp"
#include "resp/pipeline.hpp"
#include "resp/rng.hpp"
#include "resp/synthgen.hpp"
#include "resp/transfer.hpp"

namespace fs = std::filesystem;
using namespace resp;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned desk-scale learning targets (criterion 5), confirmed on the first
// full desk run at seed 42 and frozen here: the transfer-trained [7,5,1,8]
// model must reach the spec's 80% test accuracy with apnea recall >= 95%.
constexpr double kMinFinalAccuracy = 0.80;
constexpr double kMinApneaRecall = 0.95;

struct Criterion {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int prec = 4) {
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("respnet_accept_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string read_bytes(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

// ---------------------------------------------------------------------------
// Criterion 1: numerics. Analytic gradients against central differences over
// >= 20 seeds, softmax normalization, and bitwise agreement of conv / pool /
// moving-average (plus an extended-precision detrend reference) on inputs up
// to length 10^4. Must finish within a minute.
Criterion criterion1() {
    const auto t0 = Clock::now();

    // Gradient check: every parameter of a small all-layer-kind model.
    int grad_checked = 0;
    double worst_rel = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const std::vector<nn::LayerSpec> specs = {
            nn::LayerSpec::conv1d(2, 3), nn::LayerSpec::maxpool1d(2), nn::LayerSpec::flatten(),
            nn::LayerSpec::dense(4, nn::Activation::relu),
            nn::LayerSpec::dense(3, nn::Activation::softmax)};
        const nn::ModelState model = nn::init_model(specs, nn::Shape{12, 1}, seed);

        Rng rng(seed * 7919);
        std::vector<nn::Example> batch;
        for (int i = 0; i < 4; ++i) {
            nn::Example ex;
            ex.input = nn::Tensor(nn::Shape{12, 1});
            for (double& v : ex.input.data) v = rng.uniform01() * 2.0 - 1.0;
            ex.label = i % 3;
            batch.push_back(std::move(ex));
        }

        const nn::Gradients grads = nn::backward(model, batch);
        for (std::size_t layer = 0; layer < model.specs.size(); ++layer) {
            if (!model.specs[layer].has_params()) continue;
            for (int bias = 0; bias < 2; ++bias) {
                const auto& analytic =
                    bias ? grads.layers[layer].b : grads.layers[layer].w;
                for (std::size_t i = 0; i < analytic.size(); ++i) {
                    const double fd = oracles::fd_gradient(model, batch, layer, i, bias != 0);
                    const double rel = std::abs(analytic[i] - fd) /
                                       std::max({1.0, std::abs(analytic[i]), std::abs(fd)});
                    worst_rel = std::max(worst_rel, rel);
                    ++grad_checked;
                }
            }
        }
    }
    if (grad_checked != 20 * 75)
        return {false, "expected 1500 gradient comparisons, got " + std::to_string(grad_checked)};
    if (worst_rel >= 1e-6) return {false, "gradient relative error " + fmt(worst_rel)};

    // Softmax normalization, including extreme logits.
    Rng rng(4242);
    double worst_sum = 0.0;
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> logits(8);
        const double scale = (trial % 5 == 0) ? 300.0 : 10.0;
        for (double& v : logits) v = (rng.uniform01() * 2.0 - 1.0) * scale;
        const auto p = nn::softmax(logits);
        double sum = 0.0;
        for (const double v : p) sum += v;
        worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    }
    if (worst_sum >= 1e-9) return {false, "softmax sum deviates by " + fmt(worst_sum)};

    // Brute-force oracle agreement on length-10^4 inputs: bitwise for conv,
    // pool and moving average; extended-precision reference for detrending
    // (its normal equations admit no bitwise cross-solver comparison).
    {
        const struct {
            int len, ch, kernel, filters;
        } cases[] = {{10000, 2, 9, 3}, {10000, 1, 4, 2}, {1000, 3, 7, 4}};
        for (const auto& cs : cases) {
            nn::Tensor in(nn::Shape{cs.len, cs.ch});
            for (double& v : in.data) v = rng.uniform01() * 2.0 - 1.0;
            const auto spec = nn::LayerSpec::conv1d(cs.filters, cs.kernel);
            nn::LayerWeights wts;
            wts.w.resize(static_cast<std::size_t>(cs.filters) * cs.kernel * cs.ch);
            wts.b.resize(static_cast<std::size_t>(cs.filters));
            for (double& v : wts.w) v = rng.uniform01() - 0.5;
            for (double& v : wts.b) v = rng.uniform01() - 0.5;
            const nn::Tensor got = nn::conv1d_forward(in, spec, wts);
            const nn::Tensor want = oracles::conv1d_ref(in, spec, wts);
            if (got.data != want.data) return {false, "conv1d deviates from the naive loop"};

            for (const int size : {2, 7}) {
                const nn::Tensor pg = nn::maxpool1d_forward(in, size);
                const nn::Tensor pw = oracles::maxpool_ref(in, size);
                if (pg.data != pw.data) return {false, "maxpool deviates from the naive loop"};
            }
        }

        std::vector<double> x(10000);
        for (double& v : x) v = rng.uniform01() * 2.0 - 1.0;
        for (const int w : {1, 50, 10000})
            if (dsp::moving_average(x, w) != oracles::moving_average_ref(x, w))
                return {false, "moving average deviates from the naive loop"};

        for (std::size_t i = 0; i < x.size(); ++i)
            x[i] += 0.5 + 1e-4 * static_cast<double>(i); // drift so detrending has work
        const auto got = dsp::poly_detrend(x, 5);
        const auto want = oracles::detrend_ref(x, 5);
        double scale = 0.0, worst = 0.0;
        for (const double v : x) scale = std::max(scale, std::abs(v));
        for (std::size_t i = 0; i < x.size(); ++i)
            worst = std::max(worst, std::abs(got[i] - want[i]));
        if (worst >= 1e-9 * scale)
            return {false, "detrend deviates from the extended-precision reference by " + fmt(worst)};
    }

    const double secs = seconds_since(t0);
    if (secs >= 60.0) return {false, "numerics suite took " + fmt(secs) + " s (budget 60)"};
    return {true, "1500 gradients (worst rel " + fmt(worst_rel, 2) + "), softmax, bitwise oracles, " +
                      fmt(secs, 2) + " s"};
}

// ---------------------------------------------------------------------------
// Criterion 2: derived shape chain of the full-scale base network and of the
// [7,5,1,8] extension, exact equality.
Criterion criterion2() {
    const transfer::BaseArch arch; // full-scale defaults: 256/128/64, 64/32/16
    const auto chain = nn::shape_chain(transfer::base_specs(arch), nn::Shape{3000, 1});
    const std::vector<nn::Shape> want = {{3000, 256}, {1500, 256}, {1500, 128},
                                         {750, 128},  {750, 64},   {375, 64},
                                         {24000, 1},  {64, 1},     {8, 1}};
    if (chain != want) return {false, "base chain differs from the derived shapes"};

    const nn::ModelState base = nn::init_model(transfer::base_specs(arch), nn::Shape{3000, 1}, 3);
    const nn::ModelState trimmed = transfer::trim_base(base);
    if (trimmed.output_shape() != nn::Shape{750, 128})
        return {false, "trimmed prefix does not end at the second pool"};

    const nn::ModelState extended =
        transfer::extend(trimmed, ga::decode({7, 5, 1, 8}), 11);
    const auto echain = nn::shape_chain(extended.specs, nn::Shape{3000, 1});
    // ... conv(128,32) -> (750,128), pool 2 -> (375,128), flatten -> 48000.
    const nn::Shape flat = echain[echain.size() - 3];
    if (flat != nn::Shape{48000, 1})
        return {false, "extended flatten width is " + std::to_string(flat.length)};
    return {true, "base chain exact, extended flatten 48000"};
}

// ---------------------------------------------------------------------------
// Criterion 3: freezing. One epoch of extended-model training on 100 records
// leaves the prefix bitwise identical to the base model, and the trimmed
// model's forward pass equals the base model's second-pool activation.
Criterion criterion3() {
    config::RunConfig cfg = config::profile_defaults("desk");
    cfg.records_per_class = 13; // 104 records
    cfg.seed = 5;

    synth::GenConfig gen;
    gen.fs_hz = cfg.fs_hz;
    gen.duration_s = cfg.duration_s;
    gen.records_per_class = cfg.records_per_class;
    gen.seed = cfg.seed;
    const synth::Dataset ds = synth::generate_dataset(gen);
    const auto pre = dsp::preprocess_all(ds.records, cfg.ma_window, cfg.detrend_degree);
    std::vector<nn::Example> examples = transfer::to_examples(pre);
    examples.resize(100);

    transfer::BaseArch arch;
    arch.filters = cfg.base_filters;
    arch.kernels = cfg.base_kernels;
    const nn::ModelState base =
        nn::init_model(transfer::base_specs(arch), nn::Shape{600, 1}, 21);

    const nn::ModelState trimmed = transfer::trim_base(base);
    nn::ModelState extended = transfer::extend(trimmed, ga::decode({7, 5, 1, 8}), 22);

    nn::TrainConfig tc;
    tc.epochs = 1;
    tc.batch_size = 20;
    tc.shuffle_seed = 77;
    nn::train(extended, examples, tc);

    for (std::size_t i = 0; i < trimmed.specs.size(); ++i) {
        if (extended.weights[i].w != base.weights[i].w ||
            extended.weights[i].b != base.weights[i].b)
            return {false, "frozen prefix layer " + std::to_string(i) + " drifted"};
        if (extended.specs[i].trainable) return {false, "prefix layer marked trainable"};
    }

    for (int i = 0; i < 10; ++i) {
        const nn::ForwardCache cache = nn::forward_cached(base, examples[static_cast<std::size_t>(i)].input);
        const nn::Tensor prefix_out = nn::forward(trimmed, examples[static_cast<std::size_t>(i)].input);
        if (cache.outputs[3].data != prefix_out.data) // layer 3 = second pool
            return {false, "trimmed forward differs from the base second-pool activation"};
    }
    return {true, "prefix bitwise stable after 1 epoch on 100 records; activations match"};
}

// ---------------------------------------------------------------------------
// Shared desk-profile pipeline run feeding criteria 4-6.
struct DeskRun {
    bool ok = false;
    std::string error;
    fs::path dir;
    std::vector<double> max_fitness;   // per logged generation
    double transfer_acc = 0.0, scratch_acc = 0.0;
    double transfer_sec = 0.0, scratch_sec = 0.0; // mean wall clock per epoch
    double apnea_recall = 0.0;
    double evolve_seconds = 0.0;
};

// Runs one pipeline command with stdout captured.
std::string dispatch_captured(const std::string& command, const config::RunConfig& cfg) {
    std::ostringstream captured;
    std::streambuf* old = std::cout.rdbuf(captured.rdbuf());
    try {
        pipeline::dispatch(command, cfg);
    } catch (...) {
        std::cout.rdbuf(old);
        throw;
    }
    std::cout.rdbuf(old);
    return captured.str();
}

// Pulls the number that follows `key` in text (e.g. "accuracy 0.81 (1.2 s/epoch)").
double number_after(const std::string& text, const std::string& key) {
    const auto pos = text.find(key);
    if (pos == std::string::npos) throw std::runtime_error("missing '" + key + "' in output");
    return std::stod(text.substr(pos + key.size()));
}

DeskRun run_desk_pipeline(const fs::path& dir) {
    DeskRun run;
    run.dir = dir;
    config::RunConfig cfg = config::profile_defaults("desk");
    cfg.out_dir = dir.string();
    cfg.seed = 42;
    cfg.threads = 1;

    try {
        dispatch_captured("gen-data", cfg);
        dispatch_captured("pretrain", cfg);

        const auto t0 = Clock::now();
        dispatch_captured("evolve", cfg);
        run.evolve_seconds = seconds_since(t0);

        // GA log: generation,max_fitness,... per row.
        std::ifstream log(dir / "ga_log.csv");
        std::string line;
        std::getline(log, line); // header
        while (std::getline(log, line)) {
            const auto c1 = line.find(',');
            const auto c2 = line.find(',', c1 + 1);
            run.max_fitness.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
        }

        cfg.chromosome = "7,5,1,8";
        const std::string out = dispatch_captured("train-final", cfg);
        run.transfer_acc = number_after(out, "transfer: test accuracy ");
        run.scratch_acc = number_after(out, "scratch: test accuracy ");
        const auto paren1 = out.find("(", out.find("transfer:"));
        const auto paren2 = out.find("(", out.find("scratch:"));
        run.transfer_sec = std::stod(out.substr(paren1 + 1));
        run.scratch_sec = std::stod(out.substr(paren2 + 1));

        dispatch_captured("evaluate", cfg);
        std::ifstream conf(dir / "confusion_transfer.csv");
        std::getline(conf, line); // header
        std::vector<std::vector<long>> rows;
        while (std::getline(conf, line)) {
            std::vector<long> row;
            std::stringstream ss(line);
            std::string cell;
            while (std::getline(ss, cell, ',')) row.push_back(std::stol(cell));
            rows.push_back(std::move(row));
        }
        // Row 1 = true apnea; column 0 is the true-class label, so cell j+1
        // counts predictions of class j.
        long apnea_total = 0;
        for (std::size_t j = 1; j < rows[1].size(); ++j) apnea_total += rows[1][j];
        run.apnea_recall =
            apnea_total > 0 ? static_cast<double>(rows[1][2]) / static_cast<double>(apnea_total) : 0.0;
        run.ok = true;
    } catch (const std::exception& e) {
        run.error = e.what();
    }
    return run;
}

// Criterion 4: GA operator suite plus a monotone 20-generation desk run.
Criterion criterion4(const DeskRun& desk) {
    const ga::GeneRanges ranges;
    const std::array<std::pair<int, int>, 4> want{{{3, 8}, {2, 6}, {1, 3}, {4, 9}}};
    for (std::size_t g = 0; g < 4; ++g)
        if (ranges.genes[g].lo != want[g].first || ranges.genes[g].hi != want[g].second)
            return {false, "gene ranges differ from the published search space"};

    Rng rng(271828);

    // Single-point splice.
    const ga::Chromosome a{3, 2, 1, 4}, b{8, 6, 3, 9};
    std::set<int> cuts;
    for (int i = 0; i < 200; ++i) {
        const auto [c1, c2] = ga::crossover(a, b, 1.0, rng);
        bool matched = false;
        for (int cut = 1; cut <= 3; ++cut) {
            bool ok = true;
            for (int k = 0; k < 4; ++k) {
                const auto kk = static_cast<std::size_t>(k);
                if (c1[kk] != (k >= cut ? b[kk] : a[kk]) || c2[kk] != (k >= cut ? a[kk] : b[kk]))
                    ok = false;
            }
            if (ok) {
                cuts.insert(cut);
                matched = true;
                break;
            }
        }
        if (!matched) return {false, "crossover produced a non-splice child"};
    }
    if (cuts.size() != 3) return {false, "crossover never used some cut point"};

    // Single-gene mutation.
    const ga::Chromosome c{5, 4, 2, 6};
    for (int i = 0; i < 200; ++i) {
        const ga::Chromosome m = ga::mutate(c, ranges, rng);
        int diffs = 0;
        for (std::size_t k = 0; k < 4; ++k)
            if (m[k] != c[k]) ++diffs;
        if (diffs != 1 || !ga::in_range(m, ranges))
            return {false, "mutation changed " + std::to_string(diffs) + " genes"};
    }

    // Elitism presence.
    {
        std::vector<ga::Individual> pool;
        double best = 0.0;
        for (int i = 0; i < 12; ++i) {
            pool.push_back({{3 + i % 6, 2 + i % 5, 1 + i % 3, 4 + i % 6}, 0.05 * i});
            best = std::max(best, pool.back().fitness);
        }
        ga::GAConfig gc;
        const auto out = ga::survivors(pool, gc, rng);
        if (out[0].fitness != best) return {false, "elitism lost the best individual"};
    }

    // Population-of-8 distinctness at initialization.
    {
        ga::GAConfig gc;
        gc.generations = 0;
        gc.seed = 5;
        const auto r = ga::run_ga(gc, [](const ga::Chromosome&) { return 0.5; });
        std::set<ga::Chromosome> seen(r.log[0].chroms.begin(), r.log[0].chroms.end());
        if (seen.size() != 8) return {false, "initial population has duplicates"};
    }

    // Roulette proportionality: chi-square over 1e5 draws, 7 dof, p > 0.01.
    {
        const std::vector<double> w(8, 1.0);
        std::vector<int> hits(8, 0);
        for (int i = 0; i < 100000; ++i) ++hits[ga::roulette_pick(w, rng)];
        double chi2 = 0.0;
        for (const int h : hits) chi2 += (h - 12500.0) * (h - 12500.0) / 12500.0;
        if (chi2 >= 18.475) return {false, "roulette chi-square " + fmt(chi2) + " rejects uniformity"};
    }

    if (!desk.ok) return {false, "desk pipeline failed: " + desk.error};
    if (desk.max_fitness.size() != 21)
        return {false, "expected 21 logged generations, got " + std::to_string(desk.max_fitness.size())};
    for (std::size_t g = 1; g < desk.max_fitness.size(); ++g)
        if (desk.max_fitness[g] < desk.max_fitness[g - 1])
            return {false, "max fitness decreased at generation " + std::to_string(g)};
    if (desk.evolve_seconds >= 1800.0)
        return {false, "evolve took " + fmt(desk.evolve_seconds) + " s (budget 1800)"};
    return {true, "operators verified; 20-generation max fitness " + fmt(desk.max_fitness.front(), 3) +
                      " -> " + fmt(desk.max_fitness.back(), 3) + " non-decreasing in " +
                      fmt(desk.evolve_seconds, 1) + " s"};
}

// Criterion 5: desk-profile learning target with the pinned thresholds.
Criterion criterion5(const DeskRun& desk) {
    if (!desk.ok) return {false, "desk pipeline failed: " + desk.error};
    if (desk.transfer_acc < kMinFinalAccuracy)
        return {false, "transfer accuracy " + fmt(desk.transfer_acc) + " below " +
                           fmt(kMinFinalAccuracy, 2)};
    if (desk.apnea_recall < kMinApneaRecall)
        return {false, "apnea recall " + fmt(desk.apnea_recall) + " below " + fmt(kMinApneaRecall, 2)};
    return {true, "transfer accuracy " + fmt(desk.transfer_acc) + ", apnea recall " +
                      fmt(desk.apnea_recall)};
}

// Criterion 6: transfer-vs-scratch parity and per-epoch speed advantage.
Criterion criterion6(const DeskRun& desk) {
    if (!desk.ok) return {false, "desk pipeline failed: " + desk.error};
    const double gap = std::abs(desk.transfer_acc - desk.scratch_acc);
    if (gap > 0.05)
        return {false, "accuracy gap " + fmt(gap) + " exceeds 5 points (transfer " +
                           fmt(desk.transfer_acc) + ", scratch " + fmt(desk.scratch_acc) + ")"};
    if (!(desk.transfer_sec < desk.scratch_sec))
        return {false, "transfer epoch " + fmt(desk.transfer_sec) + " s not faster than scratch " +
                           fmt(desk.scratch_sec) + " s"};
    return {true, "gap " + fmt(gap, 3) + " within 5 points; " + fmt(desk.transfer_sec, 3) +
                      " vs " + fmt(desk.scratch_sec, 3) + " s/epoch"};
}

// ---------------------------------------------------------------------------
// Criterion 7: byte-identical artifacts across two single-threaded runs of
// every command, exercised through the installed binary.
Criterion criterion7() {
    TempDir tmp("repro");
    const fs::path cfg_path = tmp.path / "micro.json";
    {
        std::ofstream os(cfg_path);
        os << R"({"records_per_class": 6, "fs_hz": 10.0, "duration_s": 10.0,
                  "pretrain_epochs": 2, "final_epochs": 2, "generations": 2,
                  "subset_size": 24, "batch_size": 16})";
    }

    auto run_all = [&](const fs::path& out) -> std::string {
        const std::string common = " --profile desk --config " + cfg_path.string() +
                                   " --seed 9 --threads 1 --out " + out.string();
        for (const std::string cmd :
             {"gen-data", "pretrain", "evolve", "train-final", "evaluate", "report"}) {
            const std::string full = std::string(RESPNET_CLI_PATH) + " " + cmd + common + " 2>&1";
            FILE* pipe = ::popen(full.c_str(), "r");
            if (!pipe) return "popen failed";
            std::array<char, 256> buf{};
            std::string output;
            while (std::fgets(buf.data(), buf.size(), pipe)) output += buf.data();
            const int status = ::pclose(pipe);
            if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
                return cmd + " exited nonzero: " + output;
        }
        return "";
    };

    const fs::path run_a = tmp.path / "a", run_b = tmp.path / "b";
    if (const auto err = run_all(run_a); !err.empty()) return {false, "first run: " + err};
    if (const auto err = run_all(run_b); !err.empty()) return {false, "second run: " + err};

    int compared = 0;
    for (const auto& entry : fs::directory_iterator(run_a)) {
        const fs::path other = run_b / entry.path().filename();
        if (!fs::exists(other)) return {false, entry.path().filename().string() + " missing in rerun"};
        if (read_bytes(entry.path()) != read_bytes(other))
            return {false, entry.path().filename().string() + " differs between identical runs"};
        ++compared;
    }
    int in_b = 0;
    for ([[maybe_unused]] const auto& entry : fs::directory_iterator(run_b)) ++in_b;
    if (in_b != compared) return {false, "rerun produced extra artifacts"};
    if (compared < 10) return {false, "only " + std::to_string(compared) + " artifacts produced"};
    return {true, std::to_string(compared) + " artifacts byte-identical across reruns of all 6 commands"};
}

} // namespace

int main() {
    struct Entry {
        int id;
        const char* label;
        Criterion result;
    };
    std::vector<Entry> entries;

    auto guard = [](auto fn) -> Criterion {
        try {
            return fn();
        } catch (const std::exception& e) {
            return {false, std::string("exception: ") + e.what()};
        }
    };

    entries.push_back({1, "numerics (gradients, softmax, oracles)", guard(criterion1)});
    entries.push_back({2, "shape chain (base and [7,5,1,8] extension)", guard(criterion2)});
    entries.push_back({3, "frozen-prefix transfer", guard(criterion3)});

    TempDir desk_dir("desk");
    DeskRun desk;
    {
        Criterion c = guard([&] {
            desk = run_desk_pipeline(desk_dir.path);
            return Criterion{desk.ok, desk.error};
        });
        if (!c.pass && desk.error.empty()) desk.error = c.detail;
    }
    entries.push_back({4, "genetic-search operator suite", guard([&] { return criterion4(desk); })});
    entries.push_back({5, "desk-profile learning target", guard([&] { return criterion5(desk); })});
    entries.push_back({6, "transfer-vs-scratch parity", guard([&] { return criterion6(desk); })});
    entries.push_back({7, "single-thread byte reproducibility", guard(criterion7)});

    int failures = 0;
    for (const auto& e : entries) {
        const bool ok = e.result.pass;
        failures += ok ? 0 : 1;
        std::cout << (ok ? "PASS" : "FAIL") << " criterion " << e.id << ": " << e.label;
        if (!e.result.detail.empty()) std::cout << " (" << e.result.detail << ")";
        std::cout << "\n";
    }
    std::cout << (failures == 0 ? "ACCEPTANCE: all 7 criteria hold"
                                : "ACCEPTANCE: " + std::to_string(failures) + " criteria failing")
              << "\n";
    return failures == 0 ? 0 : 1;
}
