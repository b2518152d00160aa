#include "resp/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "resp/dsp.hpp"
#include "resp/errors.hpp"
#include "resp/ga.hpp"
#include "resp/nn.hpp"
#include "resp/rng.hpp"
#include "resp/synthgen.hpp"
#include "resp/transfer.hpp"

namespace resp::pipeline {

namespace fs = std::filesystem;
using config::RunConfig;

namespace {

// Role tags for deriving per-command streams from the master seed
// (documented in the header).
constexpr std::uint64_t kTagSplit = 0x01;
constexpr std::uint64_t kTagBaseInit = 0x02;
constexpr std::uint64_t kTagPretrainShuffle = 0x03;
constexpr std::uint64_t kTagEvolve = 0x04;
constexpr std::uint64_t kTagHeadInit = 0x05;
constexpr std::uint64_t kTagScratchInit = 0x06;
constexpr std::uint64_t kTagFinalShuffle = 0x07;

std::uint64_t derived_seed(const RunConfig& cfg, std::uint64_t tag) {
    return Rng::from(cfg.seed, tag).next();
}

std::string art(const RunConfig& cfg, const std::string& name) {
    return (fs::path(cfg.out_dir) / name).string();
}

void ensure_out(const RunConfig& cfg) {
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) throw io_error("cannot create output directory: " + cfg.out_dir);
}

void require_artifact(const std::string& path, const std::string& producer) {
    if (!fs::exists(path))
        throw dependency_error("missing artifact '" + path + "' (run '" + producer + "' first)");
}

// 17 significant digits: doubles round-trip, so reruns are byte-identical.
std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::ofstream open_csv(const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw io_error("cannot open for writing: " + path);
    return os;
}

void finish_csv(std::ofstream& os, const std::string& path) {
    os.flush();
    if (!os) throw io_error("write failed: " + path);
}

synth::GenConfig make_gen_config(const RunConfig& cfg) {
    synth::GenConfig g;
    g.fs_hz = cfg.fs_hz;
    g.duration_s = cfg.duration_s;
    g.records_per_class = cfg.records_per_class;
    g.noise_std = cfg.noise_std;
    g.trend_max_coeff = cfg.trend_max_coeff;
    g.distance_gain = {{0.5, cfg.distance_gains[0]},
                       {1.0, cfg.distance_gains[1]},
                       {1.5, cfg.distance_gains[2]}};
    g.seed = cfg.seed;
    return g;
}

transfer::BaseArch make_base_arch(const RunConfig& cfg) {
    transfer::BaseArch arch;
    arch.filters = cfg.base_filters;
    arch.kernels = cfg.base_kernels;
    arch.pool = cfg.base_pool;
    arch.hidden = cfg.base_hidden;
    arch.classes = synth::kNumClasses;
    return arch;
}

synth::Dataset load_dataset(const RunConfig& cfg) {
    const std::string path = art(cfg, artifact::dataset);
    require_artifact(path, "gen-data");
    synth::Dataset ds = synth::read_dataset(path);
    if (ds.fs_hz != cfg.fs_hz || ds.duration_s != cfg.duration_s)
        throw config_error("dataset '" + path +
                           "' was generated with a different fs/duration; rerun gen-data or fix the config");
    return ds;
}

std::vector<synth::BreathRecord> preprocessed_records(const RunConfig& cfg) {
    const synth::Dataset ds = load_dataset(cfg);
    return dsp::preprocess_all(ds.records, cfg.ma_window, cfg.detrend_degree);
}

struct SplitExamples {
    std::vector<nn::Example> train, test;
};

// Flip-augment, then stratified 80/20 (shared by pretrain, train-final and
// evaluate, so they all see the same partition for a given config).
SplitExamples main_split(const RunConfig& cfg, const std::vector<synth::BreathRecord>& pre) {
    const std::vector<synth::BreathRecord> augmented = dsp::augment_flip(pre);
    auto [tr, te] = dsp::stratified_split(augmented, cfg.train_fraction, derived_seed(cfg, kTagSplit));
    SplitExamples out;
    out.train = transfer::to_examples(tr);
    out.test = transfer::to_examples(te);
    return out;
}

ga::GAConfig make_ga_config(const RunConfig& cfg) {
    ga::GAConfig gc;
    gc.population_size = cfg.population_size;
    gc.parent_count = cfg.parent_count;
    gc.crossover_count = cfg.parent_count / 2;
    gc.crossover_prob = cfg.crossover_prob;
    gc.mutation_prob = cfg.mutation_prob;
    gc.elite_count = cfg.elite_count;
    gc.generations = cfg.generations;
    gc.parent_strategy =
        cfg.parent_strategy == "roulette" ? ga::ParentStrategy::roulette : ga::ParentStrategy::topk;
    gc.step_size = cfg.step_size;
    gc.subset_size = cfg.subset_size;
    gc.seed = derived_seed(cfg, kTagEvolve);
    return gc;
}

ga::Chromosome parse_chromosome(const std::string& text) {
    ga::Chromosome c{};
    std::istringstream is(text);
    std::string field;
    int i = 0;
    while (std::getline(is, field, ',')) {
        if (i >= 4) throw config_error("chromosome must have exactly 4 genes, e.g. 7,5,1,8");
        std::size_t used = 0;
        try {
            c[static_cast<std::size_t>(i)] = std::stoi(field, &used);
        } catch (const std::exception&) {
            throw config_error("chromosome gene '" + field + "' is not an integer");
        }
        if (used != field.size())
            throw config_error("chromosome gene '" + field + "' is not an integer");
        ++i;
    }
    if (i != 4) throw config_error("chromosome must have exactly 4 genes, e.g. 7,5,1,8");
    if (!ga::in_range(c, ga::GeneRanges{}))
        throw config_error("chromosome genes outside legal ranges (g1 3..8, g2 2..6, g3 1..3, g4 4..9)");
    return c;
}

ga::Chromosome chromosome_source(const RunConfig& cfg) {
    if (!cfg.chromosome.empty()) return parse_chromosome(cfg.chromosome);
    const std::string path = art(cfg, artifact::best_chromosome);
    require_artifact(path, "evolve");
    std::ifstream is(path);
    if (!is) throw io_error("cannot open for reading: " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(is);
    } catch (const nlohmann::json::parse_error&) {
        throw io_error("malformed chromosome file: " + path);
    }
    ga::Chromosome c{};
    const char* keys[4] = {"g1", "g2", "g3", "g4"};
    for (int i = 0; i < 4; ++i) {
        if (!doc.contains(keys[i]) || !doc[keys[i]].is_number_integer())
            throw io_error("malformed chromosome file: " + path);
        c[static_cast<std::size_t>(i)] = doc[keys[i]].get<int>();
    }
    return c;
}

nn::ModelState load_base_model(const RunConfig& cfg) {
    const std::string path = art(cfg, artifact::base_model);
    require_artifact(path, "pretrain");
    return nn::load_model(path);
}

void check_model_matches_data(const nn::ModelState& m, const SplitExamples& split,
                              const std::string& what) {
    if (!split.train.empty() && !(m.input_shape == split.train.front().input.shape))
        throw config_error(what + " expects a different input length than this config's dataset; "
                                  "regenerate artifacts with one consistent config");
}

// --- commands ----------------------------------------------------------------

int cmd_gen_data(const RunConfig& cfg) {
    ensure_out(cfg);
    const synth::Dataset ds = synth::generate_dataset(make_gen_config(cfg));
    const std::string path = art(cfg, artifact::dataset);
    synth::write_dataset(ds, path);
    std::cout << "wrote " << ds.records.size() << " records (" << cfg.records_per_class
              << " per class, " << ds.records.front().samples.size() << " samples each) to " << path
              << "\n";
    return 0;
}

int cmd_pretrain(const RunConfig& cfg) {
    ensure_out(cfg);
    const auto pre = preprocessed_records(cfg);
    const SplitExamples split = main_split(cfg, pre);

    nn::TrainConfig tc;
    tc.epochs = cfg.pretrain_epochs;
    tc.batch_size = cfg.batch_size;
    tc.step_size = cfg.step_size;
    tc.shuffle_seed = derived_seed(cfg, kTagPretrainShuffle);
    tc.threads = cfg.threads;

    const transfer::PretrainResult result = transfer::pretrain_base(
        split.train, split.test, make_base_arch(cfg), tc, derived_seed(cfg, kTagBaseInit));

    nn::save_model(result.model, art(cfg, artifact::base_model));

    {
        auto os = open_csv(art(cfg, artifact::pretrain_history));
        os << "epoch,loss,accuracy\n";
        for (std::size_t i = 0; i < result.history.size(); ++i)
            os << (i + 1) << ',' << fmt(result.history[i].loss) << ','
               << fmt(result.history[i].accuracy) << '\n';
        finish_csv(os, art(cfg, artifact::pretrain_history));
    }
    {
        auto os = open_csv(art(cfg, artifact::pretrain_summary));
        os << "train_accuracy,test_accuracy\n";
        os << fmt(result.train_eval.accuracy) << ',' << fmt(result.test_eval.accuracy) << '\n';
        finish_csv(os, art(cfg, artifact::pretrain_summary));
    }
    std::cout << "pretrained " << cfg.pretrain_epochs << " epochs on " << split.train.size()
              << " records: train accuracy " << result.train_eval.accuracy << ", test accuracy "
              << result.test_eval.accuracy << "\n";
    return 0;
}

int cmd_evolve(const RunConfig& cfg) {
    ensure_out(cfg);
    const nn::ModelState base = load_base_model(cfg);
    const nn::ModelState trimmed = transfer::trim_base(base);
    const auto pre = preprocessed_records(cfg);
    if (!pre.empty() && !(nn::Shape{static_cast<int>(pre.front().samples.size()), 1} ==
                          trimmed.input_shape))
        throw config_error("base model expects a different input length than this config's dataset; "
                           "regenerate artifacts with one consistent config");

    const ga::GAConfig gc = make_ga_config(cfg);
    const ga::SubsetFitness fitness(trimmed, pre, gc, cfg.threads);
    const ga::GAResult result = ga::run_ga(gc, [&](const ga::Chromosome& c) { return fitness(c); });

    {
        auto os = open_csv(art(cfg, artifact::ga_log));
        os << "generation,max_fitness,mean_fitness,g1,g2,g3,g4";
        for (int i = 0; i < gc.population_size; ++i) os << ",fit_" << i;
        os << '\n';
        for (const ga::GenerationLog& row : result.log) {
            os << row.generation << ',' << fmt(row.max_fitness) << ',' << fmt(row.mean_fitness);
            for (const int g : row.best) os << ',' << g;
            for (const double f : row.fitness) os << ',' << fmt(f);
            os << '\n';
        }
        finish_csv(os, art(cfg, artifact::ga_log));
    }
    {
        nlohmann::json doc;
        doc["g1"] = result.best.chrom[0];
        doc["g2"] = result.best.chrom[1];
        doc["g3"] = result.best.chrom[2];
        doc["g4"] = result.best.chrom[3];
        doc["fitness"] = result.best.fitness;
        std::ofstream os(art(cfg, artifact::best_chromosome), std::ios::trunc);
        if (!os) throw io_error("cannot open for writing: " + art(cfg, artifact::best_chromosome));
        os << doc.dump(2) << '\n';
        if (!os) throw io_error("write failed: " + art(cfg, artifact::best_chromosome));
    }
    std::cout << "best chromosome [" << result.best.chrom[0] << ',' << result.best.chrom[1] << ','
              << result.best.chrom[2] << ',' << result.best.chrom[3] << "] fitness "
              << result.best.fitness << " after " << cfg.generations << " generations\n";
    return 0;
}

struct FinalRun {
    std::vector<double> train_acc, test_acc;
    double final_test = 0.0;
    double mean_epoch_seconds = 0.0;
};

FinalRun train_one_final(const RunConfig& cfg, nn::ModelState& model, const SplitExamples& split) {
    nn::TrainConfig tc;
    tc.epochs = cfg.final_epochs;
    tc.batch_size = cfg.batch_size;
    tc.step_size = cfg.step_size;
    tc.shuffle_seed = derived_seed(cfg, kTagFinalShuffle); // same batches for both modes
    tc.threads = cfg.threads;

    FinalRun run;
    const auto history = nn::train(model, split.train, tc, [&](int, const nn::ModelState& m) {
        run.test_acc.push_back(nn::evaluate(m, split.test, cfg.threads).accuracy);
    });
    double seconds = 0.0;
    for (const nn::EpochStats& e : history) {
        run.train_acc.push_back(e.accuracy);
        seconds += e.seconds;
    }
    run.mean_epoch_seconds = seconds / static_cast<double>(history.size());
    run.final_test = run.test_acc.back();
    return run;
}

int cmd_train_final(const RunConfig& cfg) {
    ensure_out(cfg);
    const ga::Chromosome chrom = chromosome_source(cfg);
    const transfer::HeadParams hp = ga::decode(chrom);
    const auto pre = preprocessed_records(cfg);
    const SplitExamples split = main_split(cfg, pre);

    const bool want_transfer = cfg.final_mode == "transfer" || cfg.final_mode == "both";
    const bool want_scratch = cfg.final_mode == "scratch" || cfg.final_mode == "both";

    FinalRun transfer_run, scratch_run;
    if (want_transfer) {
        const nn::ModelState base = load_base_model(cfg);
        check_model_matches_data(base, split, "base model");
        const nn::ModelState trimmed = transfer::trim_base(base);
        nn::ModelState model = transfer::extend(trimmed, hp, derived_seed(cfg, kTagHeadInit));
        transfer_run = train_one_final(cfg, model, split);
        nn::save_model(model, art(cfg, artifact::final_transfer));
    }
    if (want_scratch) {
        // Same architecture, no pretrained weights, everything trainable.
        const nn::ModelState base = load_base_model(cfg);
        check_model_matches_data(base, split, "base model");
        std::vector<nn::LayerSpec> specs = transfer::trim_base(base).specs;
        const auto head = transfer::head_specs(hp);
        specs.insert(specs.end(), head.begin(), head.end());
        for (auto& s : specs) s.trainable = true;
        nn::ModelState model =
            nn::init_model(specs, base.input_shape, derived_seed(cfg, kTagScratchInit));
        scratch_run = train_one_final(cfg, model, split);
        nn::save_model(model, art(cfg, artifact::final_scratch));
    }

    {
        auto os = open_csv(art(cfg, artifact::train_final));
        os << "epoch";
        if (want_scratch) os << ",train_scratch,test_scratch";
        if (want_transfer) os << ",train_transfer,test_transfer";
        os << '\n';
        for (int e = 0; e < cfg.final_epochs; ++e) {
            os << (e + 1);
            const auto i = static_cast<std::size_t>(e);
            if (want_scratch)
                os << ',' << fmt(scratch_run.train_acc[i]) << ',' << fmt(scratch_run.test_acc[i]);
            if (want_transfer)
                os << ',' << fmt(transfer_run.train_acc[i]) << ',' << fmt(transfer_run.test_acc[i]);
            os << '\n';
        }
        finish_csv(os, art(cfg, artifact::train_final));
    }

    std::cout << "chromosome [" << chrom[0] << ',' << chrom[1] << ',' << chrom[2] << ',' << chrom[3]
              << "]";
    if (want_transfer)
        std::cout << "  transfer: test accuracy " << transfer_run.final_test << " ("
                  << transfer_run.mean_epoch_seconds << " s/epoch)";
    if (want_scratch)
        std::cout << "  scratch: test accuracy " << scratch_run.final_test << " ("
                  << scratch_run.mean_epoch_seconds << " s/epoch)";
    std::cout << "\n";
    return 0;
}

int cmd_evaluate(const RunConfig& cfg) {
    ensure_out(cfg);
    const auto pre = preprocessed_records(cfg);
    const SplitExamples split = main_split(cfg, pre);

    struct Target {
        const char* mode;
        std::string path;
    };
    std::vector<Target> targets;
    for (const char* mode : {"transfer", "scratch"}) {
        const std::string path =
            art(cfg, std::string(mode) == "transfer" ? artifact::final_transfer
                                                     : artifact::final_scratch);
        if (fs::exists(path)) targets.push_back({mode, path});
    }
    if (targets.empty())
        throw dependency_error("no final model found in '" + cfg.out_dir +
                               "' (run 'train-final' first)");

    auto os = open_csv(art(cfg, artifact::evaluation));
    os << "model,accuracy\n";
    for (const Target& t : targets) {
        const nn::ModelState model = nn::load_model(t.path);
        check_model_matches_data(model, split, std::string("model '") + t.mode + "'");
        const nn::EvalResult r = nn::evaluate(model, split.test, cfg.threads);
        os << t.mode << ',' << fmt(r.accuracy) << '\n';

        const std::string cpath = art(cfg, std::string(artifact::confusion_prefix) + t.mode + ".csv");
        auto cs = open_csv(cpath);
        cs << "true_class";
        for (std::size_t p = 0; p < r.confusion.size(); ++p) cs << ",pred_" << p;
        cs << '\n';
        for (std::size_t a = 0; a < r.confusion.size(); ++a) {
            cs << a;
            for (const long n : r.confusion[a]) cs << ',' << n;
            cs << '\n';
        }
        finish_csv(cs, cpath);
        std::cout << t.mode << " test accuracy " << r.accuracy << " on " << split.test.size()
                  << " records\n";
    }
    finish_csv(os, art(cfg, artifact::evaluation));
    return 0;
}

struct FitnessRow {
    long generation = 0;
    double max_fitness = 0.0, mean_fitness = 0.0;
};

std::vector<FitnessRow> read_ga_log(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open for reading: " + path);
    std::vector<FitnessRow> rows;
    std::string line;
    if (!std::getline(is, line)) throw io_error("empty search log: " + path);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string f0, f1, f2;
        if (!std::getline(ls, f0, ',') || !std::getline(ls, f1, ',') || !std::getline(ls, f2, ','))
            throw io_error("malformed search log row in " + path);
        FitnessRow row;
        try {
            row.generation = std::stol(f0);
            row.max_fitness = std::stod(f1);
            row.mean_fitness = std::stod(f2);
        } catch (const std::exception&) {
            throw io_error("malformed search log row in " + path);
        }
        rows.push_back(row);
    }
    if (rows.empty()) throw io_error("search log has no data rows: " + path);
    return rows;
}

void write_fitness_svg(const std::string& path, const std::vector<FitnessRow>& rows,
                       const std::vector<double>& smoothed) {
    const double W = 640, H = 400, L = 60, R = 620, T = 20, B = 360;
    const double gmax = std::max<double>(1.0, static_cast<double>(rows.back().generation));
    auto X = [&](double g) { return L + (R - L) * (g / gmax); };
    auto Y = [&](double f) { return B - (B - T) * f; };
    auto point = [&](double x, double y) {
        std::ostringstream os;
        os << std::fixed << std::setprecision(2) << x << ',' << y << ' ';
        return os.str();
    };

    std::ofstream os(path, std::ios::trunc);
    if (!os) throw io_error("cannot open for writing: " + path);
    os << "<svg xmlns='http://www.w3.org/2000/svg' viewBox='0 0 " << W << ' ' << H << "'>\n";
    os << "<rect width='" << W << "' height='" << H << "' fill='white'/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double f = 0.25 * i;
        os << "<line x1='" << L << "' y1='" << Y(f) << "' x2='" << R << "' y2='" << Y(f)
           << "' stroke='#dddddd'/>\n";
        os << "<text x='" << (L - 8) << "' y='" << (Y(f) + 4)
           << "' font-size='12' text-anchor='end' fill='#444444'>" << std::fixed
           << std::setprecision(2) << f << "</text>\n";
    }
    os << "<polyline fill='none' stroke='#1f6fb4' stroke-width='2' points='";
    for (const FitnessRow& r : rows) os << point(X(static_cast<double>(r.generation)), Y(r.max_fitness));
    os << "'/>\n<polyline fill='none' stroke='#c2372e' stroke-width='2' points='";
    for (std::size_t i = 0; i < rows.size(); ++i)
        os << point(X(static_cast<double>(rows[i].generation)), Y(smoothed[i]));
    os << "'/>\n";
    os << "<text x='" << L << "' y='" << (H - 10)
       << "' font-size='12' fill='#1f6fb4'>max fitness</text>\n";
    os << "<text x='" << (L + 120) << "' y='" << (H - 10)
       << "' font-size='12' fill='#c2372e'>mean fitness (smoothed)</text>\n";
    os << "<text x='" << (R - 4) << "' y='" << (H - 10)
       << "' font-size='12' text-anchor='end' fill='#444444'>generation 0.." << rows.back().generation
       << "</text>\n";
    os << "</svg>\n";
    if (!os) throw io_error("write failed: " + path);
}

int cmd_report(const RunConfig& cfg) {
    ensure_out(cfg);
    const std::string log_path = art(cfg, artifact::ga_log);
    require_artifact(log_path, "evolve");
    const std::vector<FitnessRow> rows = read_ga_log(log_path);

    std::vector<double> mean;
    mean.reserve(rows.size());
    for (const FitnessRow& r : rows) mean.push_back(r.mean_fitness);
    const int window = std::min<int>(10, static_cast<int>(mean.size()));
    const std::vector<double> smoothed = dsp::moving_average(mean, window);

    const std::string out_path = art(cfg, artifact::report_fitness);
    auto os = open_csv(out_path);
    os << "generation,mean_fitness,mean_fitness_ma10,max_fitness\n";
    for (std::size_t i = 0; i < rows.size(); ++i)
        os << rows[i].generation << ',' << fmt(rows[i].mean_fitness) << ',' << fmt(smoothed[i])
           << ',' << fmt(rows[i].max_fitness) << '\n';
    finish_csv(os, out_path);

    write_fitness_svg(art(cfg, artifact::fitness_svg), rows, smoothed);
    std::cout << "wrote " << out_path << " and " << art(cfg, artifact::fitness_svg) << "\n";
    return 0;
}

} // namespace

int dispatch(const std::string& command, const RunConfig& cfg) {
    config::validate(cfg);
    if (command == "gen-data") return cmd_gen_data(cfg);
    if (command == "pretrain") return cmd_pretrain(cfg);
    if (command == "evolve") return cmd_evolve(cfg);
    if (command == "train-final") return cmd_train_final(cfg);
    if (command == "evaluate") return cmd_evaluate(cfg);
    if (command == "report") return cmd_report(cfg);
    throw config_error("unknown command '" + command + "'");
}

} // namespace resp::pipeline
