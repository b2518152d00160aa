// Command-line front end. Option precedence, lowest to highest:
// profile defaults, --config file, explicit flags.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "resp/config.hpp"
#include "resp/errors.hpp"
#include "resp/pipeline.hpp"

namespace {

struct Flags {
    std::string profile = "paper";
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int threads = 0;
    double fs = 0, duration = 0, noise_std = 0;
    int records_per_class = 0, ma_window = 0, detrend_degree = 0;
    int pretrain_epochs = 0, final_epochs = 0, batch_size = 0;
    int generations = 0, subset_size = 0;
    double crossover_prob = 0, mutation_prob = 0;
    std::string parent_strategy, chromosome, mode;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Respiration-pattern classifier: synthetic data, base training,\n"
                 "genetic head search with transfer, final training and reports"};
    app.require_subcommand(1);

    Flags f;
    app.add_option("--profile", f.profile, "Preset defaults: paper (100 Hz, full-size) or desk (20 Hz, small)")
        ->check(CLI::IsMember({"paper", "desk"}));
    app.add_option("--config", f.config_path, "JSON config file applied over the profile defaults");
    app.add_option("--out", f.out_dir, "Artifact directory (default: out)");
    app.add_option("--seed", f.seed, "Master seed; every stage derives its own stream from it");
    app.add_option("--threads", f.threads, "Worker threads (results are identical for any count)");
    app.add_option("--fs", f.fs, "Sampling rate in Hz");
    app.add_option("--duration", f.duration, "Record length in seconds");
    app.add_option("--records-per-class", f.records_per_class, "Records synthesized per class");
    app.add_option("--noise-std", f.noise_std, "Additive Gaussian noise sigma");
    app.add_option("--ma-window", f.ma_window, "Moving-average window (samples)");
    app.add_option("--detrend-degree", f.detrend_degree, "Detrending polynomial degree");
    app.add_option("--pretrain-epochs", f.pretrain_epochs, "Base-model training epochs");
    app.add_option("--final-epochs", f.final_epochs, "Final-model training epochs");
    app.add_option("--batch-size", f.batch_size, "Mini-batch size");
    app.add_option("--subset-size", f.subset_size, "Records in the fitness subset");
    app.add_option("--crossover-prob", f.crossover_prob, "Crossover probability");
    app.add_option("--mutation-prob", f.mutation_prob, "Mutation probability");

    auto* gen = app.add_subcommand("gen-data", "Synthesize the labeled waveform dataset");
    auto* pre = app.add_subcommand("pretrain", "Train the base classifier on the full training split");
    auto* evo = app.add_subcommand("evolve", "Genetic search over head architectures");
    evo->add_option("--generations", f.generations, "Search generations");
    evo->add_option("--parent-strategy", f.parent_strategy, "Parent selection: topk or roulette")
        ->check(CLI::IsMember({"topk", "roulette"}));
    auto* fin = app.add_subcommand("train-final", "Train the final model(s) for a chromosome");
    fin->add_option("--chromosome", f.chromosome, "Genes as g1,g2,g3,g4 (default: best from evolve)");
    fin->add_option("--mode", f.mode, "Which final models to train")
        ->check(CLI::IsMember({"transfer", "scratch", "both"}));
    auto* eva = app.add_subcommand("evaluate", "Evaluate saved final model(s) on the test split");
    auto* rep = app.add_subcommand("report", "Fitness-curve table and SVG from the search log");
    for (auto* sub : {gen, pre, evo, fin, eva, rep}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        resp::config::RunConfig cfg = resp::config::profile_defaults(f.profile);
        if (app.count("--config")) resp::config::apply_json_file(cfg, f.config_path);

        if (app.count("--out")) cfg.out_dir = f.out_dir;
        if (app.count("--seed")) cfg.seed = f.seed;
        if (app.count("--threads")) cfg.threads = f.threads;
        if (app.count("--fs")) cfg.fs_hz = f.fs;
        if (app.count("--duration")) cfg.duration_s = f.duration;
        if (app.count("--records-per-class")) cfg.records_per_class = f.records_per_class;
        if (app.count("--noise-std")) cfg.noise_std = f.noise_std;
        if (app.count("--ma-window")) cfg.ma_window = f.ma_window;
        if (app.count("--detrend-degree")) cfg.detrend_degree = f.detrend_degree;
        if (app.count("--pretrain-epochs")) cfg.pretrain_epochs = f.pretrain_epochs;
        if (app.count("--final-epochs")) cfg.final_epochs = f.final_epochs;
        if (app.count("--batch-size")) cfg.batch_size = f.batch_size;
        if (app.count("--subset-size")) cfg.subset_size = f.subset_size;
        if (app.count("--crossover-prob")) cfg.crossover_prob = f.crossover_prob;
        if (app.count("--mutation-prob")) cfg.mutation_prob = f.mutation_prob;
        if (evo->count("--generations")) cfg.generations = f.generations;
        if (evo->count("--parent-strategy")) cfg.parent_strategy = f.parent_strategy;
        if (fin->count("--chromosome")) cfg.chromosome = f.chromosome;
        if (fin->count("--mode")) cfg.final_mode = f.mode;

        const std::string command = app.get_subcommands().front()->get_name();
        return resp::pipeline::dispatch(command, cfg);
    } catch (const resp::config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const resp::dependency_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
