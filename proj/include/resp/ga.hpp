#pragma once

// Genetic search over four-gene chromosomes encoding the head architecture
// (all decoded values are powers of two). Fitness is the test accuracy of a
// freshly initialized head trained for one epoch on a fixed stratified
// subset; values are memoized per chromosome for the whole run, which makes
// the per-generation maximum non-decreasing under elitism.

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "resp/nn.hpp"
#include "resp/rng.hpp"
#include "resp/synthgen.hpp"
#include "resp/transfer.hpp"

namespace resp::ga {

struct GeneRange {
    int lo = 0, hi = 0;
    int span() const { return hi - lo + 1; }
    bool contains(int v) const { return v >= lo && v <= hi; }
    bool operator==(const GeneRange&) const = default;
};

// Exponent ranges: kernel count, kernel length, pool size, dense units.
struct GeneRanges {
    std::array<GeneRange, 4> genes{{{3, 8}, {2, 6}, {1, 3}, {4, 9}}};
    void validate() const;
    long long space() const; // number of distinct chromosomes
    bool operator==(const GeneRanges&) const = default;
};

using Chromosome = std::array<int, 4>;

bool in_range(const Chromosome& c, const GeneRanges& r);

// (2^g1 kernels, 2^g2 taps, 2^g3 pool, 2^g4 units); throws on an
// out-of-range gene.
transfer::HeadParams decode(const Chromosome& c, const GeneRanges& r = {});

Chromosome random_chromosome(const GeneRanges& r, Rng& rng);

// With probability prob: cut point uniform in {1,2,3}, genes after the cut
// swap between the children. Otherwise the children are copies.
std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b, double prob,
                                            Rng& rng);

// One uniformly chosen gene resampled uniformly over its range excluding the
// current value (a single-value range leaves the gene unchanged).
Chromosome mutate(const Chromosome& c, const GeneRanges& r, Rng& rng);

struct Individual {
    Chromosome chrom{};
    double fitness = -1.0; // negative marks "not yet evaluated"
    bool evaluated() const { return fitness >= 0.0; }
};

// One fitness-proportional draw over nonnegative weights; uniform when the
// total weight is zero.
std::size_t roulette_pick(std::span<const double> weights, Rng& rng);

enum class ParentStrategy { topk, roulette };

// k parent indices: topk = k best (ties to the lower index), roulette =
// k fitness-proportional draws without replacement. Requires an evaluated
// population of at least k.
std::vector<std::size_t> select_parents(const std::vector<Individual>& pop, int k,
                                        ParentStrategy strategy, Rng& rng);

struct GAConfig {
    GeneRanges ranges{};
    int population_size = 8;
    int parent_count = 6;
    int crossover_count = 3;
    double crossover_prob = 0.8;
    double mutation_prob = 0.4;
    int elite_count = 2;
    int generations = 200;
    ParentStrategy parent_strategy = ParentStrategy::topk;
    int fitness_epochs = 1;
    int fitness_batch = 50;
    double step_size = 1e-3; // optimizer step for fitness-evaluation heads
    int subset_size = 1000;
    std::uint64_t seed = 0;
    void validate() const;
};

// elite_count best kept deterministically, the rest filled by roulette
// without replacement; duplicate chromosomes among the survivors are then
// replaced by fresh random ones (unevaluated, distinct from the rest).
std::vector<Individual> survivors(const std::vector<Individual>& pool, const GAConfig& cfg,
                                  Rng& rng);

struct GenerationLog {
    int generation = 0;
    double max_fitness = 0.0;
    double mean_fitness = 0.0;
    Chromosome best{}; // best individual of this population (ties to lower index)
    std::vector<Chromosome> chroms; // population order
    std::vector<double> fitness;    // population order
};

struct GAResult {
    std::vector<GenerationLog> log; // generations + 1 entries
    Individual best;                // highest fitness ever seen
};

// Population of population_size distinct random chromosomes, then per
// generation: evaluate (memoized) -> log -> select parents -> crossovers on
// parent pairs (1,2),(3,4),... -> with probability mutation_prob mutate one
// random offspring -> evaluate offspring -> survivors of population +
// offspring. The final population is evaluated and logged as well.
GAResult run_ga(const GAConfig& cfg, const std::function<double(const Chromosome&)>& fitness);

// Fitness evaluator backed by a frozen prefix: samples a stratified subset
// of the records (cfg.subset_size, seeded by cfg.seed), splits it 80/20 once,
// and pushes both parts through the prefix a single time. Each evaluation
// then trains only the head on those cached features, which is exactly
// equivalent to training the extended network (the prefix is frozen and
// deterministic) at a fraction of the cost.
class SubsetFitness {
  public:
    SubsetFitness(const nn::ModelState& trimmed, std::span<const synth::BreathRecord> records,
                  const GAConfig& cfg, int threads);

    double operator()(const Chromosome& c) const;

    // Exposed so tests can verify cached-feature training against training
    // the full extended model.
    const nn::TrainConfig& train_config() const { return train_cfg_; }
    std::uint64_t head_seed() const { return head_seed_; }
    nn::Shape feature_shape() const { return feature_shape_; }
    const std::vector<synth::BreathRecord>& subset_train() const { return subset_train_; }
    const std::vector<synth::BreathRecord>& subset_test() const { return subset_test_; }

  private:
    GeneRanges ranges_;
    nn::Shape feature_shape_;
    std::vector<synth::BreathRecord> subset_train_, subset_test_;
    std::vector<nn::Example> train_features_, test_features_;
    nn::TrainConfig train_cfg_;
    std::uint64_t head_seed_ = 0;
};

} // namespace resp::ga
