#include "resp/ga.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "resp/dsp.hpp"

namespace resp::ga {

void GeneRanges::validate() const {
    for (const GeneRange& g : genes) {
        if (g.lo < 0 || g.hi < g.lo)
            throw std::invalid_argument("gene range must satisfy 0 <= lo <= hi");
        if (g.hi > 20) throw std::invalid_argument("gene exponent above 20 is not sensible");
    }
}

long long GeneRanges::space() const {
    long long s = 1;
    for (const GeneRange& g : genes) s *= g.span();
    return s;
}

bool in_range(const Chromosome& c, const GeneRanges& r) {
    for (int i = 0; i < 4; ++i)
        if (!r.genes[static_cast<std::size_t>(i)].contains(c[static_cast<std::size_t>(i)]))
            return false;
    return true;
}

transfer::HeadParams decode(const Chromosome& c, const GeneRanges& r) {
    r.validate();
    if (!in_range(c, r)) throw std::out_of_range("chromosome gene outside its legal range");
    transfer::HeadParams hp;
    hp.conv_filters = 1 << c[0];
    hp.conv_kernel = 1 << c[1];
    hp.pool = 1 << c[2];
    hp.dense_units = 1 << c[3];
    return hp;
}

Chromosome random_chromosome(const GeneRanges& r, Rng& rng) {
    Chromosome c;
    for (int i = 0; i < 4; ++i) {
        const GeneRange& g = r.genes[static_cast<std::size_t>(i)];
        c[static_cast<std::size_t>(i)] = static_cast<int>(rng.uniform_int(g.lo, g.hi));
    }
    return c;
}

std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b, double prob,
                                            Rng& rng) {
    if (prob < 0.0 || prob > 1.0) throw std::invalid_argument("crossover probability outside [0,1]");
    std::pair<Chromosome, Chromosome> out{a, b};
    if (rng.uniform01() < prob) {
        const int cut = static_cast<int>(rng.uniform_int(1, 3));
        for (int i = cut; i < 4; ++i)
            std::swap(out.first[static_cast<std::size_t>(i)], out.second[static_cast<std::size_t>(i)]);
    }
    return out;
}

Chromosome mutate(const Chromosome& c, const GeneRanges& r, Rng& rng) {
    r.validate();
    if (!in_range(c, r)) throw std::out_of_range("chromosome gene outside its legal range");
    Chromosome out = c;
    const auto gi = static_cast<std::size_t>(rng.uniform_int(0, 3));
    const GeneRange& g = r.genes[gi];
    if (g.span() < 2) return out; // nothing to resample to
    int v = g.lo + static_cast<int>(rng.uniform_int(0, g.span() - 2));
    if (v >= out[gi]) ++v; // skip over the current value
    out[gi] = v;
    return out;
}

std::size_t roulette_pick(std::span<const double> weights, Rng& rng) {
    if (weights.empty()) throw std::invalid_argument("roulette over an empty weight list");
    double total = 0.0;
    for (const double w : weights) {
        if (w < 0.0 || !std::isfinite(w))
            throw std::invalid_argument("roulette weights must be finite and nonnegative");
        total += w;
    }
    if (total <= 0.0) return static_cast<std::size_t>(rng.uniform_int(
        0, static_cast<std::int64_t>(weights.size()) - 1));
    const double u = rng.uniform01() * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] > 0.0) last_positive = i;
        acc += weights[i];
        if (u < acc) return i;
    }
    return last_positive; // u hit the top of the wheel through rounding
}

std::vector<std::size_t> select_parents(const std::vector<Individual>& pop, int k,
                                        ParentStrategy strategy, Rng& rng) {
    if (k < 1 || static_cast<std::size_t>(k) > pop.size())
        throw std::invalid_argument("population smaller than the requested parent count");
    for (const Individual& ind : pop)
        if (!ind.evaluated()) throw std::invalid_argument("parent selection needs evaluated fitness");

    std::vector<std::size_t> idx(pop.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (strategy == ParentStrategy::topk) {
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return pop[a].fitness > pop[b].fitness; // stable: ties keep lower index first
        });
        idx.resize(static_cast<std::size_t>(k));
        return idx;
    }

    // Roulette without replacement: each draw is proportional to fitness over
    // the individuals still in the wheel (uniform once all weight is gone).
    std::vector<std::size_t> alive = idx;
    std::vector<std::size_t> picks;
    picks.reserve(static_cast<std::size_t>(k));
    for (int n = 0; n < k; ++n) {
        std::vector<double> w(alive.size());
        for (std::size_t i = 0; i < alive.size(); ++i) w[i] = pop[alive[i]].fitness;
        const std::size_t j = roulette_pick(w, rng);
        picks.push_back(alive[j]);
        alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(j));
    }
    return picks;
}

void GAConfig::validate() const {
    ranges.validate();
    if (population_size < 2) throw std::invalid_argument("population_size must be at least 2");
    if (elite_count < 0 || elite_count >= population_size)
        throw std::invalid_argument("elite_count must be in [0, population_size)");
    if (parent_count < 2 || parent_count % 2 != 0)
        throw std::invalid_argument("parent_count must be even and at least 2");
    if (parent_count > population_size)
        throw std::invalid_argument("parent_count cannot exceed population_size");
    if (crossover_count * 2 != parent_count)
        throw std::invalid_argument("crossover_count must equal parent_count / 2");
    if (crossover_prob < 0.0 || crossover_prob > 1.0)
        throw std::invalid_argument("crossover_prob outside [0,1]");
    if (mutation_prob < 0.0 || mutation_prob > 1.0)
        throw std::invalid_argument("mutation_prob outside [0,1]");
    if (generations < 0) throw std::invalid_argument("generations must be nonnegative");
    if (fitness_epochs < 1) throw std::invalid_argument("fitness_epochs must be positive");
    if (fitness_batch < 1) throw std::invalid_argument("fitness_batch must be positive");
    if (!(step_size > 0.0)) throw std::invalid_argument("step_size must be positive");
    if (subset_size < 1) throw std::invalid_argument("subset_size must be positive");
    if (ranges.space() < population_size)
        throw std::invalid_argument("gene space smaller than the population");
}

namespace {

Chromosome fresh_distinct(const GeneRanges& r, const std::set<Chromosome>& taken, Rng& rng) {
    for (int attempt = 0; attempt < 100000; ++attempt) {
        const Chromosome c = random_chromosome(r, rng);
        if (!taken.contains(c)) return c;
    }
    throw std::runtime_error("could not draw a distinct chromosome (gene space exhausted)");
}

} // namespace

std::vector<Individual> survivors(const std::vector<Individual>& pool, const GAConfig& cfg,
                                  Rng& rng) {
    if (pool.size() < static_cast<std::size_t>(cfg.population_size))
        throw std::invalid_argument("survivor pool smaller than the population");
    for (const Individual& ind : pool)
        if (!ind.evaluated()) throw std::invalid_argument("survivor selection needs evaluated fitness");

    std::vector<std::size_t> idx(pool.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return pool[a].fitness > pool[b].fitness;
    });

    std::vector<Individual> out;
    out.reserve(static_cast<std::size_t>(cfg.population_size));
    std::vector<std::size_t> rest;
    for (std::size_t r = 0; r < idx.size(); ++r) {
        if (r < static_cast<std::size_t>(cfg.elite_count))
            out.push_back(pool[idx[r]]);
        else
            rest.push_back(idx[r]);
    }
    // Keep the wheel in original pool order so draws do not depend on the
    // sort permutation of equal-fitness individuals.
    std::sort(rest.begin(), rest.end());

    const int need = cfg.population_size - cfg.elite_count;
    std::vector<std::size_t> alive = rest;
    for (int n = 0; n < need; ++n) {
        std::vector<double> w(alive.size());
        for (std::size_t i = 0; i < alive.size(); ++i) w[i] = pool[alive[i]].fitness;
        const std::size_t j = roulette_pick(w, rng);
        out.push_back(pool[alive[j]]);
        alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(j));
    }

    // Repair duplicates: later copies become fresh random chromosomes that
    // enter the next generation unevaluated.
    std::set<Chromosome> seen;
    for (Individual& ind : out) {
        if (seen.contains(ind.chrom)) {
            ind.chrom = fresh_distinct(cfg.ranges, seen, rng);
            ind.fitness = -1.0;
        }
        seen.insert(ind.chrom);
    }
    return out;
}

namespace {

constexpr std::uint64_t kTagInit = 0x6741;       // initial population stream
constexpr std::uint64_t kTagGeneration = 0x6800; // + generation index

} // namespace

GAResult run_ga(const GAConfig& cfg, const std::function<double(const Chromosome&)>& fitness) {
    cfg.validate();
    if (!fitness) throw std::invalid_argument("run_ga needs a fitness function");

    const Rng root(cfg.seed);
    std::map<Chromosome, double> memo;
    auto evaluate = [&](Individual& ind) {
        if (ind.evaluated()) return;
        const auto it = memo.find(ind.chrom);
        if (it != memo.end()) {
            ind.fitness = it->second;
            return;
        }
        const double f = fitness(ind.chrom);
        if (!std::isfinite(f) || f < 0.0 || f > 1.0)
            throw std::invalid_argument("fitness function returned a value outside [0,1]");
        memo.emplace(ind.chrom, f);
        ind.fitness = f;
    };

    std::vector<Individual> pop;
    {
        Rng rng = root.fork(kTagInit);
        std::set<Chromosome> seen;
        for (int i = 0; i < cfg.population_size; ++i) {
            Individual ind;
            ind.chrom = fresh_distinct(cfg.ranges, seen, rng);
            seen.insert(ind.chrom);
            pop.push_back(ind);
        }
    }

    GAResult result;
    result.best.fitness = -1.0;
    for (int gen = 0;; ++gen) {
        for (Individual& ind : pop) evaluate(ind);

        GenerationLog log;
        log.generation = gen;
        log.max_fitness = pop[0].fitness;
        std::size_t best_i = 0;
        double sum = 0.0;
        for (std::size_t i = 0; i < pop.size(); ++i) {
            sum += pop[i].fitness;
            log.chroms.push_back(pop[i].chrom);
            log.fitness.push_back(pop[i].fitness);
            if (pop[i].fitness > log.max_fitness) {
                log.max_fitness = pop[i].fitness;
                best_i = i;
            }
        }
        log.mean_fitness = sum / static_cast<double>(pop.size());
        log.best = pop[best_i].chrom;
        result.log.push_back(std::move(log));
        if (pop[best_i].fitness > result.best.fitness) result.best = pop[best_i];

        if (gen == cfg.generations) break;

        Rng rng = root.fork(kTagGeneration + static_cast<std::uint64_t>(gen));
        const std::vector<std::size_t> parents =
            select_parents(pop, cfg.parent_count, cfg.parent_strategy, rng);

        std::vector<Individual> offspring;
        offspring.reserve(static_cast<std::size_t>(cfg.parent_count));
        for (int p = 0; p < cfg.crossover_count; ++p) {
            const auto& a = pop[parents[static_cast<std::size_t>(2 * p)]].chrom;
            const auto& b = pop[parents[static_cast<std::size_t>(2 * p + 1)]].chrom;
            const auto [c1, c2] = crossover(a, b, cfg.crossover_prob, rng);
            offspring.push_back({c1, -1.0});
            offspring.push_back({c2, -1.0});
        }
        if (rng.uniform01() < cfg.mutation_prob) {
            const auto oi = static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(offspring.size()) - 1));
            offspring[oi].chrom = mutate(offspring[oi].chrom, cfg.ranges, rng);
            offspring[oi].fitness = -1.0;
        }
        for (Individual& ind : offspring) evaluate(ind);

        std::vector<Individual> pool = pop;
        pool.insert(pool.end(), offspring.begin(), offspring.end());
        pop = survivors(pool, cfg, rng);
    }
    return result;
}

SubsetFitness::SubsetFitness(const nn::ModelState& trimmed,
                             std::span<const synth::BreathRecord> records, const GAConfig& cfg,
                             int threads) {
    cfg.validate();
    ranges_ = cfg.ranges;
    feature_shape_ = trimmed.output_shape();

    // Stratified subset: an equal per-class quota (remainder spread over the
    // lowest class ids), sampled without replacement, fixed for the run.
    std::vector<std::vector<std::size_t>> buckets(synth::kNumClasses);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const int cl = records[i].class_id;
        if (cl < 0 || cl >= synth::kNumClasses)
            throw std::invalid_argument("record class outside the known range");
        buckets[static_cast<std::size_t>(cl)].push_back(i);
    }
    const Rng root(cfg.seed);
    const int base_quota = cfg.subset_size / synth::kNumClasses;
    const int remainder = cfg.subset_size % synth::kNumClasses;
    std::vector<synth::BreathRecord> subset;
    subset.reserve(static_cast<std::size_t>(cfg.subset_size));
    for (int cl = 0; cl < synth::kNumClasses; ++cl) {
        const int quota = base_quota + (cl < remainder ? 1 : 0);
        auto& bucket = buckets[static_cast<std::size_t>(cl)];
        if (static_cast<int>(bucket.size()) < quota)
            throw std::invalid_argument("subset_size exceeds the records available per class");
        Rng rng = root.fork(0x5300 + static_cast<std::uint64_t>(cl));
        rng.shuffle(bucket);
        bucket.resize(static_cast<std::size_t>(quota));
        std::sort(bucket.begin(), bucket.end()); // keep original record order
        for (const std::size_t i : bucket) subset.push_back(records[i]);
    }

    auto [train_recs, test_recs] =
        dsp::stratified_split(subset, 0.8, Rng::from(cfg.seed, 0x5400).next());
    subset_train_ = std::move(train_recs);
    subset_test_ = std::move(test_recs);
    if (subset_train_.empty() || subset_test_.empty())
        throw std::invalid_argument("subset too small for an 80/20 split");

    train_features_ = transfer::prefix_features(trimmed, transfer::to_examples(subset_train_), threads);
    test_features_ = transfer::prefix_features(trimmed, transfer::to_examples(subset_test_), threads);

    head_seed_ = Rng::from(cfg.seed, 0x5500).next();
    train_cfg_.epochs = cfg.fitness_epochs;
    train_cfg_.batch_size = cfg.fitness_batch;
    train_cfg_.step_size = cfg.step_size;
    train_cfg_.shuffle_seed = Rng::from(cfg.seed, 0x5600).next();
    train_cfg_.threads = threads;
}

double SubsetFitness::operator()(const Chromosome& c) const {
    nn::ModelState head =
        nn::init_model(transfer::head_specs(decode(c, ranges_)), feature_shape_, head_seed_);
    nn::train(head, train_features_, train_cfg_);
    return nn::evaluate(head, test_features_, train_cfg_.threads).accuracy;
}

} // namespace resp::ga
