#pragma once

// Base-network pretraining and transfer: trim a pretrained classifier down
// to its first two conv/pool stages, freeze them, and graft a fresh head on
// top. Head weights are drawn from a stream that depends only on the head
// layout and seed, so a head trained standalone on cached prefix outputs is
// identical to one trained inside the full network.

#include <cstdint>
#include <span>
#include <vector>

#include "resp/nn.hpp"
#include "resp/synthgen.hpp"

namespace resp::transfer {

struct BaseArch {
    std::array<int, 3> filters{256, 128, 64};
    std::array<int, 3> kernels{64, 32, 16};
    int pool = 2;
    int hidden = 64;
    int classes = synth::kNumClasses;
};

// conv/pool x3, flatten, dense(hidden, relu), dense(classes, softmax).
std::vector<nn::LayerSpec> base_specs(const BaseArch& arch);

// Head grafted onto the trimmed prefix, gene-decoded by the search layer.
struct HeadParams {
    int conv_filters = 0;
    int conv_kernel = 0;
    int pool = 0;
    int dense_units = 0;
    bool operator==(const HeadParams&) const = default;
};

// conv(relu), pool, flatten, dense(relu), dense(classes, softmax).
std::vector<nn::LayerSpec> head_specs(const HeadParams& hp, int classes = synth::kNumClasses);

nn::Example to_example(const synth::BreathRecord& rec);
std::vector<nn::Example> to_examples(std::span<const synth::BreathRecord> recs);

struct PretrainResult {
    nn::ModelState model;
    std::vector<nn::EpochStats> history;
    nn::EvalResult train_eval;
    nn::EvalResult test_eval;
};

PretrainResult pretrain_base(std::span<const nn::Example> train, std::span<const nn::Example> test,
                             const BaseArch& arch, const nn::TrainConfig& cfg,
                             std::uint64_t init_seed);

// First two conv/pool stages of the base model, all layers frozen.
nn::ModelState trim_base(const nn::ModelState& base);

// Freshly initialized head model taking the trimmed prefix's output shape.
nn::ModelState make_head_model(const nn::ModelState& trimmed, const HeadParams& hp,
                               std::uint64_t head_seed, int classes = synth::kNumClasses);

// Frozen prefix + fresh head as one network; head weights match
// make_head_model(trimmed, hp, head_seed) exactly.
nn::ModelState extend(const nn::ModelState& trimmed, const HeadParams& hp,
                      std::uint64_t head_seed, int classes = synth::kNumClasses);

// Prefix outputs for a whole set, labels preserved. The prefix is frozen and
// deterministic, so training a head on these is equivalent to training the
// extended network.
std::vector<nn::Example> prefix_features(const nn::ModelState& trimmed,
                                         std::span<const nn::Example> data, int threads = 1);

} // namespace resp::transfer
