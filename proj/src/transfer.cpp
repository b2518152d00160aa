#include "resp/transfer.hpp"

#include <stdexcept>

#include "resp/parallel.hpp"

namespace resp::transfer {

std::vector<nn::LayerSpec> base_specs(const BaseArch& arch) {
    for (int f : arch.filters)
        if (f < 1) throw std::invalid_argument("base filter counts must be positive");
    for (int k : arch.kernels)
        if (k < 1) throw std::invalid_argument("base kernel sizes must be positive");
    if (arch.pool < 1 || arch.hidden < 1 || arch.classes < 2)
        throw std::invalid_argument("invalid base architecture");
    using nn::LayerSpec;
    std::vector<LayerSpec> specs;
    for (int i = 0; i < 3; ++i) {
        specs.push_back(LayerSpec::conv1d(arch.filters[i], arch.kernels[i], nn::Activation::relu));
        specs.push_back(LayerSpec::maxpool1d(arch.pool));
    }
    specs.push_back(LayerSpec::flatten());
    specs.push_back(LayerSpec::dense(arch.hidden, nn::Activation::relu));
    specs.push_back(LayerSpec::dense(arch.classes, nn::Activation::softmax));
    return specs;
}

std::vector<nn::LayerSpec> head_specs(const HeadParams& hp, int classes) {
    if (hp.conv_filters < 1 || hp.conv_kernel < 1 || hp.pool < 1 || hp.dense_units < 1)
        throw std::invalid_argument("head parameters must be positive");
    if (classes < 2) throw std::invalid_argument("head needs at least two classes");
    using nn::LayerSpec;
    return {LayerSpec::conv1d(hp.conv_filters, hp.conv_kernel, nn::Activation::relu),
            LayerSpec::maxpool1d(hp.pool), LayerSpec::flatten(),
            LayerSpec::dense(hp.dense_units, nn::Activation::relu),
            LayerSpec::dense(classes, nn::Activation::softmax)};
}

nn::Example to_example(const synth::BreathRecord& rec) {
    nn::Example ex;
    ex.input = nn::Tensor(nn::Shape{static_cast<int>(rec.samples.size()), 1}, rec.samples);
    ex.label = rec.class_id;
    return ex;
}

std::vector<nn::Example> to_examples(std::span<const synth::BreathRecord> recs) {
    std::vector<nn::Example> out;
    out.reserve(recs.size());
    for (const auto& r : recs) out.push_back(to_example(r));
    return out;
}

PretrainResult pretrain_base(std::span<const nn::Example> train, std::span<const nn::Example> test,
                             const BaseArch& arch, const nn::TrainConfig& cfg,
                             std::uint64_t init_seed) {
    if (train.empty() || test.empty())
        throw std::invalid_argument("pretraining needs non-empty train and test sets");
    PretrainResult r;
    r.model = nn::init_model(base_specs(arch), train.front().input.shape, init_seed);
    r.history = nn::train(r.model, train, cfg);
    r.train_eval = nn::evaluate(r.model, train, cfg.threads);
    r.test_eval = nn::evaluate(r.model, test, cfg.threads);
    return r;
}

nn::ModelState trim_base(const nn::ModelState& base) {
    using nn::LayerKind;
    const auto& s = base.specs;
    const bool ok = s.size() >= 4 && s[0].kind == LayerKind::conv1d &&
                    s[1].kind == LayerKind::maxpool1d && s[2].kind == LayerKind::conv1d &&
                    s[3].kind == LayerKind::maxpool1d;
    if (!ok)
        throw std::invalid_argument("base model does not start with two conv/pool stages");

    nn::ModelState t;
    t.input_shape = base.input_shape;
    t.specs.assign(s.begin(), s.begin() + 4);
    for (auto& spec : t.specs) spec.trainable = false;
    t.weights.assign(base.weights.begin(), base.weights.begin() + 4);
    t.shapes = nn::shape_chain(t.specs, t.input_shape);
    t.moments.resize(4); // frozen layers carry no optimizer state
    return t;
}

nn::ModelState make_head_model(const nn::ModelState& trimmed, const HeadParams& hp,
                               std::uint64_t head_seed, int classes) {
    return nn::init_model(head_specs(hp, classes), trimmed.output_shape(), head_seed);
}

nn::ModelState extend(const nn::ModelState& trimmed, const HeadParams& hp,
                      std::uint64_t head_seed, int classes) {
    for (const auto& s : trimmed.specs)
        if (s.trainable) throw std::invalid_argument("prefix must be frozen before extending");
    const nn::ModelState head = make_head_model(trimmed, hp, head_seed, classes);

    nn::ModelState m;
    m.input_shape = trimmed.input_shape;
    m.specs = trimmed.specs;
    m.specs.insert(m.specs.end(), head.specs.begin(), head.specs.end());
    m.weights = trimmed.weights;
    m.weights.insert(m.weights.end(), head.weights.begin(), head.weights.end());
    m.shapes = nn::shape_chain(m.specs, m.input_shape);
    m.moments.resize(m.specs.size());
    return m;
}

std::vector<nn::Example> prefix_features(const nn::ModelState& trimmed,
                                         std::span<const nn::Example> data, int threads) {
    for (const auto& ex : data)
        if (!(ex.input.shape == trimmed.input_shape))
            throw std::invalid_argument("input tensor shape does not match the prefix");
    std::vector<nn::Example> out(data.size());
    parallel_chunks(data.size(), threads, [&](int, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            out[i].input = nn::forward(trimmed, data[i].input);
            out[i].label = data[i].label;
        }
    });
    return out;
}

} // namespace resp::transfer
