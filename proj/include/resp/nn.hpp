#pragma once

// From-scratch 1D convolutional network engine: forward, backpropagation,
// adaptive-moment optimization, evaluation and binary serialization, with
// per-layer trainable flags so a pre-trained prefix can be frozen.
//
// All arithmetic is 64-bit. Convolution is cross-correlation (no kernel
// flip) with zero "same" padding at stride 1. Accumulation order inside each
// output value is fixed (ascending tap, then channel), which keeps forward
// passes bitwise reproducible and comparable against brute-force references.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "resp/rng.hpp"

namespace resp::nn {

struct Shape {
    int length = 0;
    int channels = 0;
    int size() const { return length * channels; }
    bool operator==(const Shape&) const = default;
};

// Rank-1/2 tensor in length-major order: data[n * channels + c].
struct Tensor {
    Shape shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(Shape s) : shape(s), data(static_cast<std::size_t>(s.size()), 0.0) {}
    Tensor(Shape s, std::vector<double> d) : shape(s), data(std::move(d)) {}

    double at(int n, int c) const { return data[static_cast<std::size_t>(n) * shape.channels + c]; }
    double& at(int n, int c) { return data[static_cast<std::size_t>(n) * shape.channels + c]; }
};

enum class Activation : std::uint8_t { linear = 0, relu = 1, softmax = 2 };
enum class LayerKind : std::uint8_t { conv1d = 0, maxpool1d = 1, flatten = 2, dense = 3 };

struct LayerSpec {
    LayerKind kind = LayerKind::flatten;
    bool trainable = true;
    int filters = 0; // conv1d: number of filters
    int kernel = 0;  // conv1d: filter length
    int pool = 0;    // maxpool1d: window = stride
    int units = 0;   // dense: output units
    Activation act = Activation::linear;

    static LayerSpec conv1d(int filters, int kernel, Activation act = Activation::relu);
    static LayerSpec maxpool1d(int size);
    static LayerSpec flatten();
    static LayerSpec dense(int units, Activation act);

    bool has_params() const { return kind == LayerKind::conv1d || kind == LayerKind::dense; }
    bool operator==(const LayerSpec&) const = default;
};

// Weight layout: conv1d w[(f*kernel + t)*in_channels + c], bias[f];
// dense w[o*in + i], bias[o]. Empty for pool/flatten layers.
struct LayerWeights {
    std::vector<double> w, b;
};

struct AdamState {
    std::vector<double> mw, vw, mb, vb; // allocated on first update
};

struct ModelState {
    Shape input_shape;
    std::vector<LayerSpec> specs;
    std::vector<LayerWeights> weights;
    std::vector<Shape> shapes; // per-layer output shapes
    std::vector<AdamState> moments;
    std::int64_t step = 0;

    Shape output_shape() const { return shapes.empty() ? input_shape : shapes.back(); }
    int num_classes() const { return output_shape().size(); }
};

struct Example {
    Tensor input;
    int label = 0;
};

// Per-layer parameter gradients, parallel to specs; empty entries for
// frozen and parameter-free layers.
struct Gradients {
    std::vector<LayerWeights> layers;
};

struct TrainConfig {
    int epochs = 30;
    int batch_size = 50;
    double step_size = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-7;
    std::uint64_t shuffle_seed = 0;
    int threads = 1;
};

struct EpochStats {
    double loss = 0.0;
    double accuracy = 0.0;
    double seconds = 0.0; // wall clock, in-memory only (never serialized)
};

struct EvalResult {
    double accuracy = 0.0;
    std::vector<std::vector<long>> confusion; // rows = true class
};

// --- shape propagation -----------------------------------------------------

// Output shape of each layer given the input shape; throws on an invalid
// chain (zero-length pooling result, dense on unflattened input, ...).
std::vector<Shape> shape_chain(const std::vector<LayerSpec>& specs, Shape input);

// --- construction ----------------------------------------------------------

// Glorot-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases,
// deterministic in seed. Layer i draws from its own derived stream, so a
// sub-network built from the same specs/seed gets identical weights.
ModelState init_model(const std::vector<LayerSpec>& specs, Shape input_shape, std::uint64_t seed);

// --- layer primitives (exposed for direct verification) ---------------------

Tensor conv1d_forward(const Tensor& input, const LayerSpec& spec, const LayerWeights& weights);
Tensor maxpool1d_forward(const Tensor& input, int size, std::vector<int>* argmax = nullptr);
Tensor dense_forward(const Tensor& input, const LayerSpec& spec, const LayerWeights& weights);
std::vector<double> softmax(const std::vector<double>& logits);
double cross_entropy(const std::vector<double>& probs, int label);

// --- whole-model passes ------------------------------------------------------

struct ForwardCache {
    Tensor input;
    std::vector<Tensor> outputs;              // post-activation, per layer
    std::vector<std::vector<int>> pool_argmax; // per layer; empty unless maxpool
};

Tensor forward(const ModelState& model, const Tensor& input);
ForwardCache forward_cached(const ModelState& model, const Tensor& input);

// Mean cross-entropy over a batch.
double batch_loss(const ModelState& model, std::span<const Example> batch);

struct BatchStats {
    double loss_sum = 0.0;
    long correct = 0;
};

// Gradients of the mean batch loss for every trainable layer. Upstream
// gradients stop below the deepest trainable layer; frozen layers above it
// still propagate. Requires a softmax output layer.
Gradients backward(const ModelState& model, std::span<const Example> batch,
                   BatchStats* stats = nullptr, int threads = 1);

// Per-example accumulation variant used by backward(); cache must come from
// forward_cached on the same model.
void accumulate_gradients(const ModelState& model, const ForwardCache& cache, int label,
                          Gradients& accum);

// Adaptive-moment update on trainable layers only; increments model.step.
void optimizer_step(ModelState& model, const Gradients& grads, const TrainConfig& cfg);

// Mini-batch training with a seeded per-epoch shuffle; the last partial
// batch is included. Returns one entry per epoch. The hook (if set) runs
// after each epoch's updates with the epoch index and current model.
std::vector<EpochStats> train(ModelState& model, std::span<const Example> examples,
                              const TrainConfig& cfg,
                              const std::function<void(int, const ModelState&)>& on_epoch = {});

// Argmax accuracy and confusion matrix (rows = true class). Throws on an
// empty batch or a label outside the model's output range.
EvalResult evaluate(const ModelState& model, std::span<const Example> examples, int threads = 1);

// --- serialization (magic "RNN1", version 1, little-endian) -----------------

void save_model(const ModelState& model, const std::string& path);
ModelState load_model(const std::string& path);

} // namespace resp::nn
