#include "resp/nn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "resp/parallel.hpp"

namespace resp::nn {

namespace {

// Reduction with four independent partial sums. Only used where the exact
// grouping of additions is not contractual (dense layers, gradients).
double dot_fast(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    double s = (s0 + s1) + (s2 + s3);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

// w[(f*K + t)*C + c] -> wt[(t*C + c)*F + f], so one (tap, channel) slot holds
// all filters contiguously.
std::vector<double> transpose_filters(const std::vector<double>& w, int F, int K, int C) {
    std::vector<double> wt(w.size());
    for (int f = 0; f < F; ++f)
        for (int t = 0; t < K; ++t)
            for (int c = 0; c < C; ++c)
                wt[(static_cast<std::size_t>(t) * C + c) * F + f] =
                    w[(static_cast<std::size_t>(f) * K + t) * C + c];
    return wt;
}

int argmax_index(const std::vector<double>& v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

void check_conv_weights(const LayerSpec& s, const LayerWeights& w, int in_channels) {
    const auto expect =
        static_cast<std::size_t>(s.filters) * s.kernel * in_channels;
    if (w.w.size() != expect || w.b.size() != static_cast<std::size_t>(s.filters))
        throw std::invalid_argument("conv1d weight size does not match layer spec");
}

void check_dense_weights(const LayerSpec& s, const LayerWeights& w, int in) {
    if (w.w.size() != static_cast<std::size_t>(s.units) * in ||
        w.b.size() != static_cast<std::size_t>(s.units))
        throw std::invalid_argument("dense weight size does not match layer spec");
}

} // namespace

LayerSpec LayerSpec::conv1d(int filters, int kernel, Activation act) {
    LayerSpec s;
    s.kind = LayerKind::conv1d;
    s.filters = filters;
    s.kernel = kernel;
    s.act = act;
    return s;
}

LayerSpec LayerSpec::maxpool1d(int size) {
    LayerSpec s;
    s.kind = LayerKind::maxpool1d;
    s.pool = size;
    return s;
}

LayerSpec LayerSpec::flatten() {
    LayerSpec s;
    s.kind = LayerKind::flatten;
    return s;
}

LayerSpec LayerSpec::dense(int units, Activation act) {
    LayerSpec s;
    s.kind = LayerKind::dense;
    s.units = units;
    s.act = act;
    return s;
}

std::vector<Shape> shape_chain(const std::vector<LayerSpec>& specs, Shape input) {
    if (input.length < 1 || input.channels < 1)
        throw std::invalid_argument("input shape must be positive in both dimensions");
    if (specs.empty()) throw std::invalid_argument("model needs at least one layer");

    std::vector<Shape> out;
    out.reserve(specs.size());
    Shape cur = input;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const LayerSpec& s = specs[i];
        const bool final_layer = (i + 1 == specs.size());
        if (s.act == Activation::softmax && !(final_layer && s.kind == LayerKind::dense))
            throw std::invalid_argument("softmax is only supported on the final dense layer");
        switch (s.kind) {
        case LayerKind::conv1d:
            if (s.filters < 1 || s.kernel < 1)
                throw std::invalid_argument("conv1d needs positive filter count and kernel size");
            cur = Shape{cur.length, s.filters};
            break;
        case LayerKind::maxpool1d:
            if (s.pool < 1) throw std::invalid_argument("pool size must be positive");
            if (s.pool > cur.length)
                throw std::invalid_argument("pool window exceeds input length");
            cur = Shape{cur.length / s.pool, cur.channels};
            break;
        case LayerKind::flatten:
            cur = Shape{cur.size(), 1};
            break;
        case LayerKind::dense:
            if (s.units < 1) throw std::invalid_argument("dense needs a positive unit count");
            if (cur.channels != 1)
                throw std::invalid_argument("dense layer requires flattened input");
            cur = Shape{s.units, 1};
            break;
        }
        out.push_back(cur);
    }
    return out;
}

ModelState init_model(const std::vector<LayerSpec>& specs, Shape input_shape, std::uint64_t seed) {
    ModelState m;
    m.input_shape = input_shape;
    m.specs = specs;
    m.shapes = shape_chain(specs, input_shape);
    m.weights.resize(specs.size());
    m.moments.resize(specs.size());

    Shape cur = input_shape;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const LayerSpec& s = specs[i];
        if (s.has_params()) {
            // Each layer draws from its own stream derived from (seed, layer
            // index): a sub-network rebuilt from the same specs and seed
            // reproduces these weights no matter what surrounds it.
            Rng rng = Rng::from(seed, static_cast<std::uint64_t>(i));
            double fan_in = 0.0, fan_out = 0.0;
            std::size_t nw = 0, nb = 0;
            if (s.kind == LayerKind::conv1d) {
                fan_in = static_cast<double>(s.kernel) * cur.channels;
                fan_out = static_cast<double>(s.kernel) * s.filters;
                nw = static_cast<std::size_t>(s.filters) * s.kernel * cur.channels;
                nb = static_cast<std::size_t>(s.filters);
            } else {
                fan_in = static_cast<double>(cur.size());
                fan_out = static_cast<double>(s.units);
                nw = static_cast<std::size_t>(s.units) * cur.size();
                nb = static_cast<std::size_t>(s.units);
            }
            const double limit = std::sqrt(6.0 / (fan_in + fan_out));
            m.weights[i].w.resize(nw);
            for (auto& v : m.weights[i].w) v = rng.uniform(-limit, limit);
            m.weights[i].b.assign(nb, 0.0);
        }
        cur = m.shapes[i];
    }
    return m;
}

Tensor conv1d_forward(const Tensor& input, const LayerSpec& spec, const LayerWeights& weights) {
    if (spec.kind != LayerKind::conv1d)
        throw std::invalid_argument("conv1d_forward requires a conv1d spec");
    if (spec.act == Activation::softmax)
        throw std::invalid_argument("softmax is not supported on conv layers");
    const int L = input.shape.length, C = input.shape.channels;
    const int F = spec.filters, K = spec.kernel;
    if (L < 1 || C < 1 || F < 1 || K < 1)
        throw std::invalid_argument("conv1d_forward requires positive dimensions");
    check_conv_weights(spec, weights, C);

    // Zero "same" padding at stride 1: pad_left = (K-1)/2, so even kernels
    // pad one more sample on the right.
    const int pad = (K - 1) / 2;
    const std::vector<double> wt = transpose_filters(weights.w, F, K, C);
    const std::size_t row = static_cast<std::size_t>(C);

    Tensor out(Shape{L, F});
    std::vector<double> xwin(static_cast<std::size_t>(K) * C);
    for (int n = 0; n < L; ++n) {
        for (int t = 0; t < K; ++t) {
            const int src = n + t - pad;
            double* dst = xwin.data() + static_cast<std::size_t>(t) * row;
            if (src >= 0 && src < L)
                std::copy_n(input.data.data() + static_cast<std::size_t>(src) * row, row, dst);
            else
                std::fill_n(dst, row, 0.0);
        }
        double* orow = out.data.data() + static_cast<std::size_t>(n) * F;
        std::copy(weights.b.begin(), weights.b.end(), orow);
        // Every output accumulates in ascending (tap, channel) order; the
        // filter lanes are independent, so this matches a per-output
        // brute-force sum bit for bit (padded positions add exact zeros).
        const std::size_t J = static_cast<std::size_t>(K) * C;
        for (std::size_t j = 0; j < J; ++j) {
            const double xj = xwin[j];
            const double* wrow = wt.data() + j * F;
            for (int f = 0; f < F; ++f) orow[f] += xj * wrow[f];
        }
        if (spec.act == Activation::relu)
            for (int f = 0; f < F; ++f) orow[f] = orow[f] > 0.0 ? orow[f] : 0.0;
    }
    return out;
}

Tensor maxpool1d_forward(const Tensor& input, int size, std::vector<int>* argmax) {
    const int L = input.shape.length, C = input.shape.channels;
    if (size < 1) throw std::invalid_argument("pool size must be positive");
    if (size > L) throw std::invalid_argument("pool window exceeds input length");
    const int P = L / size; // trailing remainder is dropped
    Tensor out(Shape{P, C});
    if (argmax) argmax->assign(static_cast<std::size_t>(P) * C, 0);
    for (int p = 0; p < P; ++p) {
        for (int c = 0; c < C; ++c) {
            int best = p * size;
            double bv = input.at(best, c);
            for (int k = 1; k < size; ++k) {
                const double v = input.at(p * size + k, c);
                if (v > bv) { // ties keep the earliest element
                    bv = v;
                    best = p * size + k;
                }
            }
            out.at(p, c) = bv;
            if (argmax) (*argmax)[static_cast<std::size_t>(p) * C + c] = best * C + c;
        }
    }
    return out;
}

std::vector<double> softmax(const std::vector<double>& logits) {
    if (logits.empty()) throw std::invalid_argument("softmax on empty vector");
    const double m = *std::max_element(logits.begin(), logits.end());
    std::vector<double> p(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = std::exp(logits[i] - m);
        sum += p[i];
    }
    for (auto& v : p) v /= sum;
    return p;
}

Tensor dense_forward(const Tensor& input, const LayerSpec& spec, const LayerWeights& weights) {
    if (spec.kind != LayerKind::dense)
        throw std::invalid_argument("dense_forward requires a dense spec");
    if (input.shape.channels != 1)
        throw std::invalid_argument("dense layer requires flattened input");
    const int in = input.shape.length, out_n = spec.units;
    check_dense_weights(spec, weights, in);

    Tensor out(Shape{out_n, 1});
    for (int o = 0; o < out_n; ++o)
        out.data[o] = weights.b[o] +
                      dot_fast(input.data.data(),
                               weights.w.data() + static_cast<std::size_t>(o) * in,
                               static_cast<std::size_t>(in));
    if (spec.act == Activation::relu) {
        for (auto& v : out.data) v = v > 0.0 ? v : 0.0;
    } else if (spec.act == Activation::softmax) {
        out.data = softmax(out.data);
    }
    return out;
}

double cross_entropy(const std::vector<double>& probs, int label) {
    if (label < 0 || label >= static_cast<int>(probs.size()))
        throw std::out_of_range("cross_entropy label outside class range");
    return -std::log(std::max(probs[static_cast<std::size_t>(label)], 1e-12));
}

namespace {

Tensor apply_layer(const ModelState& m, std::size_t i, const Tensor& x, std::vector<int>* argmax) {
    const LayerSpec& s = m.specs[i];
    switch (s.kind) {
    case LayerKind::conv1d:
        return conv1d_forward(x, s, m.weights[i]);
    case LayerKind::maxpool1d:
        return maxpool1d_forward(x, s.pool, argmax);
    case LayerKind::flatten:
        return Tensor(Shape{x.shape.size(), 1}, x.data);
    case LayerKind::dense:
        return dense_forward(x, s, m.weights[i]);
    }
    throw std::logic_error("unreachable layer kind");
}

void check_input_shape(const ModelState& m, const Tensor& x) {
    if (!(x.shape == m.input_shape))
        throw std::invalid_argument("input tensor shape does not match the model");
    if (x.data.size() != static_cast<std::size_t>(x.shape.size()))
        throw std::invalid_argument("tensor data size does not match its shape");
}

} // namespace

Tensor forward(const ModelState& model, const Tensor& input) {
    check_input_shape(model, input);
    Tensor cur = input;
    for (std::size_t i = 0; i < model.specs.size(); ++i) cur = apply_layer(model, i, cur, nullptr);
    return cur;
}

ForwardCache forward_cached(const ModelState& model, const Tensor& input) {
    check_input_shape(model, input);
    ForwardCache cache;
    cache.input = input;
    cache.outputs.reserve(model.specs.size());
    cache.pool_argmax.resize(model.specs.size());
    const Tensor* cur = &cache.input;
    for (std::size_t i = 0; i < model.specs.size(); ++i) {
        std::vector<int>* am =
            model.specs[i].kind == LayerKind::maxpool1d ? &cache.pool_argmax[i] : nullptr;
        cache.outputs.push_back(apply_layer(model, i, *cur, am));
        cur = &cache.outputs.back();
    }
    return cache;
}

double batch_loss(const ModelState& model, std::span<const Example> batch) {
    if (batch.empty()) throw std::invalid_argument("empty batch");
    double sum = 0.0;
    for (const Example& e : batch) {
        const Tensor out = forward(model, e.input);
        sum += cross_entropy(out.data, e.label);
    }
    return sum / static_cast<double>(batch.size());
}

namespace {

std::size_t lowest_trainable(const std::vector<LayerSpec>& specs) {
    for (std::size_t i = 0; i < specs.size(); ++i)
        if (specs[i].trainable && specs[i].has_params()) return i;
    throw std::invalid_argument("model has no trainable layers");
}

void conv_backward(const LayerSpec& spec, const Tensor& input, const Tensor& dz,
                   const LayerWeights& wts, LayerWeights* grad, Tensor* dx) {
    const int L = input.shape.length, C = input.shape.channels;
    const int F = spec.filters, K = spec.kernel;
    const int pad = (K - 1) / 2;

    if (grad) {
        for (int n = 0; n < L; ++n) {
            const double* drow = dz.data.data() + static_cast<std::size_t>(n) * F;
            for (int t = 0; t < K; ++t) {
                const int src = n + t - pad;
                if (src < 0 || src >= L) continue;
                const double* xrow = input.data.data() + static_cast<std::size_t>(src) * C;
                for (int f = 0; f < F; ++f) {
                    const double d = drow[f];
                    if (d == 0.0) continue; // dead ReLU units are common
                    axpy(d, xrow,
                         grad->w.data() + (static_cast<std::size_t>(f) * K + t) * C,
                         static_cast<std::size_t>(C));
                }
            }
            for (int f = 0; f < F; ++f) grad->b[f] += drow[f];
        }
    }
    if (dx) {
        const std::vector<double> wt = transpose_filters(wts.w, F, K, C);
        for (int n = 0; n < L; ++n) {
            const double* drow = dz.data.data() + static_cast<std::size_t>(n) * F;
            for (int t = 0; t < K; ++t) {
                const int m = n + t - pad;
                if (m < 0 || m >= L) continue;
                double* dxrow = dx->data.data() + static_cast<std::size_t>(m) * C;
                for (int c = 0; c < C; ++c)
                    dxrow[c] += dot_fast(drow, wt.data() + (static_cast<std::size_t>(t) * C + c) * F,
                                         static_cast<std::size_t>(F));
            }
        }
    }
}

void dense_backward(const Tensor& input, const Tensor& dz, const LayerWeights& wts,
                    LayerWeights* grad, Tensor* dx) {
    const std::size_t in = static_cast<std::size_t>(input.shape.length);
    const std::size_t out_n = dz.data.size();
    for (std::size_t o = 0; o < out_n; ++o) {
        const double d = dz.data[o];
        if (grad) {
            grad->b[o] += d;
            if (d != 0.0) axpy(d, input.data.data(), grad->w.data() + o * in, in);
        }
        if (dx && d != 0.0) axpy(d, wts.w.data() + o * in, dx->data.data(), in);
    }
}

} // namespace

void accumulate_gradients(const ModelState& model, const ForwardCache& cache, int label,
                          Gradients& accum) {
    const auto& specs = model.specs;
    if (cache.outputs.size() != specs.size() || accum.layers.size() != specs.size())
        throw std::invalid_argument("forward cache does not match the model");
    const LayerSpec& last = specs.back();
    if (last.kind != LayerKind::dense || last.act != Activation::softmax)
        throw std::invalid_argument("training requires a softmax dense output layer");
    const std::size_t lt = lowest_trainable(specs);

    // Combined softmax + cross-entropy gradient at the output logits.
    const Tensor& probs = cache.outputs.back();
    if (label < 0 || label >= static_cast<int>(probs.data.size()))
        throw std::out_of_range("label outside class range");
    Tensor dz = probs;
    dz.data[static_cast<std::size_t>(label)] -= 1.0;

    for (std::size_t i = specs.size(); i-- > lt;) {
        const LayerSpec& s = specs[i];
        const Tensor& input = i == 0 ? cache.input : cache.outputs[i - 1];
        const bool want_dx = i > lt;
        Tensor dx;
        if (want_dx) dx = Tensor(input.shape);

        LayerWeights* g = (s.trainable && s.has_params()) ? &accum.layers[i] : nullptr;
        switch (s.kind) {
        case LayerKind::conv1d:
            conv_backward(s, input, dz, model.weights[i], g, want_dx ? &dx : nullptr);
            break;
        case LayerKind::dense:
            dense_backward(input, dz, model.weights[i], g, want_dx ? &dx : nullptr);
            break;
        case LayerKind::maxpool1d:
            if (want_dx) {
                const auto& am = cache.pool_argmax[i];
                for (std::size_t j = 0; j < am.size(); ++j)
                    dx.data[static_cast<std::size_t>(am[j])] += dz.data[j];
            }
            break;
        case LayerKind::flatten:
            if (want_dx) dx.data = dz.data;
            break;
        }

        if (want_dx) {
            // dx holds the gradient at layer i-1's activations; undo that
            // layer's nonlinearity to get its pre-activation gradient.
            if (specs[i - 1].act == Activation::relu) {
                const Tensor& below = cache.outputs[i - 1];
                for (std::size_t j = 0; j < dx.data.size(); ++j)
                    if (below.data[j] <= 0.0) dx.data[j] = 0.0;
            }
            dz = std::move(dx);
        }
    }
}

namespace {

Gradients make_zero_gradients(const ModelState& model) {
    Gradients g;
    g.layers.resize(model.specs.size());
    for (std::size_t i = 0; i < model.specs.size(); ++i) {
        const LayerSpec& s = model.specs[i];
        if (s.trainable && s.has_params()) {
            g.layers[i].w.assign(model.weights[i].w.size(), 0.0);
            g.layers[i].b.assign(model.weights[i].b.size(), 0.0);
        }
    }
    return g;
}

void add_gradients(Gradients& into, const Gradients& from) {
    for (std::size_t i = 0; i < into.layers.size(); ++i) {
        for (std::size_t j = 0; j < into.layers[i].w.size(); ++j)
            into.layers[i].w[j] += from.layers[i].w[j];
        for (std::size_t j = 0; j < into.layers[i].b.size(); ++j)
            into.layers[i].b[j] += from.layers[i].b[j];
    }
}

Gradients backward_over(const ModelState& model, std::span<const Example> examples,
                        std::span<const std::size_t> order, BatchStats* stats, int threads) {
    if (order.empty()) throw std::invalid_argument("empty batch");
    // Validate up front: worker threads must not throw.
    for (const std::size_t q : order)
        if (examples[q].label < 0 || examples[q].label >= model.num_classes())
            throw std::out_of_range("label outside the model's class range");
    // Fixed 16-example chunks: the partial-sum grouping depends only on the
    // batch, so gradients (and everything trained from them) are bitwise
    // identical for every thread count. Peak memory holds one gradient copy
    // per chunk.
    constexpr std::size_t kChunk = 16;
    const std::size_t chunks = (order.size() + kChunk - 1) / kChunk;
    std::vector<Gradients> partial(chunks);
    std::vector<BatchStats> pstats(chunks);
    for (auto& p : partial) p = make_zero_gradients(model);

    parallel_chunked(order.size(), kChunk, threads, [&](std::size_t k, std::size_t b, std::size_t e) {
        Gradients& g = partial[k];
        BatchStats& st = pstats[k];
        for (std::size_t q = b; q < e; ++q) {
            const Example& ex = examples[order[q]];
            const ForwardCache cache = forward_cached(model, ex.input);
            const Tensor& probs = cache.outputs.back();
            st.loss_sum += cross_entropy(probs.data, ex.label);
            if (argmax_index(probs.data) == ex.label) ++st.correct;
            accumulate_gradients(model, cache, ex.label, g);
        }
    });

    // Merge in ascending chunk order, never in completion order.
    Gradients total = std::move(partial[0]);
    for (std::size_t k = 1; k < chunks; ++k) add_gradients(total, partial[k]);
    if (stats) {
        for (const auto& st : pstats) {
            stats->loss_sum += st.loss_sum;
            stats->correct += st.correct;
        }
    }
    const double inv = 1.0 / static_cast<double>(order.size());
    for (auto& l : total.layers) {
        for (auto& v : l.w) v *= inv;
        for (auto& v : l.b) v *= inv;
    }
    return total;
}

} // namespace

Gradients backward(const ModelState& model, std::span<const Example> batch, BatchStats* stats,
                   int threads) {
    std::vector<std::size_t> order(batch.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    return backward_over(model, batch, order, stats, threads);
}

void optimizer_step(ModelState& model, const Gradients& grads, const TrainConfig& cfg) {
    if (grads.layers.size() != model.specs.size())
        throw std::invalid_argument("gradient layout does not match the model");
    model.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(model.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(model.step));

    for (std::size_t i = 0; i < model.specs.size(); ++i) {
        const LayerSpec& s = model.specs[i];
        if (!(s.trainable && s.has_params())) continue;
        const LayerWeights& g = grads.layers[i];
        LayerWeights& w = model.weights[i];
        if (g.w.size() != w.w.size() || g.b.size() != w.b.size())
            throw std::invalid_argument("gradient sizes do not match layer weights");
        AdamState& m = model.moments[i];
        if (m.mw.empty()) {
            m.mw.assign(w.w.size(), 0.0);
            m.vw.assign(w.w.size(), 0.0);
            m.mb.assign(w.b.size(), 0.0);
            m.vb.assign(w.b.size(), 0.0);
        }
        auto update = [&](std::vector<double>& param, const std::vector<double>& grad,
                          std::vector<double>& mm, std::vector<double>& vv) {
            for (std::size_t j = 0; j < param.size(); ++j) {
                mm[j] = cfg.beta1 * mm[j] + (1.0 - cfg.beta1) * grad[j];
                vv[j] = cfg.beta2 * vv[j] + (1.0 - cfg.beta2) * grad[j] * grad[j];
                const double mhat = mm[j] / bc1;
                const double vhat = vv[j] / bc2;
                param[j] -= cfg.step_size * mhat / (std::sqrt(vhat) + cfg.epsilon);
            }
        };
        update(w.w, g.w, m.mw, m.vw);
        update(w.b, g.b, m.mb, m.vb);
    }
}

std::vector<EpochStats> train(ModelState& model, std::span<const Example> examples,
                              const TrainConfig& cfg,
                              const std::function<void(int, const ModelState&)>& on_epoch) {
    if (examples.empty()) throw std::invalid_argument("empty training set");
    if (cfg.epochs < 1 || cfg.batch_size < 1)
        throw std::invalid_argument("epochs and batch size must be positive");
    const std::size_t n = examples.size();
    const Rng shuffle_root(cfg.shuffle_seed);

    std::vector<EpochStats> history;
    history.reserve(static_cast<std::size_t>(cfg.epochs));
    std::vector<std::size_t> order(n);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng = shuffle_root.fork(static_cast<std::uint64_t>(epoch));
        rng.shuffle(order);

        BatchStats stats;
        for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t count = std::min(static_cast<std::size_t>(cfg.batch_size), n - start);
            const std::span<const std::size_t> slice(order.data() + start, count);
            const Gradients g = backward_over(model, examples, slice, &stats, cfg.threads);
            optimizer_step(model, g, cfg);
        }

        EpochStats es;
        es.loss = stats.loss_sum / static_cast<double>(n);
        es.accuracy = static_cast<double>(stats.correct) / static_cast<double>(n);
        es.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        history.push_back(es);
        if (on_epoch) on_epoch(epoch, model);
    }
    return history;
}

EvalResult evaluate(const ModelState& model, std::span<const Example> examples, int threads) {
    if (examples.empty()) throw std::invalid_argument("empty evaluation set");
    const int k = model.num_classes();
    for (const Example& ex : examples)
        if (ex.label < 0 || ex.label >= k)
            throw std::out_of_range("label outside the model's class range");
    const int chunks = chunk_count(examples.size(), threads);
    std::vector<std::vector<std::vector<long>>> conf(
        static_cast<std::size_t>(chunks),
        std::vector<std::vector<long>>(static_cast<std::size_t>(k),
                                       std::vector<long>(static_cast<std::size_t>(k), 0)));

    parallel_chunks(examples.size(), threads, [&](int c, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const Example& ex = examples[i];
            const Tensor out = forward(model, ex.input);
            const int pred = argmax_index(out.data);
            ++conf[static_cast<std::size_t>(c)][static_cast<std::size_t>(ex.label)]
                  [static_cast<std::size_t>(pred)];
        }
    });

    EvalResult r;
    r.confusion.assign(static_cast<std::size_t>(k), std::vector<long>(static_cast<std::size_t>(k), 0));
    long correct = 0;
    for (const auto& part : conf)
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) r.confusion[a][b] += part[a][b];
    for (int a = 0; a < k; ++a) correct += r.confusion[a][a];
    r.accuracy = static_cast<double>(correct) / static_cast<double>(examples.size());
    return r;
}

} // namespace resp::nn
