#include "resp/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "resp/rng.hpp"

namespace resp::dsp {

std::vector<double> moving_average(const std::vector<double>& x, int window) {
    if (x.empty()) throw std::invalid_argument("moving_average: empty input");
    if (window < 1) throw std::invalid_argument("moving_average: window must be >= 1");
    if (static_cast<std::size_t>(window) > x.size())
        throw std::invalid_argument("moving_average: window exceeds input length");

    // Each window is summed directly in ascending index order. A sliding sum
    // would be O(n) but accumulates rounding drift and stops being bitwise
    // reproducible against a windowed-mean reference; windows here are small.
    std::vector<double> y(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) {
        const std::size_t lo = n + 1 >= static_cast<std::size_t>(window) ? n + 1 - static_cast<std::size_t>(window) : 0;
        double acc = 0.0;
        for (std::size_t i = lo; i <= n; ++i) acc += x[i];
        y[n] = acc / static_cast<double>(n - lo + 1);
    }
    return y;
}

std::vector<double> poly_detrend(const std::vector<double>& x, int degree) {
    if (degree < 0) throw std::invalid_argument("poly_detrend: degree must be >= 0");
    if (x.size() <= static_cast<std::size_t>(degree))
        throw std::invalid_argument("poly_detrend: input length must exceed degree");

    const std::size_t n = x.size();
    const int m = degree + 1;

    // Vandermonde basis on t in [-1, 1]; normal equations A = V^T V, b = V^T x.
    // For degree <= 5 on the normalized abscissa this is well conditioned.
    std::vector<double> powers(static_cast<std::size_t>(n) * m);
    const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = 2.0 * static_cast<double>(i) / denom - 1.0;
        double p = 1.0;
        for (int j = 0; j < m; ++j) {
            powers[i * m + j] = p;
            p *= t;
        }
    }

    std::vector<double> a(static_cast<std::size_t>(m) * m, 0.0);
    std::vector<double> b(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = &powers[i * m];
        for (int j = 0; j < m; ++j) {
            b[j] += row[j] * x[i];
            for (int k = j; k < m; ++k) a[static_cast<std::size_t>(j) * m + k] += row[j] * row[k];
        }
    }
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < j; ++k) a[static_cast<std::size_t>(j) * m + k] = a[static_cast<std::size_t>(k) * m + j];

    // Gaussian elimination with partial pivoting on the (m x m) system.
    std::vector<double> coeff = b;
    for (int col = 0; col < m; ++col) {
        int pivot = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(a[static_cast<std::size_t>(r) * m + col]) > std::abs(a[static_cast<std::size_t>(pivot) * m + col]))
                pivot = r;
        if (a[static_cast<std::size_t>(pivot) * m + col] == 0.0)
            throw std::invalid_argument("poly_detrend: degenerate least-squares system");
        if (pivot != col) {
            for (int k = 0; k < m; ++k)
                std::swap(a[static_cast<std::size_t>(pivot) * m + k], a[static_cast<std::size_t>(col) * m + k]);
            std::swap(coeff[pivot], coeff[col]);
        }
        const double inv = 1.0 / a[static_cast<std::size_t>(col) * m + col];
        for (int r = col + 1; r < m; ++r) {
            const double f = a[static_cast<std::size_t>(r) * m + col] * inv;
            if (f == 0.0) continue;
            for (int k = col; k < m; ++k)
                a[static_cast<std::size_t>(r) * m + k] -= f * a[static_cast<std::size_t>(col) * m + k];
            coeff[r] -= f * coeff[col];
        }
    }
    for (int col = m - 1; col >= 0; --col) {
        double s = coeff[col];
        for (int k = col + 1; k < m; ++k) s -= a[static_cast<std::size_t>(col) * m + k] * coeff[k];
        coeff[col] = s / a[static_cast<std::size_t>(col) * m + col];
    }

    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = &powers[i * m];
        double fit = 0.0;
        for (int j = 0; j < m; ++j) fit += coeff[j] * row[j];
        y[i] = x[i] - fit;
    }
    return y;
}

std::vector<double> horizontal_flip(const std::vector<double>& x) {
    return {x.rbegin(), x.rend()};
}

std::vector<BreathRecord> augment_flip(const std::vector<BreathRecord>& records) {
    std::vector<BreathRecord> out;
    out.reserve(records.size() * 2);
    out = records;
    for (const auto& r : records) {
        BreathRecord flipped = r;
        flipped.samples = horizontal_flip(r.samples);
        out.push_back(std::move(flipped));
    }
    return out;
}

std::pair<std::vector<BreathRecord>, std::vector<BreathRecord>>
stratified_split(const std::vector<BreathRecord>& records, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("stratified_split: train_fraction must be in (0, 1)");

    std::vector<std::vector<std::size_t>> by_class(synth::kNumClasses);
    for (std::size_t i = 0; i < records.size(); ++i) {
        const int c = records[i].class_id;
        if (c < 0 || c >= synth::kNumClasses)
            throw std::invalid_argument("stratified_split: record class id out of range");
        by_class[static_cast<std::size_t>(c)].push_back(i);
    }

    std::vector<BreathRecord> train, test;
    const Rng root(seed);
    for (int c = 0; c < synth::kNumClasses; ++c) {
        auto& idx = by_class[static_cast<std::size_t>(c)];
        if (idx.empty()) continue;
        Rng rng = root.fork(static_cast<std::uint64_t>(c));
        rng.shuffle(idx);
        const auto n_train =
            static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(idx.size())));
        for (std::size_t k = 0; k < idx.size(); ++k)
            (k < n_train ? train : test).push_back(records[idx[k]]);
    }
    return {std::move(train), std::move(test)};
}

BreathRecord preprocess(const BreathRecord& record, int window, int degree) {
    BreathRecord out = record;
    out.samples = poly_detrend(moving_average(record.samples, window), degree);
    return out;
}

std::vector<BreathRecord> preprocess_all(const std::vector<BreathRecord>& records, int window, int degree) {
    std::vector<BreathRecord> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(preprocess(r, window, degree));
    return out;
}

} // namespace resp::dsp
