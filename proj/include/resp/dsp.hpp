#pragma once

// Preprocessing (smoothing + detrending), flip augmentation and dataset
// splitting applied between generation and network training.

#include <cstdint>
#include <utility>
#include <vector>

#include "resp/synthgen.hpp"

namespace resp::dsp {

using synth::BreathRecord;

// Trailing-window mean; the window shrinks at the start so the output length
// equals the input length. Throws on empty input or window > length.
std::vector<double> moving_average(const std::vector<double>& x, int window);

// Least-squares polynomial fit over abscissa normalized to [-1, 1],
// subtracted from the input. Throws when length <= degree.
std::vector<double> poly_detrend(const std::vector<double>& x, int degree);

// y[n] = x[N-1-n]
std::vector<double> horizontal_flip(const std::vector<double>& x);

// Doubles the set: all originals in order, then one flipped copy per record
// with the same label and metadata.
std::vector<BreathRecord> augment_flip(const std::vector<BreathRecord>& records);

// Per-class seeded shuffle and split; per-class train count is
// round(train_fraction * class count). Throws unless 0 < train_fraction < 1.
std::pair<std::vector<BreathRecord>, std::vector<BreathRecord>>
stratified_split(const std::vector<BreathRecord>& records, double train_fraction, std::uint64_t seed);

// moving_average then poly_detrend; label and metadata preserved.
BreathRecord preprocess(const BreathRecord& record, int window, int degree);
std::vector<BreathRecord> preprocess_all(const std::vector<BreathRecord>& records, int window, int degree);

} // namespace resp::dsp
