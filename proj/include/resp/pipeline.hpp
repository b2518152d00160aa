#pragma once

// Command orchestration: each command reads/writes artifacts in the
// configured output directory and is byte-reproducible for a fixed config
// and seed in single-threaded mode (output files carry no timestamps or
// wall-clock values).
//
// Every random stream is derived from the master seed and a fixed role tag,
// so commands are reproducible independently of each other:
//   dataset synthesis        master seed itself
//   train/test split         (seed, 0x01)
//   base-model weights       (seed, 0x02)
//   pretraining shuffle      (seed, 0x03)
//   genetic search           (seed, 0x04)
//   final head weights       (seed, 0x05)
//   final scratch weights    (seed, 0x06)
//   final training shuffle   (seed, 0x07)

#include <string>

#include "resp/config.hpp"

namespace resp::pipeline {

// Artifact file names inside out_dir.
namespace artifact {
inline constexpr const char* dataset = "dataset.rspd";
inline constexpr const char* base_model = "base_model.rnn1";
inline constexpr const char* pretrain_history = "pretrain_history.csv";
inline constexpr const char* pretrain_summary = "pretrain_summary.csv";
inline constexpr const char* ga_log = "ga_log.csv";
inline constexpr const char* best_chromosome = "best_chromosome.json";
inline constexpr const char* train_final = "train_final.csv";
inline constexpr const char* final_transfer = "final_transfer.rnn1";
inline constexpr const char* final_scratch = "final_scratch.rnn1";
inline constexpr const char* evaluation = "evaluation.csv";
inline constexpr const char* confusion_prefix = "confusion_"; // + mode + ".csv"
inline constexpr const char* report_fitness = "report_fitness.csv";
inline constexpr const char* fitness_svg = "fitness.svg";
} // namespace artifact

// Runs one command ("gen-data", "pretrain", "evolve", "train-final",
// "evaluate", "report") against a validated config. Throws config_error on
// semantic misuse, dependency_error on missing input artifacts, io_error on
// file problems; returns 0 on success.
int dispatch(const std::string& command, const config::RunConfig& cfg);

} // namespace resp::pipeline
