/**
 * @file eval.hpp
 * @brief Leave-one-block-out evaluation, accuracy / ITR, and the benchmark grid
 *        over time windows, channel subsets and training-block counts.
 */

#pragma once

#include "ssvep/dataset.hpp"
#include "ssvep/parallel.hpp"
#include "ssvep/recognizer.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace ssvep {

struct CvSplit {
    std::vector<int> train_blocks;
    int test_block = 0;
};

/// One split per block, ordered by block index. Every block must hold every stimulus.
std::vector<CvSplit> leave_one_block_out(const Dataset& dataset);

double accuracy(std::span<const int> predictions, std::span<const int> truths);

/// Information transfer rate in bits/min for K classes, accuracy P and
/// selection time T seconds. P <= 1/K gives 0; P = 1 gives log2(K) * 60 / T.
double itr(int k, double p, double t_seconds);

struct ChannelSet {
    std::string label;
    std::vector<std::string> names; ///< empty = every channel of the dataset
};

struct BenchConfig {
    RecognizerConfig recognizer;
    std::uint64_t seed = 0;
    /// Added to the window length to form the ITR selection time.
    double gaze_shift_s = 0.0;
    Execution exec = Execution::parallel;
};

struct FoldResult {
    std::string subject;
    Method method = Method::cca;
    double tw = 0.0;
    std::string channel_set;
    int n_train = 0;
    int test_block = 0;
    std::vector<int> train_blocks;
    double accuracy = 0.0;
    double itr = 0.0;
    std::vector<int> truths;
    std::vector<int> predictions;
};

struct CellSummary {
    Method method = Method::cca;
    double tw = 0.0;
    std::string channel_set;
    int n_train = 0;
    int n = 0;                ///< folds, or subjects when more than one subject is present
    std::string unit;         ///< "fold" or "subject"
    double mean_accuracy = 0.0;
    double sd_accuracy = 0.0;
    double mean_itr = 0.0;
    double sd_itr = 0.0;
};

struct BenchReport {
    std::vector<FoldResult> folds; ///< ordered by (subject, method, tw, channel set, n_train, fold)
    int n_stimuli = 0;
    double gaze_shift_s = 0.0;
    std::uint64_t seed = 0;

    /// Mean / sd per (method, tw, channel set, n_train); over folds for one
    /// subject, over per-subject means otherwise.
    std::vector<CellSummary> summarize() const;
};

/// Runs every (method, tw, channel set, n_train, fold) cell. An n_train below
/// B-1 draws that many of the fold's training blocks with an RNG seeded from
/// (seed, n_train, fold), so different windows and channel sets see the same
/// blocks. Results do not depend on config.exec.
BenchReport run_benchmark(const Dataset& dataset,
                          std::span<const Method> methods,
                          std::span<const double> tw_grid,
                          std::span<const ChannelSet> channel_sets,
                          std::span<const int> n_train_grid,
                          const BenchConfig& config,
                          const std::string& subject = "");

/// Concatenates per-subject reports (their configs must agree).
BenchReport merge_reports(std::span<const BenchReport> reports);

/// Training blocks used by a fold for a given n_train.
std::vector<int> sample_training_blocks(const CvSplit& split, int n_train, std::uint64_t seed, int fold);

/// One row per grid cell per fold.
void write_folds_csv(const BenchReport& report, std::ostream& out);
/// Long format: tw against mean accuracy per method, channel set and n_train.
void write_curve_csv(const BenchReport& report, std::ostream& out);
void write_predictions_csv(const BenchReport& report, std::ostream& out);
void write_summary_json(const BenchReport& report, std::ostream& out);

/// Parses "start:stop:step" (stop inclusive within 1e-9) or a comma list.
std::vector<double> parse_grid(std::string_view text);

} // namespace ssvep
