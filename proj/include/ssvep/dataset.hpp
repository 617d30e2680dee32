/**
 * @file dataset.hpp
 * @brief Trial and dataset types plus the epoching helpers (centering, windowing, channel selection).
 */

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ssvep {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// One epoch of multichannel EEG, stored channel-major (channels x samples).
struct Trial {
    Matrix samples;
    int stimulus = 0;
    int block = 0;

    Eigen::Index n_channels() const noexcept { return samples.rows(); }
    Eigen::Index n_samples() const noexcept { return samples.cols(); }
};

/// Removes the per-channel mean.
Trial centralize(const Trial& trial);

/// Seconds to a sample count, rounding half away from zero.
Eigen::Index seconds_to_samples(double seconds, double fs);

/// Sub-trial of round(duration_s*fs) samples starting at round(latency_s*fs).
Trial window(const Trial& trial, double latency_s, double duration_s, double fs);

/// A set of trials sharing channel layout and length. Immutable once built.
///
/// Trials are kept sorted by (block, stimulus). Missing (block, stimulus)
/// cells are allowed here; the cross-validation splitter rejects them.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::vector<Trial> trials,
            double sampling_rate_hz,
            std::vector<double> stimulus_frequencies_hz,
            int n_blocks,
            std::vector<std::string> channel_names,
            double latency_s = 0.0);

    const std::vector<Trial>& trials() const noexcept { return trials_; }
    double sampling_rate_hz() const noexcept { return fs_; }
    const std::vector<double>& stimulus_frequencies_hz() const noexcept { return freqs_; }
    int n_blocks() const noexcept { return n_blocks_; }
    const std::vector<std::string>& channel_names() const noexcept { return channels_; }
    /// Visual latency still to be skipped when windowing (seconds).
    double latency_s() const noexcept { return latency_s_; }

    int n_stimuli() const noexcept { return static_cast<int>(freqs_.size()); }
    int n_channels() const noexcept { return static_cast<int>(channels_.size()); }
    Eigen::Index n_samples() const noexcept;

    /// nullptr when the cell is missing.
    const Trial* find(int block, int stimulus) const;
    /// Trials of one stimulus ordered by block.
    std::vector<const Trial*> trials_of(int stimulus) const;
    /// Sorted, distinct block indices that hold at least one trial.
    std::vector<int> blocks_present() const;

private:
    std::vector<Trial> trials_;
    double fs_ = 0.0;
    std::vector<double> freqs_;
    int n_blocks_ = 0;
    std::vector<std::string> channels_;
    double latency_s_ = 0.0;
};

/// Keeps only the named channels, in the requested order.
Dataset select_channels(const Dataset& dataset, std::span<const std::string> names);

/// Keeps only trials whose block is listed.
Dataset select_blocks(const Dataset& dataset, std::span<const int> blocks);

/// Cuts every trial to duration_s after the dataset latency and centralizes
/// each window. The result has latency 0.
Dataset extract_windows(const Dataset& dataset, double duration_s);

} // namespace ssvep
