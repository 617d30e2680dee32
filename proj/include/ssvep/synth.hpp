/**
 * @file synth.hpp
 * @brief Seeded synthetic SSVEP datasets.
 *
 * Each trial carries one SSVEP source, sum_k (1/k) sin(2 pi k f t + phase),
 * spread over the channels by a random full-rank mixing matrix. The phase of
 * every harmonic has a fixed per-class part plus a per-block jitter that is
 * shared by all stimuli of the block. Noise is rescaled globally so that the
 * channel-mean signal-to-noise power ratio over all trials equals snr_db.
 */

#pragma once

#include "ssvep/dataset.hpp"

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

namespace ssvep {

enum class StructuredNoise {
    none,           ///< fresh white Gaussian noise only
    pink,           ///< fresh 1/f noise per trial and channel
    /// One fixed 1/f waveform in every trial, on a fresh random spatial
    /// pattern per trial, plus fresh white noise.
    shared_profile,
};

struct SynthConfig {
    std::vector<double> frequencies_hz{6.66, 7.5, 8.57, 10.0, 12.0};
    double fs = 128.0;
    int n_channels = 8;
    int n_blocks = 6;
    double duration_s = 4.0;
    double latency_s = 0.0;  ///< silent lead-in before the response starts
    int n_harmonics = 3;
    double snr_db = 0.0;
    StructuredNoise noise = StructuredNoise::none;
    /// Share of the noise power taken by the fixed profile (shared_profile only).
    double shared_fraction = 0.5;
    double phase_jitter_rad = std::numbers::pi / 4.0;
    std::uint64_t mixing_seed = 1;
    std::uint64_t noise_seed = 2;
    /// Empty = standard 10-20 names, O1 and O2 first.
    std::vector<std::string> channel_names;
};

/// Throws configuration error on any invalid field.
void validate(const SynthConfig& config);

/// Deterministic in (config); samples are rounded to float32 precision so a
/// saved dataset reloads bitwise.
Dataset generate(const SynthConfig& config);

/// Permutes the stimulus labels within every block, keeping each block complete.
Dataset shuffle_labels(const Dataset& dataset, std::uint64_t seed);

StructuredNoise parse_structured_noise(const std::string& name);
std::string to_string(StructuredNoise noise);

} // namespace ssvep
