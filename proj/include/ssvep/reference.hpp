/**
 * @file reference.hpp
 * @brief Sine/cosine reference templates and the stacked harmonic dictionary.
 */

#pragma once

#include "ssvep/dataset.hpp"

#include <span>
#include <vector>

namespace ssvep {

inline constexpr int kDefaultHarmonics = 5;

/// n_samples x 2*n_harmonics; column 2(k-1) is sin(2 pi k f t), column 2(k-1)+1 is cos.
/// t starts at 0 on the first sample of the analysis window.
struct ReferenceTemplate {
    Matrix matrix;
    double frequency_hz = 0.0;
    int n_harmonics = 0;
    double fs = 0.0;
};

/// Horizontal concatenation of templates in stimulus order (unnormalized).
struct ReferenceDictionary {
    Matrix matrix;
    std::vector<double> frequencies_hz;
    int n_harmonics = 0;
    double fs = 0.0;

    int n_stimuli() const noexcept { return static_cast<int>(frequencies_hz.size()); }
    /// Column block of stimulus s.
    ReferenceTemplate template_of(int stimulus) const;
};

ReferenceTemplate build_template(double frequency_hz, int n_harmonics, double fs, Eigen::Index n_samples);

ReferenceDictionary build_dictionary(std::span<const double> frequencies_hz,
                                     int n_harmonics,
                                     double fs,
                                     Eigen::Index n_samples);

} // namespace ssvep
