/**
 * @file trca.hpp
 * @brief Task-related component analysis: per-stimulus spatial filters and
 *        template matching, plus the ensemble filter bank.
 */

#pragma once

#include "ssvep/classification.hpp"
#include "ssvep/dataset.hpp"
#include "ssvep/linalg.hpp"
#include "ssvep/parallel.hpp"

#include <span>
#include <vector>

namespace ssvep {

struct TrcaModel {
    std::vector<Vector> filters;   ///< w_s, unit norm with the linalg sign convention
    std::vector<Matrix> templates; ///< A_s, mean of the centralized training trials
    Matrix ensemble;               ///< [w_1 ... w_Ns], n_channels x N_s

    int n_stimuli() const noexcept { return static_cast<int>(filters.size()); }
    Eigen::Index n_channels() const noexcept { return ensemble.rows(); }
};

/// Pencil (A A^T, B B^T) for one stimulus, A the trial mean and B the
/// time-wise concatenation of the trials.
linalg::SymmetricPencil reproducibility_pencil(std::span<const Matrix> trials);

/// Fits every stimulus of a windowed, centralized training set.
TrcaModel trca_fit(const Dataset& train, Execution exec = Execution::serial);

Classification trca_classify(const TrcaModel& model, const Trial& test, bool ensemble);

std::vector<Classification> trca_classify_all(const TrcaModel& model,
                                              std::span<const Trial> tests,
                                              bool ensemble,
                                              Execution exec = Execution::serial);

namespace detail {

struct StimulusFilter {
    Vector filter;
    Matrix mean;
};

/// Principal filter of reproducibility_pencil(trials) and the trial mean.
StimulusFilter fit_stimulus_filter(std::span<const Matrix> trials);

/// Feature for one class: Pearson of w^T X vs w^T A, or the matrix
/// correlation of W^T X vs W^T A when an ensemble bank is given.
double spatial_feature(const Vector& filter, const Matrix* ensemble, const Matrix& test, const Matrix& reference);

/// Gathers the trial matrices of every stimulus, requiring at least `minimum` each.
std::vector<std::vector<Matrix>> trials_by_stimulus(const Dataset& train, std::size_t minimum);

} // namespace detail

} // namespace ssvep
