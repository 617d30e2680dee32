/**
 * @file adtrca.hpp
 * @brief Adaptive TRCA: TRCA on trials passed through a per-stimulus temporal
 *        filter learned by multitask ARD regression on the sinusoid dictionary.
 *
 * With every temporal filter equal to the identity the method reduces to TRCA.
 */

#pragma once

#include "ssvep/ard.hpp"
#include "ssvep/classification.hpp"
#include "ssvep/dataset.hpp"
#include "ssvep/linalg.hpp"
#include "ssvep/parallel.hpp"
#include "ssvep/reference.hpp"

#include <span>
#include <vector>

namespace ssvep {

/// How a test trial is filtered before it is scored against class s.
enum class TestFiltering {
    class_specific, ///< X_test F_s for class s
    shared_mean,    ///< X_test (1/N_s) sum_s F_s for every class
};

struct AdTrcaConfig {
    ArdConfig ard;
    int n_harmonics = kDefaultHarmonics;
    TestFiltering test_filtering = TestFiltering::class_specific;
    /// Replace every temporal filter by the identity (TRCA limiting case).
    bool identity_filter = false;
};

struct AdTrcaModel {
    std::vector<Matrix> temporal_filters; ///< F_s, N_t x N_t
    std::vector<Vector> filters;          ///< w_s
    std::vector<Matrix> templates;        ///< A_f,s, mean of filtered training trials
    Matrix ensemble;                      ///< [w_1 ... w_Ns]
    AdTrcaConfig config;
    std::vector<int> ard_iterations;      ///< per stimulus; empty with identity filters
    std::vector<Eigen::Index> ard_active; ///< surviving dictionary columns per stimulus

    int n_stimuli() const noexcept { return static_cast<int>(filters.size()); }
    Eigen::Index n_channels() const noexcept { return ensemble.rows(); }
};

/// Fits one ARD problem per stimulus on the (windowed, centralized) training
/// trials, filters the trials along time, then solves the TRCA pencil on the
/// filtered trials. The dictionary must have one row per trial sample.
AdTrcaModel adtrca_fit(const Dataset& train,
                       const ReferenceDictionary& dictionary,
                       const AdTrcaConfig& config = {},
                       Execution exec = Execution::serial);

/// Convenience overload that builds the dictionary from the dataset's
/// frequencies, sampling rate and trial length.
AdTrcaModel adtrca_fit(const Dataset& train, const AdTrcaConfig& config = {}, Execution exec = Execution::serial);

Classification adtrca_classify(const AdTrcaModel& model, const Trial& test, bool ensemble);

std::vector<Classification> adtrca_classify_all(const AdTrcaModel& model,
                                                std::span<const Trial> tests,
                                                bool ensemble,
                                                Execution exec = Execution::serial);

/// (A_f A_f^T, B_f B_f^T) from trials filtered as X F.
linalg::SymmetricPencil filtered_pencil(std::span<const Matrix> trials, const Matrix& temporal);

/// (A C A^T, B D B^T) with D = blockdiag(C, ..., C), accumulated per trial
/// without materializing D.
linalg::SymmetricPencil temporal_pencil(std::span<const Matrix> trials, const Matrix& c);

} // namespace ssvep
