/**
 * @file ard.hpp
 * @brief Multitask sparse Bayesian regression with shared ARD precisions.
 *
 * Every channel of every training trial of one stimulus is a regression task
 * y_i = Phi w_i + e_i over the shared sinusoid dictionary Phi. The tasks share
 * the per-coefficient precisions a and the noise precision a0, which are
 * learned by type-II maximum likelihood with the fixed-point updates
 *
 *     Sigma = (a0 Phi^T Phi + diag(a))^-1
 *     mu_i  = a0 Sigma Phi^T y_i
 *     a_j   <- L (1 - a_j Sigma_jj) / sum_i mu_ij^2
 *     a0    <- L (N_t - sum_j (1 - a_j Sigma_jj)) / sum_i ||y_i - Phi mu_i||^2
 *
 * The fitted posterior defines the temporal filter F = a0 Phi Sigma Phi^T
 * applied to the time axis of each trial.
 *
 * Targets are internally rescaled to unit mean square before iterating, so
 * a_init, a0_init and prune_threshold are scale-free; the returned model is
 * expressed in the original units.
 */

#pragma once

#include "ssvep/dataset.hpp"
#include "ssvep/reference.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace ssvep {

struct MtlProblem {
    Matrix dictionary; ///< Phi, N_t x P
    Matrix targets;    ///< N_t x L, column m*N_ch + ch is channel ch of trial m

    Eigen::Index n_samples() const noexcept { return targets.rows(); }
    Eigen::Index n_tasks() const noexcept { return targets.cols(); }
    Eigen::Index n_coefficients() const noexcept { return dictionary.cols(); }
};

MtlProblem build_problem(std::span<const Matrix> trials, const ReferenceDictionary& dictionary);
MtlProblem build_problem(std::span<const Trial> trials, const ReferenceDictionary& dictionary);

struct ArdConfig {
    int max_iters = 300;
    double tol = 1e-3;                 ///< max relative change in a
    double a_init = 1.0;               ///< in unit-mean-square target units
    std::optional<double> a0_init;     ///< original units; default 10 / var(targets)
    double prune_threshold = 1e8;      ///< in unit-mean-square target units
};

struct ArdModel {
    Vector a;                          ///< precisions (original units)
    double a0 = 0.0;                   ///< noise precision (original units)
    Matrix sigma;                      ///< P x P, zero rows/cols for pruned components
    Matrix mu;                         ///< P x L posterior means
    std::vector<bool> pruned;
    std::vector<double> evidence_trace; ///< marginal log-likelihood per iteration
    int n_iters = 0;
    bool converged = false;
    int evidence_decreases = 0;        ///< iterations where the trace fell by more than 1e-6

    Eigen::Index n_active() const noexcept;
};

ArdModel ard_fit(const MtlProblem& problem, const ArdConfig& config = {});

/// Sum over tasks of log N(y_i | 0, a0^-1 I + Phi diag(a)^-1 Phi^T), evaluated
/// with a Cholesky factorization of the N_t x N_t marginal covariance.
/// Infinite precisions contribute nothing.
double marginal_log_likelihood(const Vector& a, double a0, const MtlProblem& problem);
double marginal_log_likelihood(const ArdModel& model, const MtlProblem& problem);

struct TemporalFilter {
    Matrix filter; ///< F = a0 Phi Sigma Phi^T, N_t x N_t, symmetric
    Matrix c;      ///< F F^T
};

TemporalFilter temporal_filter(const ArdModel& model, const ReferenceDictionary& dictionary);

/// iteration,evidence rows for diagnostics.
void write_evidence_csv(const ArdModel& model, std::ostream& out);

} // namespace ssvep
