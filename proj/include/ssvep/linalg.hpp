/**
 * @file linalg.hpp
 * @brief Dense kernels: Cholesky, symmetric eigensolver, symmetric-definite
 *        generalized eigensolver, and correlation measures.
 */

#pragma once

#include "ssvep/dataset.hpp"

#include <cstdint>

namespace ssvep::linalg {

/// Relative ridge added to the denominator of every generalized eigenproblem,
/// scaled by the mean diagonal of the denominator.
inline constexpr double kDenominatorRidge = 1e-10;

/// Residual bound checked after every gen_eig_max solve.
inline constexpr double kGenEigResidualTol = 1e-8;

/// Lower Cholesky factor of m + ridge*I. Throws decomposition error when not PD.
Matrix cholesky(const Matrix& m, double ridge = 0.0);

struct SymEig {
    Vector values;  ///< descending
    Matrix vectors; ///< orthonormal columns, matching values
};

SymEig sym_eig(const Matrix& m);

/// The pair (S, Q) of the generalized problem S w = lambda Q w.
struct SymmetricPencil {
    Matrix numerator;
    Matrix denominator;
};

struct GenEig {
    double lambda = 0.0;
    Vector w;                      ///< unit norm, largest-|entry| component positive
    double relative_residual = 0.0; ///< ||S w - lambda Q_r w|| / ||S w||
};

/// Principal generalized eigenpair via Cholesky whitening of the ridged denominator.
GenEig gen_eig_max(const SymmetricPencil& pencil);

/// Flips v so its largest-magnitude entry is positive (first such entry on ties).
void apply_sign_convention(Vector& v);

/// Sample Pearson correlation. Throws undefined-correlation on zero variance.
double pearson(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y);

/// Pearson correlation of two equally-shaped matrices flattened row-major.
double matrix_corr(const Matrix& x, const Matrix& y);

/// Running statistics over every gen_eig_max call in the process.
struct ResidualAudit {
    std::uint64_t solves = 0;
    std::uint64_t violations = 0;
    double worst_relative_residual = 0.0;
};

ResidualAudit residual_audit() noexcept;
void reset_residual_audit() noexcept;

/// When enabled, a solve that misses kGenEigResidualTol throws numerical_failure
/// instead of only being counted.
void set_strict_residual_checks(bool enabled) noexcept;
bool strict_residual_checks() noexcept;

} // namespace ssvep::linalg
