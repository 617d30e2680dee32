/**
 * @file linalg.cpp
 * @brief Eigen-backed factorizations and the whitened generalized eigensolver.
 */

#include "ssvep/linalg.hpp"

#include "ssvep/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

namespace ssvep::linalg {

namespace {

std::mutex g_audit_mutex;
ResidualAudit g_audit;
std::atomic<bool> g_strict{false};

void require_square(const Matrix& m, const char* who)
{
    if (m.rows() != m.cols() || m.rows() == 0) {
        std::ostringstream msg;
        msg << who << ": expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
        fail(ErrorKind::invalid_input, msg.str());
    }
}

void require_finite(const Matrix& m, const char* who)
{
    if (!m.allFinite())
        fail(ErrorKind::invalid_input, std::string(who) + ": non-finite entries");
}

void require_symmetric(const Matrix& m, const char* who)
{
    const double scale = m.norm();
    const double asym = (m - m.transpose()).norm();
    if (asym > 1e-10 * scale) {
        std::ostringstream msg;
        msg << who << ": matrix is not symmetric (relative asymmetry " << asym / scale << ")";
        fail(ErrorKind::invalid_input, msg.str());
    }
}

Matrix symmetrized(const Matrix& m)
{
    return 0.5 * (m + m.transpose());
}

void record_solve(double residual)
{
    std::lock_guard lock(g_audit_mutex);
    ++g_audit.solves;
    if (!(residual <= kGenEigResidualTol))
        ++g_audit.violations;
    if (!(residual <= g_audit.worst_relative_residual))
        g_audit.worst_relative_residual = residual;
}

double relative_residual(const Matrix& s, const Matrix& q, const Vector& w, double lambda)
{
    const Vector sw = s * w;
    const double scale = sw.norm();
    const double r = (sw - lambda * (q * w)).norm();
    if (scale == 0.0)
        return r == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return r / scale;
}

} // namespace

Matrix cholesky(const Matrix& m, double ridge)
{
    require_square(m, "cholesky");
    require_finite(m, "cholesky");
    require_symmetric(m, "cholesky");

    Matrix a = symmetrized(m);
    a.diagonal().array() += ridge;
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success)
        fail(ErrorKind::decomposition, "cholesky: matrix is not positive definite");
    Matrix l = llt.matrixL();
    if (!l.allFinite() || (l.diagonal().array() <= 0.0).any())
        fail(ErrorKind::decomposition, "cholesky: matrix is not positive definite");
    return l;
}

SymEig sym_eig(const Matrix& m)
{
    require_square(m, "sym_eig");
    require_finite(m, "sym_eig");
    require_symmetric(m, "sym_eig");

    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrized(m));
    if (solver.info() != Eigen::Success)
        fail(ErrorKind::decomposition, "sym_eig: eigensolver did not converge");

    // Eigen returns ascending order.
    SymEig out;
    out.values = solver.eigenvalues().reverse();
    out.vectors = solver.eigenvectors().rowwise().reverse();
    return out;
}

void apply_sign_convention(Vector& v)
{
    if (v.size() == 0)
        return;
    Eigen::Index idx = 0;
    v.cwiseAbs().maxCoeff(&idx);
    if (v(idx) < 0.0)
        v = -v;
}

GenEig gen_eig_max(const SymmetricPencil& pencil)
{
    const Matrix& s_in = pencil.numerator;
    const Matrix& q_in = pencil.denominator;
    require_square(s_in, "gen_eig_max");
    require_square(q_in, "gen_eig_max");
    if (s_in.rows() != q_in.rows())
        fail(ErrorKind::invalid_input, "gen_eig_max: numerator and denominator sizes differ");
    require_finite(s_in, "gen_eig_max");
    require_finite(q_in, "gen_eig_max");
    require_symmetric(s_in, "gen_eig_max");
    require_symmetric(q_in, "gen_eig_max");

    const auto n = q_in.rows();
    const double trace = q_in.trace();
    if (!(trace > 0.0))
        fail(ErrorKind::degenerate_denominator, "gen_eig_max: denominator has zero trace");

    const Matrix s = symmetrized(s_in);
    Matrix q = symmetrized(q_in);
    q.diagonal().array() += kDenominatorRidge * trace / static_cast<double>(n);

    const Matrix l = cholesky(q);
    const auto lower = l.triangularView<Eigen::Lower>();
    // whitened = L^-1 S L^-T
    const Matrix half = lower.solve(s);
    const Matrix whitened = symmetrized(lower.solve(half.transpose()));

    const SymEig eig = sym_eig(whitened);
    GenEig out;
    out.w = l.transpose().triangularView<Eigen::Upper>().solve(eig.vectors.col(0));
    out.w.normalize();
    apply_sign_convention(out.w);
    // Rayleigh quotient of the mapped-back vector; more accurate than the
    // whitened eigenvalue when Q_r is poorly conditioned.
    out.lambda = out.w.dot(s * out.w) / out.w.dot(q * out.w);
    out.relative_residual = relative_residual(s, q, out.w, out.lambda);

    record_solve(out.relative_residual);
    if (g_strict.load(std::memory_order_relaxed) && !(out.relative_residual <= kGenEigResidualTol)) {
        std::ostringstream msg;
        msg << "gen_eig_max: relative residual " << out.relative_residual << " exceeds " << kGenEigResidualTol;
        fail(ErrorKind::numerical_failure, msg.str());
    }
    return out;
}

double pearson(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y)
{
    if (x.size() != y.size())
        fail(ErrorKind::invalid_input, "pearson: length mismatch");
    if (x.size() < 2)
        fail(ErrorKind::invalid_input, "pearson: need at least 2 observations");

    const Vector xc = x.array() - x.mean();
    const Vector yc = y.array() - y.mean();
    const double sxx = xc.squaredNorm();
    const double syy = yc.squaredNorm();
    // Rounding of the mean leaves ~eps-sized residue on constant inputs.
    if (sxx <= 1e-28 * x.squaredNorm() || syy <= 1e-28 * y.squaredNorm())
        fail(ErrorKind::undefined_correlation, "pearson: zero variance");
    const double r = xc.dot(yc) / std::sqrt(sxx * syy);
    return std::clamp(r, -1.0, 1.0);
}

double matrix_corr(const Matrix& x, const Matrix& y)
{
    if (x.rows() != y.rows() || x.cols() != y.cols()) {
        std::ostringstream msg;
        msg << "matrix_corr: shape mismatch " << x.rows() << "x" << x.cols() << " vs " << y.rows() << "x"
            << y.cols();
        fail(ErrorKind::invalid_input, msg.str());
    }
    using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const RowMajor xr = x;
    const RowMajor yr = y;
    return pearson(Eigen::Map<const Vector>(xr.data(), xr.size()), Eigen::Map<const Vector>(yr.data(), yr.size()));
}

ResidualAudit residual_audit() noexcept
{
    std::lock_guard lock(g_audit_mutex);
    return g_audit;
}

void reset_residual_audit() noexcept
{
    std::lock_guard lock(g_audit_mutex);
    g_audit = {};
}

void set_strict_residual_checks(bool enabled) noexcept
{
    g_strict.store(enabled, std::memory_order_relaxed);
}

bool strict_residual_checks() noexcept
{
    return g_strict.load(std::memory_order_relaxed);
}

} // namespace ssvep::linalg
