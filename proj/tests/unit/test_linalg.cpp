#include "ssvep/error.hpp"
#include "ssvep/linalg.hpp"

#include "oracles.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

using namespace ssvep;
using namespace ssvep::linalg;
using testing_support::random_matrix;

TEST(Cholesky, IdentityAndHandCase)
{
    EXPECT_EQ(cholesky(Matrix::Identity(3, 3)), Matrix::Identity(3, 3));
    Matrix m(2, 2);
    m << 4, 2, 2, 3;
    Matrix expected(2, 2);
    expected << 2, 0, 1, std::sqrt(2.0);
    EXPECT_LT((cholesky(m) - expected).norm(), 1e-14);
}

TEST(Cholesky, Reconstructs)
{
    const Matrix g = random_matrix(6, 6, 11);
    const Matrix m = g.transpose() * g + Matrix::Identity(6, 6);
    const Matrix l = cholesky(m);
    EXPECT_LT((l * l.transpose() - m).norm() / m.norm(), 1e-10);
    EXPECT_TRUE(l.isLowerTriangular());
}

TEST(Cholesky, RejectsIndefiniteAndAsymmetric)
{
    Matrix m(2, 2);
    m << 1, 2, 2, 1;
    EXPECT_SSVEP_ERROR(cholesky(m), ErrorKind::decomposition);
    Matrix asym(2, 2);
    asym << 1, 0.5, 0, 1;
    EXPECT_SSVEP_ERROR(cholesky(asym), ErrorKind::invalid_input);
}

TEST(SymEig, SmallCases)
{
    Matrix d = Matrix::Zero(2, 2);
    d.diagonal() << 3, 1;
    const SymEig a = sym_eig(d);
    EXPECT_NEAR(a.values(0), 3.0, 1e-14);
    EXPECT_NEAR(a.values(1), 1.0, 1e-14);
    EXPECT_LT((a.vectors.cwiseAbs() - Matrix::Identity(2, 2)).norm(), 1e-14);

    Matrix swap(2, 2);
    swap << 0, 1, 1, 0;
    const SymEig b = sym_eig(swap);
    EXPECT_NEAR(b.values(0), 1.0, 1e-14);
    EXPECT_NEAR(b.values(1), -1.0, 1e-14);
}

TEST(SymEig, RandomResidual)
{
    Matrix m = random_matrix(8, 8, 12);
    m = (0.5 * (m + m.transpose())).eval();
    const SymEig e = sym_eig(m);
    EXPECT_LT((m * e.vectors - e.vectors * e.values.asDiagonal()).norm(), 1e-10 * m.norm());
    EXPECT_LT((e.vectors.transpose() * e.vectors - Matrix::Identity(8, 8)).norm(), 1e-12);
    for (Eigen::Index i = 1; i < 8; ++i)
        EXPECT_GE(e.values(i - 1), e.values(i));
}

TEST(GenEigMax, DiagonalPencil)
{
    SymmetricPencil p{Matrix::Zero(2, 2), Matrix::Identity(2, 2)};
    p.numerator.diagonal() << 2, 1;
    const GenEig g = gen_eig_max(p);
    EXPECT_NEAR(g.lambda, 2.0, 1e-8);
    EXPECT_NEAR(g.w(0), 1.0, 1e-10);
    EXPECT_NEAR(g.w(1), 0.0, 1e-10);
}

TEST(GenEigMax, IdentityPencil)
{
    const Matrix q = oracle::random_spd(5, 3);
    const GenEig g = gen_eig_max({q, q});
    EXPECT_NEAR(g.lambda, 1.0, 1e-8);
}

TEST(GenEigMax, RandomPairResidualAndMaximality)
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Matrix s = oracle::random_spd(5, 100 + seed);
        const Matrix q = oracle::random_spd(5, 200 + seed);
        const GenEig g = gen_eig_max({s, q});
        EXPECT_LE(g.relative_residual, kGenEigResidualTol);
        EXPECT_NEAR(g.w.norm(), 1.0, 1e-12);
        // No random direction beats the returned quotient.
        const double sampled = oracle::monte_carlo_rayleigh(s, q, 2000, seed);
        EXPECT_LE(sampled, g.lambda * (1.0 + 1e-9));
        const double quotient = g.w.dot(s * g.w) / g.w.dot(q * g.w);
        EXPECT_NEAR(quotient, g.lambda, 1e-8 * g.lambda);
    }
}

TEST(GenEigMax, ScaleInvariant)
{
    const Matrix s = oracle::random_spd(4, 21);
    const Matrix q = oracle::random_spd(4, 22);
    const GenEig a = gen_eig_max({s, q});
    const GenEig b = gen_eig_max({7.5 * s, 7.5 * q});
    EXPECT_LT((a.w - b.w).norm(), 1e-8);
    EXPECT_NEAR(a.lambda, b.lambda, 1e-8 * a.lambda);
}

TEST(GenEigMax, MatchesSymEigForIdentityDenominator)
{
    Matrix s = random_matrix(6, 6, 31);
    s = (0.5 * (s + s.transpose())).eval();
    const GenEig g = gen_eig_max({s, Matrix::Identity(6, 6)});
    const SymEig e = sym_eig(s);
    EXPECT_NEAR(g.lambda, e.values(0), 1e-8);
    Vector v = e.vectors.col(0);
    apply_sign_convention(v);
    EXPECT_LT((g.w - v).norm(), 1e-8);
}

TEST(GenEigMax, SignConvention)
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const GenEig g = gen_eig_max({oracle::random_spd(4, seed), oracle::random_spd(4, seed + 50)});
        Eigen::Index idx = 0;
        g.w.cwiseAbs().maxCoeff(&idx);
        EXPECT_GT(g.w(idx), 0.0);
    }
}

TEST(GenEigMax, SingularDenominatorIsRidged)
{
    // Rank-1 denominator: the ridge keeps the problem solvable.
    Vector u(3);
    u << 1, 2, 3;
    const Matrix q = u * u.transpose();
    const GenEig g = gen_eig_max({oracle::random_spd(3, 9), q});
    EXPECT_TRUE(std::isfinite(g.lambda));
    EXPECT_TRUE(g.w.allFinite());
}

TEST(GenEigMax, Errors)
{
    EXPECT_SSVEP_ERROR(gen_eig_max({Matrix::Identity(2, 2), Matrix::Zero(2, 2)}), ErrorKind::degenerate_denominator);
    EXPECT_SSVEP_ERROR(gen_eig_max({Matrix::Identity(2, 2), Matrix::Identity(3, 3)}), ErrorKind::invalid_input);
    Matrix asym = Matrix::Identity(2, 2);
    asym(0, 1) = 0.3;
    EXPECT_SSVEP_ERROR(gen_eig_max({asym, Matrix::Identity(2, 2)}), ErrorKind::invalid_input);
    Matrix nan = Matrix::Identity(2, 2);
    nan(0, 0) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_SSVEP_ERROR(gen_eig_max({nan, Matrix::Identity(2, 2)}), ErrorKind::invalid_input);
}

TEST(GenEigMax, AuditCountsSolves)
{
    reset_residual_audit();
    gen_eig_max({oracle::random_spd(3, 1), oracle::random_spd(3, 2)});
    gen_eig_max({oracle::random_spd(3, 3), oracle::random_spd(3, 4)});
    const ResidualAudit audit = residual_audit();
    EXPECT_EQ(audit.solves, 2u);
    EXPECT_EQ(audit.violations, 0u);
    EXPECT_LE(audit.worst_relative_residual, kGenEigResidualTol);
}

TEST(Pearson, KnownValues)
{
    Vector x(4), y(4);
    x << 1, 2, 3, 4;
    y << 1, 3, 2, 4;
    EXPECT_NEAR(pearson(x, y), 0.8, 1e-14);
    EXPECT_NEAR(pearson(x, (2.0 * x).array() + 3.0), 1.0, 1e-14);
    EXPECT_NEAR(pearson(x, -x), -1.0, 1e-14);
}

TEST(Pearson, AffineInvarianceAndOracle)
{
    const Vector x = random_matrix(50, 1, 41).col(0);
    const Vector y = random_matrix(50, 1, 42).col(0);
    const double r = pearson(x, y);
    EXPECT_NEAR(r, oracle::pearson(x, y), 1e-12);
    EXPECT_NEAR(pearson((3.0 * x).array() + 1.0, y), r, 1e-12);
    EXPECT_NEAR(pearson((-2.0 * x).array() + 5.0, y), -r, 1e-12);
}

TEST(Pearson, ZeroVarianceIsAnError)
{
    const Vector x = Vector::Constant(10, 2.0);
    const Vector y = random_matrix(10, 1, 1).col(0);
    EXPECT_SSVEP_ERROR(pearson(x, y), ErrorKind::undefined_correlation);
    EXPECT_SSVEP_ERROR(pearson(y, Vector::Zero(10)), ErrorKind::undefined_correlation);
    EXPECT_SSVEP_ERROR(pearson(y, Vector::Zero(9)), ErrorKind::invalid_input);
}

TEST(MatrixCorr, FlattensRowMajor)
{
    const Matrix x = random_matrix(2, 3, 51);
    const Matrix y = random_matrix(2, 3, 52);
    Vector fx(6), fy(6);
    fx << x(0, 0), x(0, 1), x(0, 2), x(1, 0), x(1, 1), x(1, 2);
    fy << y(0, 0), y(0, 1), y(0, 2), y(1, 0), y(1, 1), y(1, 2);
    EXPECT_NEAR(matrix_corr(x, y), oracle::pearson(fx, fy), 1e-12);
    EXPECT_NEAR(matrix_corr(x, x), 1.0, 1e-14);
    EXPECT_NEAR(matrix_corr(x, 3.0 * x), 1.0, 1e-14);
    EXPECT_SSVEP_ERROR(matrix_corr(x, random_matrix(3, 2, 1)), ErrorKind::invalid_input);
}
