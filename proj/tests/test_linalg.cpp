#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "random_fixtures.hpp"
#include "rnforms/linalg.hpp"

using namespace rnforms;

namespace {

Matrix random_hermitian(fixtures::Rng& rng, Eigen::Index n) {
    const Matrix g = fixtures::gaussian(rng, n, n);
    return (g + g.adjoint()) / 2.0;
}

}  // namespace

TEST(HermitianMatrix, RejectsSkewInput) {
    Matrix m(2, 2);
    m << 1.0, Complex(0.0, 1.0), Complex(0.0, 1.0), 2.0;
    EXPECT_THROW(HermitianMatrix{m}, std::invalid_argument);
    EXPECT_THROW(HermitianMatrix{Matrix(2, 3)}, std::invalid_argument);
}

TEST(HermitianMatrix, StoresExactHermitianPart) {
    Matrix m(2, 2);
    m << 1.0, Complex(0.5, 1e-12), Complex(0.5, -1e-12 + 1e-13), 2.0;
    const HermitianMatrix h(m);
    EXPECT_EQ(h(0, 1), std::conj(h(1, 0)));
    EXPECT_EQ(h(0, 0).imag(), 0.0);
}

TEST(ToleranceConfig, RejectsNonPositiveFields) {
    ToleranceConfig tol;
    EXPECT_NO_THROW(tol.validate());
    tol.tol_eq = 0.0;
    EXPECT_THROW(tol.validate(), std::invalid_argument);
    tol = {};
    tol.max_parallel_sum_doublings = 0;
    EXPECT_THROW(tol.validate(), std::invalid_argument);
}

TEST(RankCutoff, IsRelativeAboveOneAndAbsoluteBelow) {
    const ToleranceConfig tol;
    EXPECT_DOUBLE_EQ(rank_cutoff(1e6, tol), 1e-4);
    EXPECT_DOUBLE_EQ(rank_cutoff(1e-3, tol), 1e-10);
}

TEST(Eigh, SwapMatrix) {
    Matrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    const auto e = eigh(HermitianMatrix(m));
    EXPECT_NEAR(e.values(0), -1.0, 1e-14);
    EXPECT_NEAR(e.values(1), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(e.vectors(0, 1)), std::sqrt(0.5), 1e-14);
}

TEST(Eigh, PurelyImaginaryOffDiagonal) {
    Matrix m(2, 2);
    m << 1.0, Complex(0.0, -2.0), Complex(0.0, 2.0), 1.0;
    const auto e = eigh(HermitianMatrix(m));
    EXPECT_NEAR(e.values(0), -1.0, 1e-14);
    EXPECT_NEAR(e.values(1), 3.0, 1e-14);
}

TEST(Eigh, EmptyAndScalar) {
    EXPECT_EQ(eigh(HermitianMatrix::zero(0)).values.size(), 0);
    const auto e = eigh(HermitianMatrix::diagonal(RealVector::Constant(1, 4.5)));
    EXPECT_DOUBLE_EQ(e.values(0), 4.5);
}

TEST(Eigh, RandomMatchesReferenceSolverAndReconstructs) {
    fixtures::Rng rng(11);
    for (int trial = 0; trial < 60; ++trial) {
        const Eigen::Index n = fixtures::uniform_int(rng, 1, 10);
        const Matrix m = random_hermitian(rng, n);
        const auto e = eigh(HermitianMatrix(m));

        Eigen::SelfAdjointEigenSolver<Matrix> ref(m);
        EXPECT_LE((e.values - ref.eigenvalues()).cwiseAbs().maxCoeff(), 1e-12);

        const Matrix& v = e.vectors;
        EXPECT_LE(max_abs(v.adjoint() * v - Matrix::Identity(n, n)), 1e-13);
        EXPECT_LE(max_abs(v * e.values.cast<Complex>().asDiagonal() * v.adjoint() - m), 1e-12);
        for (Eigen::Index i = 1; i < n; ++i) EXPECT_LE(e.values(i - 1), e.values(i));
    }
}

TEST(Eigh, Deterministic) {
    fixtures::Rng rng(3);
    const Matrix m = random_hermitian(rng, 7);
    const auto a = eigh(HermitianMatrix(m));
    const auto b = eigh(HermitianMatrix(m));
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.vectors, b.vectors);
}

TEST(Eigh, RepeatedEigenvalues) {
    fixtures::Rng rng(5);
    const Matrix u = fixtures::random_unitary(rng, 5);
    RealVector d(5);
    d << 1.0, 1.0, 1.0, 2.0, 2.0;
    const Matrix m = u * d.cast<Complex>().asDiagonal() * u.adjoint();
    const auto e = eigh(hermitian_part(m));
    EXPECT_LE((e.values - d).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Psd, SqrtSquaresBack) {
    fixtures::Rng rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        const Eigen::Index n = fixtures::uniform_int(rng, 1, 7);
        const Matrix a = fixtures::psd_on(rng, fixtures::random_unitary(rng, n),
                                          fixtures::uniform_int(rng, 0, static_cast<int>(n)));
        const auto r = psd_sqrt(hermitian_part(a));
        EXPECT_LE(max_abs(r.matrix() * r.matrix() - a), 1e-12);
        EXPECT_TRUE(is_psd(r));
    }
}

TEST(Psd, SqrtRejectsIndefinite) {
    EXPECT_THROW(psd_sqrt(HermitianMatrix::diagonal(RealVector::Constant(2, -1.0))), std::domain_error);
    RealVector d(2);
    d << 1.0, -1e-13;
    EXPECT_NO_THROW(psd_sqrt(HermitianMatrix::diagonal(d)));
}

TEST(Psd, LoewnerOrder) {
    RealVector a(2), b(2);
    a << 1.0, 2.0;
    b << 1.0, 3.0;
    EXPECT_TRUE(loewner_leq(HermitianMatrix::diagonal(a), HermitianMatrix::diagonal(b)));
    EXPECT_FALSE(loewner_leq(HermitianMatrix::diagonal(b), HermitianMatrix::diagonal(a)));
}

TEST(Pinv, PenroseConditions) {
    fixtures::Rng rng(23);
    for (int trial = 0; trial < 30; ++trial) {
        const Eigen::Index n = fixtures::uniform_int(rng, 1, 7);
        const Matrix u = fixtures::random_unitary(rng, n);
        const Matrix a = fixtures::psd_on(rng, u, fixtures::uniform_int(rng, 0, static_cast<int>(n)));
        const Matrix p = pinv(hermitian_part(a)).matrix();
        EXPECT_LE(max_abs(a * p * a - a), 1e-12);
        EXPECT_LE(max_abs(p * a * p - p), 1e-11);
        EXPECT_LE(max_abs((a * p).adjoint() - a * p), 1e-12);
    }
}

TEST(Subspaces, KernelAndRangeAreComplementary) {
    fixtures::Rng rng(29);
    for (int trial = 0; trial < 30; ++trial) {
        const Eigen::Index n = fixtures::uniform_int(rng, 1, 8);
        const auto rank = fixtures::uniform_int(rng, 0, static_cast<int>(n));
        const Matrix a = fixtures::psd_on(rng, fixtures::random_unitary(rng, n), rank);
        const auto h = hermitian_part(a);
        const auto k = kernel_basis(h);
        const auto r = range_basis(h);
        EXPECT_EQ(r.size(), rank);
        EXPECT_EQ(k.size() + r.size(), n);
        if (!k.is_empty()) {
            EXPECT_LE(max_abs(a * k.columns()), 1e-12);
            if (!r.is_empty()) EXPECT_LE(max_abs(k.columns().adjoint() * r.columns()), 1e-12);
        }
        const Matrix p = project_onto(r).matrix();
        EXPECT_LE(max_abs(p * a - a), 1e-12);
    }
}

TEST(Subspaces, SpanOfDependentColumns) {
    Matrix c(3, 3);
    c << 1, 2, 0, 0, 0, 0, 1, 2, 1;
    const auto s = span_of(c);
    EXPECT_EQ(s.size(), 2);
    EXPECT_EQ(span_of(Matrix::Zero(3, 2)).size(), 0);
}

TEST(Subspaces, RejectsNonOrthonormalColumns) {
    Matrix c(2, 2);
    c << 1, 1, 0, 1;
    EXPECT_THROW(SubspaceBasis{c}, std::invalid_argument);
}

TEST(ParallelSum, Scalars) {
    const auto a = HermitianMatrix::diagonal(RealVector::Constant(1, 3.0));
    const auto b = HermitianMatrix::diagonal(RealVector::Constant(1, 6.0));
    EXPECT_NEAR(parallel_sum(a, b)(0, 0).real(), 2.0, 1e-14);
    EXPECT_NEAR(parallel_sum(a, HermitianMatrix::zero(1))(0, 0).real(), 0.0, 1e-14);
}

TEST(ParallelSum, MatchesPseudoinverseFormulaWhenWellConditioned) {
    fixtures::Rng rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const Eigen::Index n = fixtures::uniform_int(rng, 1, 6);
        const Matrix a = fixtures::psd_on(rng, fixtures::random_unitary(rng, n),
                                          fixtures::uniform_int(rng, 0, static_cast<int>(n)));
        const Matrix b = fixtures::psd_on(rng, fixtures::random_unitary(rng, n),
                                          fixtures::uniform_int(rng, 0, static_cast<int>(n)));
        // A (A+B)^+ B with the pseudoinverse from a reference solver.
        const Matrix sum = a + b;
        Eigen::SelfAdjointEigenSolver<Matrix> es(sum);
        Matrix inv = Matrix::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (es.eigenvalues()(i) > 1e-9) {
                inv += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint() / es.eigenvalues()(i);
            }
        }
        const Matrix expected = a * inv * b;
        const auto got = parallel_sum(hermitian_part(a), hermitian_part(b));
        EXPECT_LE(max_abs(got.matrix() - expected), 1e-9);
        // Symmetric in its arguments and below both.
        EXPECT_LE(max_abs(parallel_sum(hermitian_part(b), hermitian_part(a)).matrix() - got.matrix()), 1e-10);
        EXPECT_TRUE(loewner_leq(got, hermitian_part(a)));
        EXPECT_TRUE(loewner_leq(got, hermitian_part(b)));
    }
}

TEST(ParallelSum, LargeMultipleOfInvertibleTendsToFirst) {
    fixtures::Rng rng(37);
    const Matrix a = fixtures::psd_on(rng, fixtures::random_unitary(rng, 4), 2);
    const Matrix b = fixtures::psd_on(rng, fixtures::random_unitary(rng, 4), 4);
    const auto got = parallel_sum(hermitian_part(a), hermitian_part(std::ldexp(1.0, 40) * b));
    EXPECT_LE(max_abs(got.matrix() - a), 1e-9);
}

TEST(ParallelSum, DimensionMismatchThrows) {
    EXPECT_THROW(parallel_sum(HermitianMatrix::zero(2), HermitianMatrix::zero(3)), std::invalid_argument);
}
