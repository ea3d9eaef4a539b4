#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "random_fixtures.hpp"
#include "rnforms/gns.hpp"

using namespace rnforms;
using namespace rnforms::gns;

namespace {

/// Embeds a k×k matrix into the matrix-unit coordinates of M_k.
Vector element_of(const Matrix& x) {
    const Eigen::Index k = x.rows();
    Vector a(k * k);
    for (Eigen::Index p = 0; p < k; ++p) {
        for (Eigen::Index q = 0; q < k; ++q) a(p * k + q) = x(p, q);
    }
    return a;
}

/// max over a of w(a*a) / v(a*a) through a reference eigensolver restricted to range(G_v).
double reference_domination_constant(const Matrix& gw, const Matrix& gv) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(gv);
    const double top = std::max(1.0, es.eigenvalues().maxCoeff());
    Matrix half = Matrix::Zero(gv.rows(), gv.cols());
    for (Eigen::Index i = 0; i < gv.rows(); ++i) {
        if (es.eigenvalues()(i) > 1e-10 * top) {
            half += es.eigenvectors().col(i) * es.eigenvectors().col(i).adjoint() / std::sqrt(es.eigenvalues()(i));
        }
    }
    const Matrix m = half * gw * half;
    Eigen::SelfAdjointEigenSolver<Matrix> e2((m + m.adjoint()) / 2.0);
    return e2.eigenvalues().maxCoeff();
}

std::vector<StarAlgebra> test_algebras() {
    return {StarAlgebra::matrix_algebra(2), StarAlgebra::matrix_algebra(3), StarAlgebra::direct_sum({2, 1})};
}

}  // namespace

TEST(StarAlgebra, MatrixUnitsMultiplyLikeMatrices) {
    fixtures::Rng rng(81);
    const auto alg = StarAlgebra::matrix_algebra(3);
    const Matrix x = fixtures::gaussian(rng, 3, 3);
    const Matrix y = fixtures::gaussian(rng, 3, 3);
    EXPECT_LE(max_abs(alg.multiply(element_of(x), element_of(y)) - element_of(x * y)), 1e-12);
    EXPECT_LE(max_abs(alg.star(element_of(x)) - element_of(x.adjoint())), 1e-15);
    EXPECT_LE(max_abs(alg.multiply(*alg.unit(), element_of(x)) - element_of(x)), 1e-15);
    EXPECT_LE(max_abs(alg.right_matrix(element_of(y)) * element_of(x) - element_of(x * y)), 1e-12);
}

TEST(StarAlgebra, CyclicGroupAlgebra) {
    const auto alg = StarAlgebra::group_algebra_cyclic(4);
    EXPECT_FALSE(alg.is_cstar_type());
    EXPECT_EQ(alg.multiply(alg.basis(3), alg.basis(2)), alg.basis(1));
    EXPECT_EQ(alg.star(alg.basis(1)), alg.basis(3));
    EXPECT_EQ(*alg.unit(), alg.basis(0));
}

TEST(StarAlgebra, RejectsBrokenStructures) {
    // e*e = e with a conjugate-linear involution that is not involutive.
    std::vector<Vector> products{Vector::Ones(1)};
    Matrix inv(1, 1);
    inv << 2.0;
    EXPECT_THROW(StarAlgebra(products, inv), std::invalid_argument);

    // Non-associative: a 2-dim algebra with e0 e0 = e1, everything else 0 but e0 e1 = e0.
    std::vector<Vector> bad(4, Vector::Zero(2));
    bad[0] = Vector::Unit(2, 1);
    bad[1] = Vector::Unit(2, 0);
    EXPECT_THROW(StarAlgebra(bad, Matrix::Identity(2, 2)), std::invalid_argument);

    // Wrong unit.
    EXPECT_THROW(StarAlgebra(products, Matrix::Identity(1, 1), Vector::Constant(1, 2.0)), std::invalid_argument);

    // Block sizes that do not match the structure.
    const auto m2 = StarAlgebra::matrix_algebra(2);
    EXPECT_THROW(StarAlgebra(m2.products(), m2.involution(), m2.unit(), std::vector<int>{1, 1, 1, 1}),
                 std::invalid_argument);
}

TEST(Functionals, GramMatrixEncodesTheForm) {
    fixtures::Rng rng(83);
    for (const auto& alg : test_algebras()) {
        const auto v = fixtures::random_state(rng, alg);
        const Matrix g = gram_matrix(alg, v);
        const Vector a = fixtures::random_vector(rng, alg.dim());
        const Vector b = fixtures::random_vector(rng, alg.dim());
        const Complex direct = v(alg.multiply(alg.star(b), a));
        EXPECT_NEAR(std::abs(direct - b.dot(g * a)), 0.0, 1e-12);
    }
}

TEST(Functionals, DensityRoundTrip) {
    fixtures::Rng rng(89);
    const auto alg = StarAlgebra::direct_sum({2, 3});
    const std::vector<Matrix> rhos{fixtures::random_density(rng, 2), fixtures::random_density(rng, 3)};
    const auto w = density_functional(alg, rhos);
    const auto back = block_densities(alg, w);
    EXPECT_LE(max_abs(back[0] - rhos[0]), 1e-15);
    EXPECT_LE(max_abs(back[1] - rhos[1]), 1e-15);
    // w(x) = Tr(ρ x) on the first block.
    const Matrix x = fixtures::gaussian(rng, 2, 2);
    Vector a = Vector::Zero(alg.dim());
    a.head(4) = element_of(x);
    EXPECT_NEAR(std::abs(w(a) - (rhos[0] * x).trace()), 0.0, 1e-12);
    EXPECT_THROW(trace_functional(StarAlgebra::group_algebra_cyclic(3)), std::invalid_argument);
}

TEST(Representability, NegativeAndDegenerateFunctionals) {
    const auto m2 = StarAlgebra::matrix_algebra(2);
    const auto neg = trace_functional(m2).scaled(-1.0);
    const auto r = is_representable(m2, neg);
    ASSERT_FALSE(r.representable);
    const Vector a = *r.witness;
    EXPECT_LT(neg(m2.multiply(m2.star(a), a)).real(), 0.0);

    // Zero-product algebra: v(e) = 1 but v(e^* e) = 0, so v does not vanish on N_v.
    std::vector<Vector> zero{Vector::Zero(1)};
    const StarAlgebra nil(zero, Matrix::Identity(1, 1));
    const auto r2 = is_representable(nil, Functional{Vector::Ones(1)});
    EXPECT_FALSE(r2.representable);
    EXPECT_THROW(gns::gns(nil, Functional{Vector::Ones(1)}), DomainError);
    EXPECT_TRUE(is_representable(nil, Functional{Vector::Zero(1)}).representable);
}

TEST(GNS, ReconstructsRandomStates) {
    fixtures::Rng rng(97);
    for (const auto& alg : test_algebras()) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto v = fixtures::random_state(rng, alg);
            const auto t = gns::gns(alg, v);
            EXPECT_LE(t.reconstruction_residual, 1e-10);
            EXPECT_LE(t.homomorphism_residual, 1e-10);
            EXPECT_LE(t.star_residual, 1e-10);
            EXPECT_TRUE(t.cyclic_spans);
        }
    }
    const auto z3 = StarAlgebra::group_algebra_cyclic(3);
    for (int trial = 0; trial < 10; ++trial) {
        const auto t = gns::gns(z3, fixtures::random_cyclic_state(rng, 3));
        EXPECT_LE(t.reconstruction_residual, 1e-10);
        EXPECT_TRUE(t.cyclic_spans);
    }
}

TEST(GNS, VectorStateIsIrreducibleAndTraceIsNot) {
    const auto m2 = StarAlgebra::matrix_algebra(2);
    const auto pure = gns::gns(m2, vector_state(m2, Vector::Unit(2, 0)));
    EXPECT_EQ(pure.space.hilbert_dim(), 2);
    EXPECT_EQ(commutant_dimension(pure.rep), 1);
    const auto tr = gns::gns(m2, trace_functional(m2));
    EXPECT_EQ(tr.space.hilbert_dim(), 4);
    EXPECT_EQ(commutant_dimension(tr.rep), 4);
    EXPECT_EQ(commutant_dimension({}), 0);
}

TEST(StrongAc, MatchesKernelContainmentOfDensities) {
    const auto m2 = StarAlgebra::matrix_algebra(2);
    const auto v = vector_state(m2, Vector::Unit(2, 0));
    EXPECT_TRUE(is_strongly_ac(m2, v.scaled(0.4), v).absolutely_continuous);
    const auto w = vector_state(m2, Vector::Unit(2, 1));
    const auto r = is_strongly_ac(m2, w, v);
    ASSERT_FALSE(r.absolutely_continuous);
    const Vector a = *r.witness;
    const Vector aa = m2.multiply(m2.star(a), a);
    EXPECT_LE(std::abs(v(aa)), 1e-12);
    EXPECT_GT(w(aa).real(), 1e-6);
}

TEST(RnElement, RepresentsWThroughV) {
    fixtures::Rng rng(101);
    for (const auto& alg : test_algebras()) {
        for (int trial = 0; trial < 8; ++trial) {
            const auto v = fixtures::random_state(rng, alg, true);
            const auto w = fixtures::random_state(rng, alg);
            const auto e = rn_element(alg, w, v);
            EXPECT_LE(e.residual, 1e-9);
            EXPECT_LE(e.uniform_defect, 1e-8);
        }
    }
}

TEST(RnOperatorW, IdentitiesAndIntertwining) {
    fixtures::Rng rng(103);
    for (const auto& alg : test_algebras()) {
        for (int trial = 0; trial < 8; ++trial) {
            const auto v = fixtures::random_state(rng, alg, true);
            const auto w = fixtures::random_state(rng, alg);
            const auto op = rn_operator_w(alg, w, v);
            EXPECT_LE(op.w1_residual, 1e-8);
            EXPECT_LE(op.intertwining_residual, 1e-8);
            EXPECT_LE(op.w2_residual, 1e-8);
            const auto z = zeta_transport(alg, w, v);
            EXPECT_LE(z.j_zeta_residual, 1e-8);
            EXPECT_LE(z.identity_residual, 1e-8);
        }
    }
}

TEST(Domination, ConstantMatchesReferenceAndIsTight) {
    fixtures::Rng rng(107);
    for (const auto& alg : test_algebras()) {
        for (int trial = 0; trial < 8; ++trial) {
            const auto v = fixtures::random_state(rng, alg, true);
            const auto w = fixtures::random_state(rng, alg);
            const auto d = domination_check(alg, w, v);
            EXPECT_TRUE(d.dominated);
            EXPECT_NEAR(d.c_min, reference_domination_constant(gram_matrix(alg, w), gram_matrix(alg, v)),
                        1e-9 * std::max(1.0, d.c_min));
            if (d.c_min > 0.0) EXPECT_TRUE(d.c_min_tight);
            EXPECT_TRUE(d.in_commutant);
        }
    }
    const auto m2 = StarAlgebra::matrix_algebra(2);
    const auto v = trace_functional(m2);
    const auto d = domination_check(m2, v.scaled(2.0), v);
    EXPECT_NEAR(d.c_min, 2.0, 1e-12);
    EXPECT_EQ(d.commutant_dim, 4);
}

TEST(PureRigidity, RecoversAlphaAndRejectsOrthogonalState) {
    for (const int k : {2, 3}) {
        const auto alg = StarAlgebra::matrix_algebra(k);
        Vector psi = Vector::Ones(k) / std::sqrt(static_cast<double>(k));
        const auto v = vector_state(alg, psi);
        for (const double alpha : {0.0, 0.3, 0.7, 1.0, 2.0}) {
            const auto r = pure_rigidity(alg, v.scaled(alpha), v);
            ASSERT_TRUE(r.is_irreducible);
            ASSERT_TRUE(r.absolutely_continuous);
            EXPECT_NEAR(*r.alpha, alpha, 1e-8);
            EXPECT_NEAR(*r.alpha_least_squares, alpha, 1e-8);
            EXPECT_LE(r.proportionality_residual, 1e-8);
        }
        Vector other = Vector::Zero(k);
        other(0) = 1.0;
        other(1) = -1.0;
        const auto r = pure_rigidity(alg, vector_state(alg, other / std::sqrt(2.0)), v);
        EXPECT_FALSE(r.absolutely_continuous);
        EXPECT_FALSE(r.alpha.has_value());
    }
    const auto m2 = StarAlgebra::matrix_algebra(2);
    EXPECT_FALSE(pure_rigidity(m2, trace_functional(m2), trace_functional(m2)).is_irreducible);
}

TEST(FunctionalNorm, MatchesSingularValueSums) {
    fixtures::Rng rng(109);
    const auto alg = StarAlgebra::direct_sum({3, 2});
    for (int trial = 0; trial < 20; ++trial) {
        const Functional w{fixtures::random_vector(rng, alg.dim())};
        double expected = 0.0;
        for (const auto& rho : block_densities(alg, w)) {
            Eigen::JacobiSVD<Matrix> svd(rho);
            expected += svd.singularValues().sum();
        }
        EXPECT_NEAR(functional_norm(alg, w), expected, 1e-11);
    }
    // Positive functionals have norm w(1).
    const auto w = fixtures::random_state(rng, alg);
    EXPECT_NEAR(functional_norm(alg, w), w(*alg.unit()).real(), 1e-12);
}

TEST(ApproximationNorms, NonincreasingAndReachZero) {
    fixtures::Rng rng(113);
    for (const auto& alg : test_algebras()) {
        for (int trial = 0; trial < 6; ++trial) {
            const auto v = fixtures::random_state(rng, alg, trial % 2 == 0);
            auto w = fixtures::random_state(rng, alg);
            if (!is_strongly_ac(alg, w, v).absolutely_continuous) w = v.scaled(0.5);
            const auto norms = approximation_norms(alg, w, v);
            ASSERT_FALSE(norms.empty());
            EXPECT_NEAR(norms.front(), functional_norm(alg, w), 1e-12);
            for (std::size_t n = 1; n < norms.size(); ++n) EXPECT_LE(norms[n], norms[n - 1] + 1e-10);
            EXPECT_LE(norms.back(), 1e-10);
        }
    }
}
