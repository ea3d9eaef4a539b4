#include <gtest/gtest.h>

#include "random_fixtures.hpp"
#include "rnforms/measures.hpp"

using namespace rnforms;
using namespace rnforms::measures;

namespace {

FiniteMeasureSpace weights(std::initializer_list<double> w) {
    RealVector v(static_cast<Eigen::Index>(w.size()));
    Eigen::Index i = 0;
    for (const double x : w) v(i++) = x;
    return FiniteMeasureSpace(v);
}

std::pair<FiniteMeasureSpace, FiniteMeasureSpace> random_ac_measures(fixtures::Rng& rng, Eigen::Index m) {
    RealVector mu(m), nu(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        mu(i) = fixtures::uniform_int(rng, 0, 4) == 0 ? 0.0 : fixtures::uniform(rng, 0.05, 2.0);
        nu(i) = mu(i) == 0.0 || fixtures::uniform_int(rng, 0, 4) == 0 ? 0.0 : fixtures::uniform(rng, 0.05, 2.0);
    }
    return {FiniteMeasureSpace(mu), FiniteMeasureSpace(nu)};
}

}  // namespace

TEST(FiniteMeasureSpace, RejectsBadWeights) {
    EXPECT_THROW(weights({1.0, -0.5}), std::invalid_argument);
    EXPECT_THROW(FiniteMeasureSpace(RealVector(0)), std::invalid_argument);
    EXPECT_DOUBLE_EQ(weights({1.0, 2.0, 3.0}).measure({0, 2}), 4.0);
}

TEST(Adjoint, FormulaAndIdentity) {
    const auto mu = weights({1.0, 2.0, 0.0});
    const auto nu = weights({3.0, 1.0, 0.0});
    Vector f(3);
    f << 1.0, Complex(0, 1), 7.0;
    const Vector g = adjoint_apply(mu, nu, f);
    EXPECT_NEAR(std::abs(g(0) - 3.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(g(1) - Complex(0, 0.5)), 0.0, 1e-15);
    EXPECT_EQ(g(2), Complex{});
    EXPECT_LE(adjoint_identity_residual(mu, nu, f), 1e-15);
}

TEST(Adjoint, RequiresAbsoluteContinuity) {
    try {
        require_absolutely_continuous(weights({1.0, 0.0}), weights({1.0, 0.5}));
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_EQ(e.witness().atoms, (std::vector<std::size_t>{1}));
    }
}

TEST(Lattice, ClosureAndPositivity) {
    fixtures::Rng rng(61);
    for (int trial = 0; trial < 30; ++trial) {
        const auto [mu, nu] = random_ac_measures(rng, fixtures::uniform_int(rng, 1, 8));
        const auto m = static_cast<Eigen::Index>(mu.atom_count());
        const Vector f = fixtures::random_vector(rng, m, true);
        const Vector g = fixtures::random_vector(rng, m, true);
        const auto r = lattice_closure_checks(mu, nu, f, g);
        EXPECT_LE(r.max_identity_residual, 1e-12);
        EXPECT_TRUE(r.positivity_holds);
        EXPECT_TRUE(r.abs_inequality_holds);
        EXPECT_LE(r.one_meet_f.real().maxCoeff(), 1.0);
    }
    const auto mu = weights({1.0});
    Vector complex_f(1);
    complex_f << Complex(0, 1);
    EXPECT_THROW(lattice_closure_checks(mu, mu, complex_f, complex_f), std::invalid_argument);
}

TEST(RnDerivative, MatchesAtomwiseRatioForEverySequence) {
    fixtures::Rng rng(67);
    for (int trial = 0; trial < 40; ++trial) {
        const auto [mu, nu] = random_ac_measures(rng, fixtures::uniform_int(rng, 1, 10));
        const auto m = mu.atom_count();
        for (const auto& seq : {std::vector<MeasurableFunction>{}, indicator_growth_sequence(m),
                                phase_ramp_sequence(m, 6)}) {
            const auto r = rn_derivative(mu, nu, seq);
            for (std::size_t a = 0; a < m; ++a) {
                const double expected = mu[a] > 0.0 ? nu[a] / mu[a] : 0.0;
                EXPECT_NEAR(std::abs(r.derivative(static_cast<Eigen::Index>(a)) - expected), 0.0, 1e-12);
            }
            EXPECT_TRUE(r.monotone);
            EXPECT_LE(r.representation_residual, 1e-12);
            EXPECT_LE(r.cauchy_residual, 1e-12);
        }
    }
}

TEST(RnDerivative, RejectsSequenceThatNeverReachesOne) {
    const auto mu = weights({1.0, 1.0});
    MeasurableFunction half = MeasurableFunction::Constant(2, 0.5);
    EXPECT_THROW(rn_derivative(mu, mu, {half}), std::invalid_argument);
}

TEST(L2, ClosedFormAndTightWitness) {
    fixtures::Rng rng(71);
    for (int trial = 0; trial < 30; ++trial) {
        const auto [mu, nu] = random_ac_measures(rng, fixtures::uniform_int(rng, 1, 8));
        const auto r = l2_report(mu, nu);
        double expected = 0.0;
        for (std::size_t a = 0; a < mu.atom_count(); ++a) {
            if (mu[a] > 0.0) expected += nu[a] * nu[a] / mu[a];
        }
        EXPECT_NEAR(r.c_min, expected, 1e-12 * std::max(1.0, expected));
        if (expected > 0.0) EXPECT_NEAR(r.witness_ratio, r.c_min, 1e-10 * r.c_min);
        for (int k = 0; k < 200; ++k) {
            const Vector phi = fixtures::random_vector(rng, static_cast<Eigen::Index>(mu.atom_count()));
            EXPECT_LE(domination_ratio(mu, nu, phi), r.c_min * (1.0 + 1e-12) + 1e-300);
        }
    }
}

TEST(Truncation, Presets) {
    const auto div = truncation_divergence(TruncationFamily::divergent(), 20);
    for (const auto& [k, c] : div) EXPECT_EQ(c, static_cast<double>(k));

    const auto conv = truncation_divergence(TruncationFamily::convergent(), 30);
    EXPECT_NEAR(conv.back().second, 1.0 - std::ldexp(1.0, -30), 1e-14);

    const auto id = truncation_divergence(TruncationFamily::identity(), 10);
    EXPECT_NEAR(id.back().second, 1.0 - std::ldexp(1.0, -10), 1e-14);

    EXPECT_THROW(TruncationFamily::preset("nope"), std::invalid_argument);
}
