#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qfc/state.hpp"
#include "test_support.hpp"

using namespace qfc;

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

void expect_bloch_near(const BlochVector& a, const BlochVector& b, double tol) {
    EXPECT_NEAR(a.x, b.x, tol);
    EXPECT_NEAR(a.y, b.y, tol);
    EXPECT_NEAR(a.z, b.z, tol);
}

}  // namespace

TEST(PureState, NormalizesAndFixesPhase) {
    const PureState psi(Complex(0.0, 2.0), Complex(1.0, 1.0));
    EXPECT_NEAR(std::norm(psi.excited()) + std::norm(psi.ground()), 1.0, 1e-15);
    EXPECT_EQ(psi.excited().imag(), 0.0);
    EXPECT_GT(psi.excited().real(), 0.0);
    // relative phase c_G / c_E is preserved: (1 + i) / (2 i) = (1 - i) / 2
    const Complex ratio = psi.ground() / psi.excited();
    EXPECT_NEAR(ratio.real(), 0.5, 1e-15);
    EXPECT_NEAR(ratio.imag(), -0.5, 1e-15);
}

TEST(PureState, GroundAmplitudeRealWhenExcitedVanishes) {
    const PureState psi(Complex(0.0), Complex(0.0, -3.0));
    EXPECT_EQ(psi.excited(), Complex(0.0));
    EXPECT_EQ(psi.ground(), Complex(1.0));
}

TEST(PureState, RejectsZeroVector) {
    EXPECT_THROW(PureState(Complex(0.0), Complex(0.0)), std::invalid_argument);
}

TEST(BlochFromState, Poles) {
    EXPECT_EQ(bloch_from_state(PureState::ground_state()), (BlochVector{0, 0, -1}));
    EXPECT_EQ(bloch_from_state(PureState::excited_state()), (BlochVector{0, 0, 1}));
    expect_bloch_near(bloch_from_state(PureState(kInvSqrt2, kInvSqrt2)), {1, 0, 0}, 1e-15);
}

TEST(BlochFromState, UnitNormForRandomStates) {
    test::Sampler rng(11);
    for (int i = 0; i < 1000; ++i) {
        EXPECT_NEAR(bloch_from_state(rng.state()).norm(), 1.0, 1e-12);
    }
}

TEST(StateFromBloch, Examples) {
    const PureState g = state_from_bloch({0, 0, -1});
    EXPECT_EQ(g.excited(), Complex(0.0));
    EXPECT_EQ(g.ground(), Complex(1.0));
    const PureState d = state_from_bloch({1, 0, 0});
    EXPECT_NEAR(d.excited().real(), kInvSqrt2, 1e-15);
    EXPECT_NEAR(std::abs(d.ground() - Complex(kInvSqrt2)), 0.0, 1e-15);
}

TEST(StateFromBloch, RejectsNonUnitVector) {
    EXPECT_THROW(state_from_bloch({0, 0, 2}), std::invalid_argument);
    EXPECT_THROW(state_from_bloch({0, 0, 0}), std::invalid_argument);
    EXPECT_NO_THROW(state_from_bloch({0, 0, 1 + 5e-10}));
}

TEST(StateFromBloch, RoundTripRandomVectors) {
    test::Sampler rng(12);
    for (int i = 0; i < 1000; ++i) {
        const BlochVector s = rng.unit_vector();
        expect_bloch_near(bloch_from_state(state_from_bloch(s)), s, 1e-9);
    }
}

TEST(StateFromBloch, RoundTripNearPoles) {
    for (double eps : {1e-3, 1e-6, 1e-9, 1e-12}) {
        for (double z : {1.0, -1.0}) {
            const BlochVector s = normalized({eps, -eps, z});
            expect_bloch_near(bloch_from_state(state_from_bloch(s)), s, 1e-12);
        }
    }
}

TEST(StateFromBloch, StateRoundTripUpToGlobalPhase) {
    test::Sampler rng(13);
    for (int i = 0; i < 1000; ++i) {
        const PureState psi = rng.state();
        const PureState back = state_from_bloch(bloch_from_state(psi));
        // both carry the same phase convention, so amplitudes agree directly
        EXPECT_LE(std::abs(back.excited() - psi.excited()), 1e-9);
        EXPECT_LE(std::abs(back.ground() - psi.ground()), 1e-9);
    }
}

TEST(AngleOf, Examples) {
    EXPECT_DOUBLE_EQ(angle_of({0, 0, 1}).radians(), 0.0);
    EXPECT_DOUBLE_EQ(angle_of({1, 0, 0}).radians(), std::numbers::pi / 2);
    EXPECT_DOUBLE_EQ(angle_of({0, 0, -1}).radians(), std::numbers::pi);
}

TEST(AngleOf, DomainErrors) {
    EXPECT_THROW(angle_of({0, 1, 0}), std::domain_error);
    EXPECT_THROW(angle_of({-1, 0, 0}), std::domain_error);
    EXPECT_THROW(angle_of(normalized({-0.1, 0, 1})), std::domain_error);
    EXPECT_NO_THROW(angle_of(normalized({-1e-10, 0, 1})));
}

TEST(AngleOf, InvertsAngleVectorThroughStates) {
    for (int i = 0; i <= 1000; ++i) {
        const double theta = std::numbers::pi * i / 1000.0;
        const BlochVector s = bloch_from_state(state_from_bloch(BlochAngle(theta).vector()));
        EXPECT_NEAR(angle_of(s).radians(), theta, 1e-9) << "theta=" << theta;
    }
}

TEST(BlochAngle, RejectsOutOfRange) {
    EXPECT_THROW(BlochAngle(-0.1), std::domain_error);
    EXPECT_THROW(BlochAngle(4.0), std::domain_error);
}

TEST(Fidelity, IdenticalAndOrthogonal) {
    const BlochVector t = BlochAngle(0.7).vector();
    EXPECT_EQ(fidelity(t, t), 1.0);
    EXPECT_EQ(fidelity({0, 0, 1}, {0, 0, -1}), 0.0);
    EXPECT_NEAR(fidelity({1, 0, 0}, {0, 0, 1}), 0.5, 1e-15);
}
