#include <gtest/gtest.h>

#include <random>

#include "qbattery/channels.hpp"
#include "qbattery/ergotropy.hpp"
#include "test_support.hpp"

using namespace qbattery;
using namespace qbattery::testing;

namespace {
constexpr std::array<NoiseKind, 3> kKinds{NoiseKind::PhaseFlip, NoiseKind::BitFlip,
                                          NoiseKind::AmplitudeDamping};
}

TEST(KrausSingle, PhaseFlipAtOneIsIdentityChannel) {
    const auto k = kraus_single(NoiseKind::PhaseFlip, 1.0);
    EXPECT_EQ(k.ops()[0], Matrix(2));
    EXPECT_EQ(k.ops()[1], Matrix::identity(2));
}

TEST(KrausSingle, AmplitudeDampingAtZeroIsIdentityChannel) {
    const auto k = kraus_single(NoiseKind::AmplitudeDamping, 0.0);
    EXPECT_EQ(k.ops()[0], Matrix::identity(2));
    EXPECT_EQ(k.ops()[1], Matrix(2));
}

TEST(KrausSingle, BitFlipHalfRemovesSigmaYComponent) {
    const auto k = kraus_single(NoiseKind::BitFlip, 0.5);
    EXPECT_LE(k.completeness_error(), 1e-12);
    const auto rho = apply_channel(k, charged_state_single(at_omega_t(kPi / 4)));
    // <sigma_y> = 2 Im(rho_10): was 1, now 0
    EXPECT_NEAR((rho.mat() * pauli::Y()).trace().real(), 0.0, 1e-15);
    EXPECT_LE(max_abs_diff(rho.mat(), Matrix::diagonal({0.5, 0.5})), 1e-15);
}

TEST(KrausSingle, RejectsOutOfRange) {
    EXPECT_THROW(kraus_single(NoiseKind::BitFlip, -0.1), InvalidParameter);
    EXPECT_THROW(kraus_single(NoiseKind::AmplitudeDamping, 1.1), InvalidParameter);
    EXPECT_THROW(kraus_two(NoiseKind::PhaseFlip, 2.0), InvalidParameter);
}

TEST(KrausSet, RejectsIncompleteSets) {
    EXPECT_THROW(KrausSet({pauli::X(), pauli::Z()}), ContractViolation);
    EXPECT_THROW(KrausSet({pauli::X(), Matrix::identity(4)}), InvalidDimension);
}

TEST(KrausProperty, CompletenessForRandomP) {
    std::mt19937_64 rng(5);
    for (auto kind : kKinds) {
        for (int trial = 0; trial < 100; ++trial) {
            const double p = uniform(rng, 0, 1);
            EXPECT_LE(kraus_single(kind, p).completeness_error(), 1e-12);
            EXPECT_LE(kraus_two(kind, p).completeness_error(), 1e-12);
        }
    }
}

TEST(KrausTwo, IdentityChannelValues) {
    for (auto [kind, p] : {std::pair{NoiseKind::PhaseFlip, 1.0}, std::pair{NoiseKind::BitFlip, 1.0},
                           std::pair{NoiseKind::AmplitudeDamping, 0.0}}) {
        const auto k = kraus_two(kind, p);
        ASSERT_EQ(k.ops().size(), 4u);
        int identities = 0;
        for (const auto& op : k.ops()) {
            if (op == Matrix::identity(4)) ++identities;
            else EXPECT_EQ(op.max_abs(), 0.0);
        }
        EXPECT_EQ(identities, 1);
    }
}

TEST(KrausTwo, BitFlipOnDoubleExcitedState) {
    const auto start = DensityMatrix::pure(Vector::basis(4, 0));
    // no-flip weight 0.9
    const auto a = apply_channel(kraus_two(NoiseKind::BitFlip, 0.9), start);
    const Diagonal4 da = diagonal_of(a.mat());
    const Diagonal4 ea{0.81, 0.09, 0.09, 0.01};
    // no-flip weight 0.1
    const auto b = apply_channel(kraus_two(NoiseKind::BitFlip, 0.1), start);
    const Diagonal4 db = diagonal_of(b.mat());
    const Diagonal4 eb{0.01, 0.09, 0.09, 0.81};
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_NEAR(da[i], ea[i], 1e-15);
        EXPECT_NEAR(db[i], eb[i], 1e-15);
    }
    EXPECT_LE(max_abs_diff(a.mat(), Matrix::diagonal({0.81, 0.09, 0.09, 0.01})), 1e-15);
}

TEST(ApplyChannel, IdentityChannelLeavesStateUnchanged) {
    std::mt19937_64 rng(9);
    const auto rho = random_density(rng, 4);
    EXPECT_LE(max_abs_diff(apply_channel(kraus_two(NoiseKind::AmplitudeDamping, 0.0), rho).mat(), rho.mat()),
              1e-15);
}

TEST(ApplyChannel, FullDampingReachesGround) {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 20; ++trial) {
        const auto rho = random_density(rng, 2);
        EXPECT_LE(max_abs_diff(apply_channel(kraus_single(NoiseKind::AmplitudeDamping, 1.0), rho).mat(),
                               Matrix::diagonal({0, 1})),
                  1e-15);
    }
}

TEST(ApplyChannel, PhaseFlipScalesCoherence) {
    const double p = 0.3;
    const auto rho = charged_state_single(at_omega_t(0.4));
    const auto out = apply_channel(kraus_single(NoiseKind::PhaseFlip, p), rho);
    EXPECT_LE(std::abs(out(0, 1) - (2 * p - 1) * rho(0, 1)), 1e-15);
    EXPECT_LE(std::abs(out(0, 0) - rho(0, 0)), 1e-15);
    const auto out2 = apply_channel_n(kraus_single(NoiseKind::PhaseFlip, p), rho, 2);
    EXPECT_LE(std::abs(out2(0, 1) - (2 * p - 1) * (2 * p - 1) * rho(0, 1)), 1e-15);
}

TEST(ApplyChannel, DimensionMismatch) {
    EXPECT_THROW(apply_channel(kraus_two(NoiseKind::BitFlip, 0.5), charged_state_single(at_omega_t(0.3))),
                 InvalidDimension);
}

TEST(ApplyChannelN, ZeroStepsIsIdentity) {
    std::mt19937_64 rng(12);
    const auto rho = random_density(rng, 4);
    EXPECT_EQ(apply_channel_n(kraus_two(NoiseKind::BitFlip, 0.2), rho, 0).mat(), rho.mat());
    EXPECT_THROW(apply_channel_n(kraus_two(NoiseKind::BitFlip, 0.2), rho, -1), InvalidParameter);
}

TEST(ApplyChannelN, TwoQubitDampingFunnelsIntoDoubleGround) {
    const auto rho = charged_state_two(ref_params(2.5), 0.6);
    const auto out = apply_channel_n(kraus_two(NoiseKind::AmplitudeDamping, 0.1), rho, 200);
    const Diagonal4 d = diagonal_of(out.mat());
    EXPECT_NEAR(d[0], 0.0, 1e-8);
    EXPECT_NEAR(d[1], 0.0, 1e-8);
    EXPECT_NEAR(d[2], 0.0, 1e-8);
    EXPECT_NEAR(d[3], 1.0, 1e-8);
}

TEST(ChannelProperty, TraceHermiticityPositivity) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 300; ++trial) {
        const auto kind = kKinds[static_cast<std::size_t>(trial % 3)];
        const int dim = (trial / 3) % 2 == 0 ? 2 : 4;
        const double p = uniform(rng, 0, 1);
        const auto rho = random_density(rng, dim);
        const auto k = dim == 2 ? kraus_single(kind, p) : kraus_two(kind, p);
        const Matrix out = detail::apply_unchecked(k, rho.mat());
        EXPECT_LE(std::abs(out.trace() - 1.0), 1e-12);
        EXPECT_TRUE(out.is_hermitian(1e-12));
        EXPECT_GE(eig_hermitian(0.5 * (out + out.adjoint())).values.front(), -1e-10);
    }
}

TEST(ClosedStatePf, Cases) {
    const auto s = at_omega_t(0.7);
    EXPECT_LE(max_abs_diff(closed_state_pf(s, {NoiseKind::PhaseFlip, 0.3, 0}).mat(),
                           charged_state_single(s).mat()),
              1e-15);
    const double sn = std::sin(0.7), cs = std::cos(0.7);
    EXPECT_LE(max_abs_diff(closed_state_pf(s, {NoiseKind::PhaseFlip, 0.5, 1}).mat(),
                           Matrix::diagonal({sn * sn, cs * cs})),
              1e-15);
    EXPECT_THROW(closed_state_pf(s, {NoiseKind::BitFlip, 0.5, 1}), InvalidParameter);
}

TEST(ClosedStateBf, OneStepFullInversion) {
    const auto rho = closed_state_bf(at_omega_t(kPi / 2), {NoiseKind::BitFlip, 0.9, 1});
    EXPECT_NEAR(rho(0, 0).real(), 0.9, 1e-15);
    EXPECT_NEAR(rho(1, 1).real(), 0.1, 1e-15);
}

TEST(ClosedStateBf, HalfProbabilityIsMaximallyMixed) {
    for (int n : {1, 2, 7}) {
        const auto rho = closed_state_bf(at_omega_t(0.9), {NoiseKind::BitFlip, 0.5, n});
        EXPECT_LE(max_abs_diff(rho.mat(), Matrix::diagonal({0.5, 0.5})), 1e-15);
    }
    EXPECT_THROW(closed_state_bf(at_omega_t(0.9), {NoiseKind::AmplitudeDamping, 0.5, 1}),
                 InvalidParameter);
}

TEST(ClosedStateBf, BinomialSumsAndLimits) {
    for (int n = 0; n < 40; ++n) {
        const auto lim = binomial_limits(n);
        EXPECT_EQ(lim.s1 + lim.s2, n);
        for (double p : {0.0, 0.1, 0.5, 0.77, 1.0}) {
            const auto w = binomial_parity_sums(n, p);
            EXPECT_NEAR(w.even + w.odd, 1.0, 1e-13);
            EXPECT_NEAR(w.even - w.odd, std::pow(2 * p - 1, n), 1e-13);
        }
    }
    // large n goes through the logarithmic recurrence without underflow
    const auto w = binomial_parity_sums(800, 0.1);
    EXPECT_NEAR(w.even, 0.5 * (1 + std::pow(-0.8, 800)), 1e-12);
    EXPECT_NEAR(w.odd, 0.5 * (1 - std::pow(-0.8, 800)), 1e-12);
}

TEST(ClosedStateAd, Cases) {
    const auto s = at_omega_t(1.1);
    EXPECT_LE(max_abs_diff(closed_state_ad(s, {NoiseKind::AmplitudeDamping, 0.2, 0}).mat(),
                           charged_state_single(s).mat()),
              1e-15);
    EXPECT_LE(max_abs_diff(closed_state_ad(s, {NoiseKind::AmplitudeDamping, 1.0, 1}).mat(),
                           Matrix::diagonal({0, 1})),
              1e-15);
}

TEST(ClosedFormProperty, StatesMatchKrausIterationAndRecursions) {
    std::mt19937_64 rng(2718);
    for (auto kind : kKinds) {
        for (int trial = 0; trial < 500; ++trial) {
            const double p = uniform(rng, 0, 1);
            const double wt = uniform(rng, 0, 2 * kPi);
            const int n = static_cast<int>(rng() % 21);
            const auto s = at_omega_t(wt);
            const NoiseParams np{kind, p, n};
            const Matrix closed = closed_state(s, np).mat();
            const Matrix brute = apply_channel_n(kraus_single(kind, p), charged_state_single(s), n).mat();
            EXPECT_LE(max_abs_diff(closed, brute), 1e-12) << to_string(kind) << " p=" << p << " n=" << n;
            EXPECT_LE(max_abs_diff(closed, recursion_state_single(kind, p, wt, n)), 1e-12);
        }
    }
}

TEST(DiagRecursion, OneDampingStep) {
    const auto d = diag_recursion_two(NoiseKind::AmplitudeDamping, 0.1, {1, 0, 0, 0}, 1);
    EXPECT_NEAR(d[0], 0.81, 1e-15);
    EXPECT_NEAR(d[1], 0.09, 1e-15);
    EXPECT_NEAR(d[2], 0.09, 1e-15);
    EXPECT_NEAR(d[3], 0.01, 1e-15);
}

TEST(DiagRecursion, Limits) {
    const Diagonal4 start{0.1, 0.2, 0.3, 0.4};
    const auto ad = diag_recursion_two(NoiseKind::AmplitudeDamping, 0.1, start, 1000);
    const auto bf = diag_recursion_two(NoiseKind::BitFlip, 0.1, start, 1000);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_NEAR(ad[i], i == 3 ? 1.0 : 0.0, 1e-12);
        EXPECT_NEAR(bf[i], 0.25, 1e-12);
    }
}

TEST(DiagRecursion, Errors) {
    EXPECT_THROW(diag_recursion_two(NoiseKind::PhaseFlip, 0.1, {1, 0, 0, 0}, 1), InvalidParameter);
    EXPECT_THROW(diag_recursion_two(NoiseKind::BitFlip, 0.1, {1, 1, 0, 0}, 1), InvalidParameter);
}

TEST(DiagRecursionProperty, MatchesFullChannelEveryStep) {
    std::mt19937_64 rng(77);
    for (auto kind : {NoiseKind::AmplitudeDamping, NoiseKind::BitFlip}) {
        for (int trial = 0; trial < 20; ++trial) {
            const double p = uniform(rng, 0, 1);
            const auto rho = random_density(rng, 4);
            const auto traj = channel_trajectory(kraus_two(kind, p), rho, 50);
            Diagonal4 d = diagonal_of(rho.mat());
            for (std::size_t step = 1; step < traj.size(); ++step) {
                d = diag_recursion_step(kind, p, d);
                const auto full = diagonal_of(traj[step]);
                for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(d[i], full[i], 1e-12);
                EXPECT_NEAR(d[0] + d[1] + d[2] + d[3], 1.0, 1e-12);
            }
        }
    }
}

TEST(AsymptoticStateBf, R3Coherence) {
    const auto p = ref_params(2.5);
    EXPECT_NEAR(bf_asymptotic_coherence(p), -0.1 / (4 * std::sqrt(6.26)), 1e-15);
    EXPECT_NEAR(bf_asymptotic_coherence(p), -0.009992009587217793, 1e-12);
    const auto brute = apply_channel_n(kraus_two(NoiseKind::BitFlip, 0.1), charged_state_two(p, 0.8), 500);
    EXPECT_LE(max_abs_diff(brute.mat(), asymptotic_state_bf(p).mat()), 1e-10);
}

TEST(AsymptoticStateBf, NoRealCoherenceGivesMaximallyMixed) {
    // J = 0 with D > d_c: c2 = -i sign(D)
    const XYZDMParams p{1.0, 0.0, 0.5, 0.2, 2.0, 1.0};
    EXPECT_LE(max_abs_diff(asymptotic_state_bf(p).mat(), Matrix::diagonal({0.25, 0.25, 0.25, 0.25})), 1e-17);
}

TEST(AsymptoticStateBfProperty, BoundedCoherence) {
    std::mt19937_64 rng(81);
    for (int trial = 0; trial < 500; ++trial) {
        const XYZDMParams p{1.0, uniform(rng, -3, 3), uniform(rng, 0, 3), uniform(rng, -3, 3),
                            uniform(rng, -3, 3), 1.0};
        EXPECT_LE(std::abs(bf_asymptotic_coherence(p)), 0.25);
        EXPECT_NO_THROW(asymptotic_state_bf(p));
    }
}

TEST(TwoQubitAsymptotics, DampingApproachesDoubleGroundMonotonically) {
    const auto p = ref_params(1.2);
    const auto target = projector(Vector::basis(4, 3));
    const auto traj = channel_trajectory(kraus_two(NoiseKind::AmplitudeDamping, 0.1), charged_state_two(p, 0.5), 500);
    for (std::size_t n = 20; n + 1 < traj.size(); ++n) {
        EXPECT_LE(max_abs_diff(traj[n + 1], target), max_abs_diff(traj[n], target) + 1e-16);
    }
    EXPECT_LT(max_abs_diff(traj.back(), target), 1e-6);
}

TEST(TwoQubitAsymptotics, BitFlipApproachesXState) {
    for (double D : {0.3, 1.2, 2.5}) {
        const auto p = ref_params(D);
        const auto out = apply_channel_n(kraus_two(NoiseKind::BitFlip, 0.1), charged_state_two(p, 1.3), 500);
        const double zeta = bf_asymptotic_coherence(p);
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                const double expected = i == j ? 0.25 : (i + j == 3 ? zeta : 0.0);
                EXPECT_NEAR(std::abs(out(i, j) - expected), 0.0, 1e-8);
            }
        }
    }
}

TEST(FixedPoint, DetectsConvergenceAndCap) {
    const auto rho = charged_state_two(ref_params(2.5), 0.3);
    const auto fp = iterate_to_fixed_point(kraus_two(NoiseKind::AmplitudeDamping, 0.1), rho);
    EXPECT_TRUE(fp.converged);
    EXPECT_LT(fp.steps, 1000);
    EXPECT_LE(max_abs_diff(fp.state.mat(), projector(Vector::basis(4, 3))), 1e-10);
    // p = 0 phase flip flips coherence sign forever
    const auto single = charged_state_single(at_omega_t(0.4));
    const auto stuck = iterate_to_fixed_point(kraus_single(NoiseKind::PhaseFlip, 0.0), single, 1e-12, 50);
    EXPECT_FALSE(stuck.converged);
    EXPECT_EQ(stuck.steps, 50);
}
