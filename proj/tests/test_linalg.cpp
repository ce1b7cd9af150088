#include <gtest/gtest.h>

#include <random>

#include "qbattery/linalg.hpp"
#include "qbattery/models.hpp"
#include "test_support.hpp"

using namespace qbattery;
using namespace qbattery::testing;

TEST(Tensor, IdentityTimesIdentity) {
    EXPECT_EQ(tensor(pauli::I(), pauli::I()), Matrix::identity(4));
}

TEST(Tensor, ZTimesIdentityFollowsBlockConvention) {
    EXPECT_EQ(tensor(pauli::Z(), pauli::I()), Matrix::diagonal({1, 1, -1, -1}));
}

TEST(Tensor, XTimesXIsAntiDiagonal) {
    const Matrix xx = tensor(pauli::X(), pauli::X());
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) EXPECT_EQ(xx(i, j), Complex(i + j == 3 ? 1.0 : 0.0));
}

TEST(Tensor, RejectsNonQubitFactors) {
    EXPECT_THROW(tensor(Matrix::identity(4), pauli::I()), InvalidDimension);
    EXPECT_THROW(tensor(pauli::I(), Matrix::identity(4)), InvalidDimension);
}

TEST(Tensor, Bilinear) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix a = random_matrix(rng, 2);
        const Matrix b = random_matrix(rng, 2);
        const Complex alpha(uniform(rng, -2, 2), uniform(rng, -2, 2));
        EXPECT_LE(max_abs_diff(tensor(alpha * a, b), alpha * tensor(a, b)), 1e-12);
        EXPECT_LE(max_abs_diff(tensor(a, alpha * b), alpha * tensor(a, b)), 1e-12);
    }
}

TEST(Matrix, UnsupportedDimensions) {
    EXPECT_THROW(Matrix(3), InvalidDimension);
    EXPECT_THROW(Vector(1), InvalidDimension);
    EXPECT_THROW(Matrix::identity(2) * Matrix::identity(4), InvalidDimension);
}

TEST(EigHermitian, DiagonalProjector) {
    const auto es = eig_hermitian(Matrix::diagonal({1, 0}));
    ASSERT_EQ(es.values.size(), 2u);
    EXPECT_DOUBLE_EQ(es.values[0], 0.0);
    EXPECT_DOUBLE_EQ(es.values[1], 1.0);
    EXPECT_TRUE(same_ray(es.vectors[0], Vector::basis(2, 1), 1e-14));
    EXPECT_TRUE(same_ray(es.vectors[1], Vector::basis(2, 0), 1e-14));
}

TEST(EigHermitian, PauliX) {
    const auto es = eig_hermitian(pauli::X());
    EXPECT_NEAR(es.values[0], -1.0, 1e-14);
    EXPECT_NEAR(es.values[1], 1.0, 1e-14);
    const double r = 1.0 / std::sqrt(2.0);
    EXPECT_TRUE(same_ray(es.vectors[0], Vector{r, -r}, 1e-12));
    EXPECT_TRUE(same_ray(es.vectors[1], Vector{r, r}, 1e-12));
    // first nonzero component is real and positive
    EXPECT_GT(es.vectors[0][0].real(), 0.0);
    EXPECT_EQ(es.vectors[0][0].imag(), 0.0);
}

TEST(EigHermitian, PauliYPhaseConvention) {
    const auto es = eig_hermitian(pauli::Y());
    for (const auto& v : es.vectors) {
        EXPECT_GT(v[0].real(), 0.0);
        EXPECT_EQ(v[0].imag(), 0.0);
    }
}

TEST(EigHermitian, MatchesAnalyticSpectrumAtReferencePoint) {
    const auto p = ref_params(2.5);
    const auto es = eig_hermitian(two_qubit_hamiltonian(p));
    const auto an = analytic_eigensystem(p);
    EXPECT_NEAR(es.values[0], an.e2, 1e-10);
    EXPECT_NEAR(es.values[1], an.e4, 1e-10);
    EXPECT_NEAR(es.values[2], an.e3, 1e-10);
    EXPECT_NEAR(es.values[3], an.e1, 1e-10);
    // values from an independent numpy eigvalsh run
    EXPECT_NEAR(es.values[0], -1.7519992006393508, 1e-10);
    EXPECT_NEAR(es.values[3], 3.2519992006393508, 1e-10);
}

TEST(EigHermitian, RejectsNonHermitian) {
    EXPECT_THROW(eig_hermitian(Matrix{0.0, 1.0, 0.0, 0.0}), ContractViolation);
}

TEST(EigHermitianProperty, ReconstructionAndOrthonormality) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 500; ++trial) {
        const int dim = trial % 2 == 0 ? 2 : 4;
        const Matrix a = random_hermitian(rng, dim);
        const auto es = eig_hermitian(a);
        EXPECT_LE(max_abs_diff(es.reconstruct(), a), 1e-10);
        for (int i = 0; i < dim; ++i) {
            for (int j = 0; j < dim; ++j) {
                const Complex ip = inner(es.vectors[static_cast<std::size_t>(i)],
                                         es.vectors[static_cast<std::size_t>(j)]);
                EXPECT_LE(std::abs(ip - Complex(i == j ? 1.0 : 0.0)), 1e-10);
            }
        }
        EXPECT_TRUE(std::is_sorted(es.values.begin(), es.values.end()));
    }
}

TEST(EigHermitianProperty, DegenerateSubspacesReconstruct) {
    // U diag(l, l, m, m) U^dagger: any basis of each degenerate block works.
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const Matrix u = random_unitary(rng, 4);
        const Matrix a = u * Matrix::diagonal({-0.5, -0.5, 1.5, 1.5}) * u.adjoint();
        const auto es = eig_hermitian(0.5 * (a + a.adjoint()));
        EXPECT_LE(max_abs_diff(es.reconstruct(), a), 1e-10);
        EXPECT_NEAR(es.values[0], -0.5, 1e-10);
        EXPECT_NEAR(es.values[3], 1.5, 1e-10);
        // swapping the two degenerate vectors changes nothing
        auto swapped = es;
        std::swap(swapped.vectors[0], swapped.vectors[1]);
        EXPECT_LE(max_abs_diff(swapped.reconstruct(), es.reconstruct()), 1e-10);
    }
}

TEST(TraceProduct, IdentityGivesOne) {
    std::mt19937_64 rng(3);
    for (int dim : {2, 4}) {
        const auto rho = random_density(rng, dim);
        EXPECT_NEAR(trace_product(Matrix::identity(dim), rho), 1.0, 1e-12);
    }
}

TEST(TraceProduct, ZOnExcitedState) {
    EXPECT_DOUBLE_EQ(trace_product(pauli::Z(), DensityMatrix::pure(Vector::basis(2, 0))), 1.0);
}

TEST(TraceProduct, FullyInvertedChargedState) {
    const auto rho = charged_state_single(at_omega_t(kPi / 2));
    EXPECT_NEAR(trace_product(Matrix::diagonal({1, 0}), rho), 1.0, 1e-15);
}

TEST(TraceProduct, DimensionMismatch) {
    EXPECT_THROW(trace_product(Matrix::identity(4), DensityMatrix::pure(Vector::basis(2, 0))),
                 InvalidDimension);
}

TEST(TraceProductProperty, RealForHermitianOperators) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const int dim = trial % 2 == 0 ? 2 : 4;
        const Matrix h = random_hermitian(rng, dim);
        const auto rho = random_density(rng, dim);
        EXPECT_LE(std::abs((h * rho.mat()).trace().imag()), 1e-12);
        EXPECT_NO_THROW(trace_product(h, rho));
    }
}

TEST(DensityMatrix, RejectsInvalidStates) {
    EXPECT_THROW(DensityMatrix(Matrix::diagonal({0.7, 0.7})), ContractViolation);      // trace
    EXPECT_THROW(DensityMatrix(Matrix::diagonal({1.5, -0.5})), ContractViolation);     // PSD
    EXPECT_THROW(DensityMatrix(Matrix{0.5, 0.5, 0.0, 0.5}), ContractViolation);        // Hermitian
    EXPECT_NO_THROW(DensityMatrix(Matrix::diagonal({0.5, 0.5})));
}
