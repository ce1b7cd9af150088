// Seeded randomized cross-checks behind `qbattery verify`

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qbattery/channels.hpp"
#include "qbattery/ergotropy.hpp"
#include "qbattery/models.hpp"

namespace qbattery {

struct SuiteResult {
    std::string name;
    std::uint64_t passed{0};
    std::uint64_t failed{0};
    std::string first_failure;  // empty when every draw passed
};

struct VerifyReport {
    std::vector<SuiteResult> suites;

    bool ok() const {
        for (const auto& s : suites)
            if (s.failed) return false;
        return true;
    }
};

namespace detail {
inline constexpr double kTwoPi = 6.283185307179586;

class Draws {
public:
    explicit Draws(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    std::int64_t integer(std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
    }
    NoiseKind kind() { return static_cast<NoiseKind>(integer(0, 2)); }
    int dim() { return integer(0, 1) ? 4 : 2; }

    Matrix matrix(int dim) {
        std::normal_distribution<double> g(0.0, 1.0);
        Matrix m(dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) m(i, j) = Complex(g(rng_), g(rng_));
        return m;
    }

    DensityMatrix density(int dim) {
        const Matrix g = matrix(dim);
        Matrix m = g * g.adjoint();
        m = (1.0 / m.trace().real()) * m;
        return DensityMatrix(0.5 * (m + m.adjoint()));
    }

    XYZDMParams model() {
        return XYZDMParams{uniform(0.5, 2.0), uniform(-2, 2), uniform(0, 2),
                           uniform(-2, 2),    uniform(-3, 3), uniform(0.5, 3)};
    }

private:
    std::mt19937_64 rng_;
};

// Each check returns an empty string on success, else a short description.
using Check = std::function<std::string(Draws&)>;

inline std::string describe(const char* what, double err, double tol) {
    return std::string(what) + ": error " + std::to_string(err) + " > " + std::to_string(tol);
}

inline SuiteResult run_suite(const std::string& name, std::uint64_t seed, std::uint64_t draws, const Check& check) {
    SuiteResult res{name, 0, 0, {}};
    Draws d(seed);
    for (std::uint64_t i = 0; i < draws; ++i) {
        std::string failure;
        try {
            failure = check(d);
        } catch (const std::exception& e) {
            failure = std::string("exception: ") + e.what();
        }
        if (failure.empty()) {
            ++res.passed;
        } else {
            if (!res.failed) res.first_failure = "draw " + std::to_string(i) + ": " + failure;
            ++res.failed;
        }
    }
    return res;
}

inline KrausSet random_channel(Draws& d, int dim) {
    const auto kind = d.kind();
    const double p = d.uniform(0, 1);
    return dim == 2 ? kraus_single(kind, p) : kraus_two(kind, p);
}
}  // namespace detail

inline VerifyReport run_verify(std::uint64_t draws, std::uint64_t seed) {
    using detail::Draws;
    using detail::describe;
    struct Named {
        const char* name;
        detail::Check check;
    };
    const std::vector<Named> suites{
        {"kraus_completeness",
         [](Draws& d) {
             const auto k = detail::random_channel(d, d.dim());
             const double err = k.completeness_error();
             return err <= tol::kEquality ? std::string{} : describe("completeness", err, tol::kEquality);
         }},
        {"trace_preservation",
         [](Draws& d) {
             const int dim = d.dim();
             const auto k = detail::random_channel(d, dim);
             const Matrix out = detail::apply_unchecked(k, d.density(dim).mat());
             const double err = std::abs(out.trace() - 1.0);
             return err <= tol::kEquality ? std::string{} : describe("trace", err, tol::kEquality);
         }},
        {"positivity",
         [](Draws& d) {
             const int dim = d.dim();
             const auto k = detail::random_channel(d, dim);
             const Matrix out = detail::apply_unchecked(k, d.density(dim).mat());
             const double lo = eig_hermitian(out).values.front();
             return lo >= tol::kNegativeEigenvalue ? std::string{} : describe("min eigenvalue", -lo, 1e-10);
         }},
        {"charging_unitarity",
         [](Draws& d) {
             const auto p = d.model();
             const Matrix u = charging_unitary_two(p, d.uniform(0, 5));
             const double err = max_abs_diff(u.adjoint() * u, Matrix::identity(4));
             return err <= tol::kEquality ? std::string{} : describe("U^dagger U - I", err, tol::kEquality);
         }},
        {"eigensystem",
         [](Draws& d) {
             const auto p = d.model();
             const Matrix h = two_qubit_hamiltonian(p);
             auto analytic = analytic_eigenvalues(p);
             std::sort(analytic.begin(), analytic.end());
             const auto es = eig_hermitian(h);
             for (std::size_t k = 0; k < 4; ++k) {
                 const double err = std::abs(es.values[k] - analytic[k]);
                 if (err > tol::kValidation) return describe("eigenvalue", err, tol::kValidation);
             }
             const auto vecs = analytic_eigenvectors(p);
             const auto vals = analytic_eigenvalues(p);
             for (std::size_t k = 0; k < 4; ++k) {
                 const Vector hv = h * vecs[k];
                 for (int i = 0; i < 4; ++i) {
                     const double err = std::abs(hv[i] - vals[k] * vecs[k][i]);
                     if (err > tol::kValidation) return describe("H v - e v", err, tol::kValidation);
                 }
             }
             return std::string{};
         }},
        {"closed_form_states",
         [](Draws& d) {
             const NoiseParams np{d.kind(), d.uniform(0, 1), d.integer(0, 20)};
             const auto s = at_omega_t(d.uniform(0, detail::kTwoPi));
             const auto brute = apply_channel_n(kraus_single(np.kind, np.p), charged_state_single(s), np.n);
             const double err = max_abs_diff(closed_state(s, np).mat(), brute.mat());
             return err <= tol::kEquality ? std::string{} : describe(to_string(np.kind), err, tol::kEquality);
         }},
        {"closed_form_ergotropy",
         [](Draws& d) {
             const NoiseParams np{d.kind(), d.uniform(0, 1), d.integer(0, 20)};
             const auto s = at_omega_t(d.uniform(0, detail::kTwoPi));
             const auto brute = apply_channel_n(kraus_single(np.kind, np.p), charged_state_single(s), np.n);
             const double err = std::abs(ergotropy_closed(s, np) - ergotropy_spectral(single_qubit_hamiltonian(s), brute));
             return err <= tol::kValidation ? std::string{} : describe(to_string(np.kind), err, tol::kValidation);
         }},
        {"two_qubit_closed_form",
         [](Draws& d) {
             const auto p = d.model();
             const double t = d.uniform(0, 3);
             const double err = std::abs(ergotropy_two_closed(p, t) - stored_energy_two(p, t));
             return err <= tol::kValidation ? std::string{} : describe("ergotropy", err, tol::kValidation);
         }},
        {"diagonal_recursion",
         [](Draws& d) {
             const auto p = d.model();
             const auto kind = d.integer(0, 1) ? NoiseKind::BitFlip : NoiseKind::AmplitudeDamping;
             const double prob = d.uniform(0, 1);
             const auto n = d.integer(0, 20);
             const auto rho0 = charged_state_two(p, d.uniform(0, 3));
             const auto rec = diag_recursion_two(kind, prob, diagonal_of(rho0.mat()), n);
             const auto full = diagonal_of(apply_channel_n(kraus_two(kind, prob), rho0, n).mat());
             for (std::size_t i = 0; i < 4; ++i) {
                 const double err = std::abs(rec[i] - full[i]);
                 if (err > tol::kEquality) return describe("diagonal", err, tol::kEquality);
             }
             return std::string{};
         }},
        {"bf_asymptotic_ergotropy",
         [](Draws& d) {
             const auto p = d.model();
             const double oracle = ergotropy_spectral(two_qubit_hamiltonian(p), asymptotic_state_bf(p));
             const double err = std::abs(asymptotic_ergotropy_bf(p) - oracle);
             return err <= 1e-9 ? std::string{} : describe("ergotropy", err, 1e-9);
         }},
    };

    VerifyReport report;
    for (std::size_t i = 0; i < suites.size(); ++i) {
        // one independent stream per suite, so suites can be added without
        // changing the draws of the others
        report.suites.push_back(detail::run_suite(suites[i].name, seed + 0x9e3779b97f4a7c15ULL * (i + 1), draws,
                                                  suites[i].check));
    }
    return report;
}

}  // namespace qbattery
