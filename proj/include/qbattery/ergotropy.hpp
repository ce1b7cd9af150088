// Extractable work, spectral and closed-form
//
// ergotropy_spectral() is the reference: pair the descending populations of
// rho with the ascending levels of H and subtract the passive energy. Every
// closed form below is checked against it in the tests.

#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "qbattery/channels.hpp"
#include "qbattery/errors.hpp"
#include "qbattery/linalg.hpp"
#include "qbattery/models.hpp"

namespace qbattery {

// Number of results in [-1e-10, 0) that were clamped to 0.
inline std::atomic<std::uint64_t>& negative_clamp_count() {
    static std::atomic<std::uint64_t> count{0};
    return count;
}

namespace detail {
inline double clamp_nonnegative(double xi, const char* where) {
    if (xi >= 0.0) return xi;
    if (xi >= tol::kNegativeEigenvalue) {
        negative_clamp_count().fetch_add(1, std::memory_order_relaxed);
        return 0.0;
    }
    throw ContractViolation(std::string(where) + ": negative ergotropy " + std::to_string(xi));
}
}  // namespace detail

struct PassiveDecomposition {
    std::vector<double> rho_eigs;  // descending
    std::vector<double> h_eigs;    // ascending
    DensityMatrix passive;
};

inline PassiveDecomposition passive_decomposition(const Matrix& h, const DensityMatrix& rho) {
    if (h.dim() != rho.dim()) throw InvalidDimension("passive_decomposition: dimension mismatch");
    const auto he = eig_hermitian(h);
    auto r = eig_hermitian(rho.mat()).values;
    std::stable_sort(r.begin(), r.end(), std::greater<>());
    Matrix passive(h.dim());
    for (std::size_t n = 0; n < r.size(); ++n) passive += r[n] * projector(he.vectors[n]);
    return {r, he.values, DensityMatrix(passive)};
}

// Tr[H (rho - rho_passive)]
inline double ergotropy_spectral(const Matrix& h, const DensityMatrix& rho) {
    if (h.dim() != rho.dim()) throw InvalidDimension("ergotropy_spectral: dimension mismatch");
    const auto e = eig_hermitian(h).values;
    auto r = eig_hermitian(rho.mat()).values;
    std::stable_sort(r.begin(), r.end(), std::greater<>());
    double passive_energy = 0.0;
    for (std::size_t n = 0; n < r.size(); ++n) passive_energy += r[n] * e[n];
    return detail::clamp_nonnegative(trace_product(h, rho) - passive_energy, "ergotropy_spectral");
}

// ------------------------------------------------------------ single qubit
// H = diag(1, 0) throughout this block.

// (rho00 - rho11 + sqrt((rho00 - rho11)^2 + 4 rho01 rho10)) / 2
inline double ergotropy_single_formula(const DensityMatrix& rho) {
    if (rho.dim() != 2) throw InvalidDimension("ergotropy_single_formula: expected a qubit state");
    const double z = (rho(0, 0) - rho(1, 1)).real();
    const double coh = 4.0 * (rho(0, 1) * rho(1, 0)).real();
    return detail::clamp_nonnegative(0.5 * (z + std::sqrt(z * z + coh)), "ergotropy_single_formula");
}

// Same quantity from <sigma_z>, <sigma_+>, <sigma_->.
inline double ergotropy_single_pauli(const DensityMatrix& rho) {
    if (rho.dim() != 2) throw InvalidDimension("ergotropy_single_pauli: expected a qubit state");
    const Complex sz = (rho.mat() * pauli::Z()).trace();
    const Complex sp = (rho.mat() * pauli::raising()).trace();
    const Complex sm = (rho.mat() * pauli::lowering()).trace();
    const double z = sz.real();
    return detail::clamp_nonnegative(0.5 * (z + std::sqrt(z * z + 4.0 * (sp * sm).real())),
                                     "ergotropy_single_pauli");
}

// (x + sqrt(x^2 + y)) / 2 for y >= 0 without cancellation when x < 0.
inline double half_plus_root(double x, double y) {
    const double root = std::sqrt(x * x + y);
    if (x >= 0.0) return 0.5 * (x + root);
    return root - x == 0.0 ? 0.0 : 0.5 * y / (root - x);
}

inline double ergotropy_pf_closed(const SingleQubitParams& s, const NoiseParams& np) {
    detail::require_kind(np, NoiseKind::PhaseFlip, "ergotropy_pf_closed");
    s.validate();
    const double c2 = std::cos(2.0 * s.omega_t());
    const double s2 = std::sin(2.0 * s.omega_t());
    const double q2 = std::pow(2.0 * np.p - 1.0, 2.0 * static_cast<double>(np.n));
    return half_plus_root(-c2, q2 * s2 * s2);
}

// N -> infinity limit of the phase-flip ergotropy.
inline double ergotropy_pf_asymptotic(double omega_t) {
    const double c2 = std::cos(2.0 * omega_t);
    return c2 > 0.0 ? 0.0 : -c2;
}

inline double ergotropy_bf_closed(const SingleQubitParams& s, const NoiseParams& np) {
    detail::require_kind(np, NoiseKind::BitFlip, "ergotropy_bf_closed");
    s.validate();
    const double c2 = std::cos(2.0 * s.omega_t());
    const double q = std::pow(2.0 * np.p - 1.0, static_cast<double>(np.n));
    if (np.p > 0.5) return -0.5 * q * (c2 - 1.0);
    if (np.p == 0.5) return 0.0;
    const double sign = (np.n % 2 == 0) ? -1.0 : 1.0;  // (-1)^(N+1)
    return -0.5 * q * (c2 + sign);
}

// Gamma_N = (1-p)^N sin^2 - (cos^2 + sum_{j<N} p (1-p)^j sin^2); the
// geometric sum is 1 - (1-p)^N.
inline double ad_gamma_n(const SingleQubitParams& s, const NoiseParams& np) {
    const double sn = std::sin(s.omega_t());
    const double cs = std::cos(s.omega_t());
    const double survive = std::pow(1.0 - np.p, static_cast<double>(np.n));
    return survive * sn * sn - (cs * cs + (1.0 - survive) * sn * sn);
}

inline double ergotropy_ad_closed(const SingleQubitParams& s, const NoiseParams& np) {
    detail::require_kind(np, NoiseKind::AmplitudeDamping, "ergotropy_ad_closed");
    s.validate();
    const double s2 = std::sin(2.0 * s.omega_t());
    const double survive = std::pow(1.0 - np.p, static_cast<double>(np.n));
    return half_plus_root(ad_gamma_n(s, np), survive * s2 * s2);
}

inline double ergotropy_closed(const SingleQubitParams& s, const NoiseParams& np) {
    switch (np.kind) {
        case NoiseKind::PhaseFlip: return ergotropy_pf_closed(s, np);
        case NoiseKind::BitFlip: return ergotropy_bf_closed(s, np);
        case NoiseKind::AmplitudeDamping: return ergotropy_ad_closed(s, np);
    }
    throw InvalidParameter("ergotropy_closed: unknown noise kind");
}

// --------------------------------------------------------------- two qubits

// Ground state is passive and the evolution unitary, so the stored energy
// is the ergotropy.
inline double stored_energy_two(const XYZDMParams& p, double t) {
    const Matrix H = two_qubit_hamiltonian(p);
    const auto rho0 = ground_state(p).rho;
    const auto rho_t = charged_state_two(p, t);
    return detail::clamp_nonnegative(trace_product(H, rho_t) - trace_product(H, rho0),
                                     "stored_energy_two");
}

struct ChargingAmplitudes {
    double a{1.0};        // cos 2wt
    Complex b{0.0, 0.0};  // -i sin 2wt
};

inline ChargingAmplitudes charging_amplitudes(double omega_t) {
    return {std::cos(2.0 * omega_t), -kI * std::sin(2.0 * omega_t)};
}

struct PhiCoefficients {
    double phi0{}, phi1{}, phi2{}, phi3{}, phi4{};
};

struct EtaCoefficients {
    double eta0{}, eta1{}, eta2{};
    Complex eta3{};
    double eta4{};
};

inline PhiCoefficients phi_coefficients(const XYZDMParams& p, double a, double b_abs2, double c4) {
    const double jg = p.J * p.gamma;
    PhiCoefficients f;
    f.phi0 = (a + 1) * (a + 1) * c4 * c4 + 2 * c4 * (a * a - 1) + (a - 1) * (a - 1);
    f.phi1 = (a * a - 1) * c4 * c4 + 2 * c4 * (a * a + 1) + a * a - 1;
    f.phi2 = b_abs2 * (c4 + 1) * (c4 + 1);
    f.phi3 = (a - 1) * (a - 1) * c4 * c4 + 2 * c4 * (a * a - 1) + (a + 1) * (a + 1);
    f.phi4 = 4 * c4 * c4 * (2 * p.h0 + 0.5 * p.Jz) + 8 * jg * c4 + 2 * p.Jz;
    return f;
}

inline EtaCoefficients eta_coefficients(const XYZDMParams& p, double a, double b_abs2, Complex c2) {
    const double m2 = std::norm(c2);
    const double re2 = 2.0 * c2.real();  // c2 + c2*
    EtaCoefficients g;
    g.eta0 = b_abs2 * (m2 + re2 + 1);
    g.eta1 = (a + 1) * (a + 1) * m2 + (a * a - 1) * re2 + (a - 1) * (a - 1);
    g.eta2 = (a - 1) * (a - 1) * m2 + (a * a - 1) * re2 + (a + 1) * (a + 1);
    g.eta3 = (a * a - 1) * m2 + (a - 1) * (a - 1) * std::conj(c2) + (a + 1) * (a + 1) * c2 + (a * a - 1.0);
    g.eta4 = 4 * (m2 + 1) * (p.h0 - 0.5 * p.Jz) + 8 * (c2 * Complex(p.J, -p.D)).real();
    return g;
}

// Ground state |e4> (|D| <= d_c); independent of D.
inline double ergotropy_r1_closed(const XYZDMParams& p, double t) {
    p.validate();
    if (ground_is_e2(p)) throw RegionMismatch("ergotropy_r1_closed: requires |D| <= d_c");
    const auto amp = charging_amplitudes(p.omega * t);
    const double c4 = ground_coefficient(p).real();
    const auto f = phi_coefficients(p, amp.a, std::norm(amp.b), c4);
    const double num = f.phi0 * (2 * p.h0 + 0.5 * p.Jz) + 2 * f.phi1 * p.J * p.gamma +
                       2 * f.phi2 * (p.h0 + p.J - 0.5 * p.Jz) + f.phi3 * 0.5 * p.Jz - f.phi4;
    return detail::clamp_nonnegative(num / (4 * (c4 * c4 + 1)), "ergotropy_r1_closed");
}

// Ground state |e2> (|D| > d_c).
inline double ergotropy_r23_closed(const XYZDMParams& p, double t) {
    p.validate();
    if (!ground_is_e2(p)) throw RegionMismatch("ergotropy_r23_closed: requires |D| > d_c");
    const auto amp = charging_amplitudes(p.omega * t);
    const Complex c2 = ground_coefficient(p);
    const auto g = eta_coefficients(p, amp.a, std::norm(amp.b), c2);
    const double num = g.eta0 * (2 * p.h0 + p.Jz + 2 * p.J * p.gamma) +
                       (g.eta1 + g.eta2) * (p.h0 - 0.5 * p.Jz) +
                       2 * (g.eta3 * Complex(p.J, -p.D)).real() - g.eta4;
    return detail::clamp_nonnegative(num / (4 * (1 + std::norm(c2))), "ergotropy_r23_closed");
}

inline double ergotropy_two_closed(const XYZDMParams& p, double t) {
    return ground_is_e2(p) ? ergotropy_r23_closed(p, t) : ergotropy_r1_closed(p, t);
}

// Repeated amplitude damping drives every state to |11><11|; its ergotropy
// is <11|H|11> - e2 = sqrt(D^2 + J^2) + Jz - h0 once |e2> is the ground state.
inline double asymptotic_ergotropy_ad(const XYZDMParams& p) {
    p.validate();
    if (!ground_is_e2(p)) return 0.0;
    return dm_radius(p) + p.Jz - p.h0;
}

struct BitFlipAsymptoticBranches {
    double zeta{};
    double level_combination{};  // L1 + L2 - L3 - L4, L ascending
    double minus_branch{};       // zeta [2J(gamma+1) - (L1+L2-L3-L4)]
    double plus_branch{};        // zeta [2J(gamma+1) + (L1+L2-L3-L4)]
};

inline BitFlipAsymptoticBranches asymptotic_bf_branches(const XYZDMParams& p) {
    auto levels = analytic_eigenvalues(p);
    std::sort(levels.begin(), levels.end());
    BitFlipAsymptoticBranches out;
    out.zeta = bf_asymptotic_coherence(p);
    out.level_combination = levels[0] + levels[1] - levels[2] - levels[3];
    const double coupling = 2.0 * p.J * (p.gamma + 1.0);
    out.minus_branch = out.zeta * (coupling - out.level_combination);
    out.plus_branch = out.zeta * (coupling + out.level_combination);
    return out;
}

// The larger X-state population (1/4 + |zeta|) sits on the lower pair of
// levels, which selects the minus branch for zeta > 0 and the plus branch
// for zeta < 0.
inline double asymptotic_ergotropy_bf(const XYZDMParams& p) {
    p.validate();
    const auto br = asymptotic_bf_branches(p);
    if (br.zeta == 0.0) return 0.0;
    return detail::clamp_nonnegative(br.zeta > 0.0 ? br.minus_branch : br.plus_branch,
                                     "asymptotic_ergotropy_bf");
}

// All closed-form coefficients at one parameter point, for diagnostics.
struct AnalyticCoefficients {
    double a{};
    Complex b{};
    PhiCoefficients phi;
    EtaCoefficients eta;
    double gamma_n{};
    double mu1{}, mu2{};
    BinomialLimits limits;
    double zeta{};
    std::array<double, 4> levels{};  // ascending
};

inline AnalyticCoefficients analytic_coefficients(const XYZDMParams& p, double t,
                                                  const NoiseParams& np) {
    p.validate();
    np.validate();
    const double wt = p.omega * t;
    AnalyticCoefficients out;
    const auto amp = charging_amplitudes(wt);
    out.a = amp.a;
    out.b = amp.b;
    const double jg = p.J * p.gamma;
    const double c4 = jg == 0.0 ? 0.0 : -jg / (p.h0 + xy_radius(p));
    out.phi = phi_coefficients(p, amp.a, std::norm(amp.b), c4);
    if (dm_radius(p) > 0.0) {
        out.eta = eta_coefficients(p, amp.a, std::norm(amp.b), -Complex(p.J, p.D) / dm_radius(p));
    }
    out.gamma_n = ad_gamma_n(SingleQubitParams{1.0, 1.0, wt}, np);
    out.mu1 = std::cos(wt);
    out.mu2 = std::sin(wt);
    out.limits = binomial_limits(np.n);
    out.zeta = bf_asymptotic_coherence(p);
    out.levels = analytic_eigenvalues(p);
    std::sort(out.levels.begin(), out.levels.end());
    return out;
}

}  // namespace qbattery
