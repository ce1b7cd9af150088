// Phase-flip, bit-flip and amplitude-damping noise
//
// Parameter meaning differs per channel and is kept as-is:
//   PhaseFlip, BitFlip : p = probability that no flip occurs
//   AmplitudeDamping   : p = decay probability per application

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qbattery/errors.hpp"
#include "qbattery/linalg.hpp"
#include "qbattery/models.hpp"

namespace qbattery {

enum class NoiseKind { PhaseFlip, BitFlip, AmplitudeDamping };

inline const char* to_string(NoiseKind k) {
    switch (k) {
        case NoiseKind::PhaseFlip: return "pf";
        case NoiseKind::BitFlip: return "bf";
        case NoiseKind::AmplitudeDamping: return "ad";
    }
    return "?";
}

inline std::optional<NoiseKind> parse_noise_kind(std::string_view s) {
    if (s == "pf") return NoiseKind::PhaseFlip;
    if (s == "bf") return NoiseKind::BitFlip;
    if (s == "ad") return NoiseKind::AmplitudeDamping;
    return std::nullopt;
}

struct NoiseParams {
    NoiseKind kind{NoiseKind::PhaseFlip};
    double p{0.0};
    std::int64_t n{0};  // number of sequential applications

    void validate() const {
        if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("noise p must lie in [0, 1]");
        if (n < 0) throw InvalidParameter("number of channel applications must be >= 0");
    }
};

inline void require_probability(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("noise p must lie in [0, 1]");
}

// Kraus operators with sum_i K_i^dagger K_i = I checked on construction.
class KrausSet {
public:
    explicit KrausSet(std::vector<Matrix> ops) : ops_(std::move(ops)) {
        if (ops_.empty()) throw InvalidParameter("KrausSet: no operators");
        const int dim = ops_.front().dim();
        Matrix sum(dim);
        for (const auto& k : ops_) {
            if (k.dim() != dim) throw InvalidDimension("KrausSet: mixed operator dimensions");
            sum += k.adjoint() * k;
        }
        if (max_abs_diff(sum, Matrix::identity(dim)) > tol::kEquality) {
            throw ContractViolation("KrausSet: completeness violated beyond 1e-12");
        }
    }

    const std::vector<Matrix>& ops() const noexcept { return ops_; }
    int dim() const { return ops_.front().dim(); }

    double completeness_error() const {
        Matrix sum(dim());
        for (const auto& k : ops_) sum += k.adjoint() * k;
        return max_abs_diff(sum, Matrix::identity(dim()));
    }

private:
    std::vector<Matrix> ops_;
};

inline KrausSet kraus_single(NoiseKind kind, double p) {
    require_probability(p);
    const double keep = std::sqrt(p);
    const double flip = std::sqrt(1.0 - p);
    switch (kind) {
        case NoiseKind::PhaseFlip:
            return KrausSet({flip * pauli::Z(), keep * pauli::I()});
        case NoiseKind::BitFlip:
            return KrausSet({flip * pauli::X(), keep * pauli::I()});
        case NoiseKind::AmplitudeDamping:
            return KrausSet({Matrix{flip, 0.0, 0.0, 1.0}, Matrix{0.0, 0.0, keep, 0.0}});
    }
    throw InvalidParameter("kraus_single: unknown noise kind");
}

// Product channel: K_ij = K_i (x) K_j.
inline KrausSet kraus_two(NoiseKind kind, double p) {
    const auto single = kraus_single(kind, p);
    std::vector<Matrix> ops;
    for (const auto& ki : single.ops())
        for (const auto& kj : single.ops()) ops.push_back(tensor(ki, kj));
    return KrausSet(std::move(ops));
}

namespace detail {
inline Matrix apply_unchecked(const KrausSet& k, const Matrix& rho) {
    Matrix out(rho.dim());
    for (const auto& op : k.ops()) out += op * rho * op.adjoint();
    return out;
}
}  // namespace detail

inline DensityMatrix apply_channel(const KrausSet& k, const DensityMatrix& rho) {
    if (k.dim() != rho.dim()) throw InvalidDimension("apply_channel: dimension mismatch");
    return DensityMatrix(detail::apply_unchecked(k, rho.mat()));
}

// n-fold composition; the result is validated once at the end.
inline DensityMatrix apply_channel_n(const KrausSet& k, const DensityMatrix& rho, std::int64_t n) {
    if (n < 0) throw InvalidParameter("apply_channel_n: n must be >= 0");
    if (k.dim() != rho.dim()) throw InvalidDimension("apply_channel_n: dimension mismatch");
    Matrix m = rho.mat();
    for (std::int64_t i = 0; i < n; ++i) m = detail::apply_unchecked(k, m);
    return DensityMatrix(m);
}

// Every intermediate state Lambda^0 .. Lambda^n (n + 1 entries).
inline std::vector<Matrix> channel_trajectory(const KrausSet& k, const DensityMatrix& rho,
                                              std::int64_t n) {
    if (n < 0) throw InvalidParameter("channel_trajectory: n must be >= 0");
    std::vector<Matrix> out;
    out.reserve(static_cast<std::size_t>(n) + 1);
    out.push_back(rho.mat());
    for (std::int64_t i = 0; i < n; ++i) out.push_back(detail::apply_unchecked(k, out.back()));
    return out;
}

struct FixedPoint {
    DensityMatrix state;
    std::int64_t steps{0};
    bool converged{false};
};

inline constexpr std::int64_t kFixedPointCap = 1'000'000;

// Iterate until successive states differ by < tolerance (max-norm).
inline FixedPoint iterate_to_fixed_point(const KrausSet& k, const DensityMatrix& rho,
                                         double tolerance = tol::kEquality,
                                         std::int64_t cap = kFixedPointCap) {
    Matrix m = rho.mat();
    for (std::int64_t i = 1; i <= cap; ++i) {
        Matrix next = detail::apply_unchecked(k, m);
        const double delta = max_abs_diff(next, m);
        m = std::move(next);
        if (delta < tolerance) return {DensityMatrix(m), i, true};
    }
    return {DensityMatrix(m), cap, false};
}

// ------------------------------------------------- single-qubit closed forms

namespace detail {
inline void require_kind(const NoiseParams& np, NoiseKind expected, const char* where) {
    if (np.kind != expected) throw InvalidParameter(std::string(where) + ": noise kind mismatch");
    np.validate();
}
}  // namespace detail

inline DensityMatrix closed_state_pf(const SingleQubitParams& s, const NoiseParams& np) {
    detail::require_kind(np, NoiseKind::PhaseFlip, "closed_state_pf");
    s.validate();
    const double wt = s.omega_t();
    const double q = std::pow(2.0 * np.p - 1.0, static_cast<double>(np.n));
    const double sn = std::sin(wt);
    const double cs = std::cos(wt);
    const double s2 = std::sin(2.0 * wt);
    return DensityMatrix(Matrix{sn * sn, -0.5 * kI * q * s2, 0.5 * kI * q * s2, cs * cs});
}

// Weight of an even / odd number of flips among n independent trials with
// no-flip probability p:
//   even = sum_i C(n,2i)   p^(n-2i)   (1-p)^(2i)
//   odd  = sum_i C(n,2i+1) p^(n-2i-1) (1-p)^(2i+1)
struct ParitySums {
    double even{0.0};
    double odd{0.0};
};

// Summation limits S1, S2 of the even / odd binomial sums (S1 + S2 = n).
struct BinomialLimits {
    std::int64_t s1{0};
    std::int64_t s2{0};
};

inline BinomialLimits binomial_limits(std::int64_t n) {
    const std::int64_t s1 = (n % 2 == 0) ? n / 2 : (n - 1) / 2;
    return {s1, n - s1};
}

// Terms come from the ratio w_{k+1}/w_k = (n-k)/(k+1) * (1-p)/p, so no
// factorial is ever formed. When p^n would underflow the recurrence runs on
// logarithms instead.
inline ParitySums binomial_parity_sums(std::int64_t n, double p) {
    require_probability(p);
    if (n < 0) throw InvalidParameter("binomial_parity_sums: n must be >= 0");
    ParitySums out;
    if (p == 1.0) {
        out.even = 1.0;
        return out;
    }
    if (p == 0.0) {
        (n % 2 == 0 ? out.even : out.odd) = 1.0;
        return out;
    }
    const double nd = static_cast<double>(n);
    const double ratio = (1.0 - p) / p;
    const double log_w0 = nd * std::log(p);
    if (log_w0 > -700.0) {
        double w = std::pow(p, nd);
        for (std::int64_t k = 0; k <= n; ++k) {
            (k % 2 == 0 ? out.even : out.odd) += w;
            w *= static_cast<double>(n - k) / static_cast<double>(k + 1) * ratio;
        }
    } else {
        const double log_ratio = std::log(ratio);
        double log_w = log_w0;
        for (std::int64_t k = 0; k <= n; ++k) {
            (k % 2 == 0 ? out.even : out.odd) += std::exp(log_w);
            if (k < n) {
                log_w += std::log(static_cast<double>(n - k)) - std::log(static_cast<double>(k + 1)) +
                         log_ratio;
            }
        }
    }
    return out;
}

inline DensityMatrix closed_state_bf(const SingleQubitParams& s, const NoiseParams& np) {
    detail::require_kind(np, NoiseKind::BitFlip, "closed_state_bf");
    s.validate();
    const double mu1 = std::cos(s.omega_t());
    const double mu2 = std::sin(s.omega_t());
    const auto w = binomial_parity_sums(np.n, np.p);
    const Complex coh = -kI * mu1 * mu2;  // initial rho_01
    return DensityMatrix(Matrix{w.even * mu2 * mu2 + w.odd * mu1 * mu1,
                                w.even * coh + w.odd * std::conj(coh),
                                w.even * std::conj(coh) + w.odd * coh,
                                w.even * mu1 * mu1 + w.odd * mu2 * mu2});
}

inline DensityMatrix closed_state_ad(const SingleQubitParams& s, const NoiseParams& np) {
    detail::require_kind(np, NoiseKind::AmplitudeDamping, "closed_state_ad");
    s.validate();
    const double wt = s.omega_t();
    const double survive = std::pow(1.0 - np.p, static_cast<double>(np.n));
    const double amp = std::pow(1.0 - np.p, 0.5 * static_cast<double>(np.n));
    const double sn = std::sin(wt);
    const double s2 = std::sin(2.0 * wt);
    const double excited = survive * sn * sn;
    return DensityMatrix(
        Matrix{excited, -0.5 * kI * amp * s2, 0.5 * kI * amp * s2, 1.0 - excited});
}

inline DensityMatrix closed_state(const SingleQubitParams& s, const NoiseParams& np) {
    switch (np.kind) {
        case NoiseKind::PhaseFlip: return closed_state_pf(s, np);
        case NoiseKind::BitFlip: return closed_state_bf(s, np);
        case NoiseKind::AmplitudeDamping: return closed_state_ad(s, np);
    }
    throw InvalidParameter("closed_state: unknown noise kind");
}

// ----------------------------------------------------- two-qubit diagonals

using Diagonal4 = std::array<double, 4>;

inline Diagonal4 diagonal_of(const Matrix& m) {
    if (m.dim() != 4) throw InvalidDimension("diagonal_of: expected a 4x4 matrix");
    return {m(0, 0).real(), m(1, 1).real(), m(2, 2).real(), m(3, 3).real()};
}

inline Diagonal4 diag_recursion_step(NoiseKind kind, double p, const Diagonal4& d) {
    const double q = 1.0 - p;
    switch (kind) {
        case NoiseKind::AmplitudeDamping:
            return {q * q * d[0],
                    q * p * d[0] + q * d[1],
                    q * p * d[0] + q * d[2],
                    p * p * d[0] + p * d[1] + p * d[2] + d[3]};
        case NoiseKind::BitFlip:
            return {p * p * d[0] + q * p * d[1] + q * p * d[2] + q * q * d[3],
                    q * p * d[0] + p * p * d[1] + q * q * d[2] + q * p * d[3],
                    q * p * d[0] + q * q * d[1] + p * p * d[2] + q * p * d[3],
                    q * q * d[0] + q * p * d[1] + q * p * d[2] + p * p * d[3]};
        case NoiseKind::PhaseFlip:
            break;
    }
    throw InvalidParameter("diag_recursion_two: phase-flip leaves the diagonal fixed");
}

inline Diagonal4 diag_recursion_two(NoiseKind kind, double p, Diagonal4 diag, std::int64_t steps) {
    require_probability(p);
    if (kind == NoiseKind::PhaseFlip) {
        throw InvalidParameter("diag_recursion_two: phase-flip leaves the diagonal fixed");
    }
    if (steps < 0) throw InvalidParameter("diag_recursion_two: steps must be >= 0");
    if (std::abs(diag[0] + diag[1] + diag[2] + diag[3] - 1.0) > tol::kValidation) {
        throw InvalidParameter("diag_recursion_two: diagonal must sum to 1");
    }
    for (std::int64_t i = 0; i < steps; ++i) diag = diag_recursion_step(kind, p, diag);
    return diag;
}

// --------------------------------------------------- bit-flip X-state limit

// Anti-diagonal coherence left by repeated bit flips:
// zeta = Re(c_i) / (2 (|c_i|^2 + 1)).
inline double bf_asymptotic_coherence(const XYZDMParams& p) {
    const Complex c = ground_coefficient(p);
    return c.real() / (2.0 * (std::norm(c) + 1.0));
}

inline DensityMatrix x_state(double zeta) {
    Matrix m = Matrix::diagonal({0.25, 0.25, 0.25, 0.25});
    m(0, 3) = m(3, 0) = m(1, 2) = m(2, 1) = zeta;
    return DensityMatrix(m);
}

inline DensityMatrix asymptotic_state_bf(const XYZDMParams& p) {
    return x_state(bf_asymptotic_coherence(p));
}

}  // namespace qbattery
