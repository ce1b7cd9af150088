// Battery Hamiltonians, charged states and DMI regions
//
// Basis conventions: single qubit (|0>, |1>) with |0> excited (energy h0) and
// |1> the zero-energy ground state; two qubits in the product basis
// (|00>, |01>, |10>, |11>).

#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <string>

#include "qbattery/errors.hpp"
#include "qbattery/linalg.hpp"

namespace qbattery {

// ---------------------------------------------------------------- one qubit

struct SingleQubitParams {
    double h0{1.0};
    double omega{1.0};  // charging field strength
    double t{0.0};      // charging time (hbar = 1)

    void validate() const {
        if (!(h0 > 0.0)) throw InvalidParameter("h0 must be > 0");
        if (!(omega > 0.0)) throw InvalidParameter("omega must be > 0");
        if (!(t >= 0.0)) throw InvalidParameter("t must be >= 0");
    }

    double omega_t() const { return omega * t; }

    // Strong-field charging assumes omega >> h0; flagged, never enforced.
    bool weak_field() const { return omega < 10.0 * h0; }
};

inline SingleQubitParams at_omega_t(double omega_t, double h0 = 1.0) {
    return SingleQubitParams{h0, 1.0, omega_t};
}

// h0 sigma_+ sigma_- = diag(h0, 0)
inline Matrix single_qubit_hamiltonian(const SingleQubitParams& p) {
    p.validate();
    return Matrix::diagonal({p.h0, 0.0});
}

// exp(-i omega t sigma_x) applied to |1><1|.
inline DensityMatrix charged_state_single(const SingleQubitParams& p) {
    p.validate();
    const double wt = p.omega_t();
    const double s = std::sin(wt);
    const double c = std::cos(wt);
    const double s2 = std::sin(2.0 * wt);
    return DensityMatrix(Matrix{s * s, -0.5 * kI * s2, 0.5 * kI * s2, c * c});
}

// ---------------------------------------------------------------- two qubits

struct XYZDMParams {
    double h0{1.0};
    double J{0.0};
    double Jz{0.0};
    double gamma{0.0};
    double D{0.0};
    double omega{1.0};

    void validate() const {
        if (!(h0 > 0.0)) throw InvalidParameter("h0 must be > 0");
        if (!(Jz >= 0.0)) throw InvalidParameter("Jz must be >= 0 (ferromagnetic z coupling)");
        if (!(omega > 0.0)) throw InvalidParameter("omega must be > 0");
        if (!std::isfinite(J) || !std::isfinite(gamma) || !std::isfinite(D)) {
            throw InvalidParameter("J, gamma and D must be finite");
        }
    }

    bool h0_overridden() const { return h0 != 1.0; }
};

struct CriticalValues {
    double d_c{0.0};
    double d_c_prime{0.0};
};

enum class Region { R1, R2, R3 };

inline const char* to_string(Region r) {
    switch (r) {
        case Region::R1: return "R1";
        case Region::R2: return "R2";
        case Region::R3: return "R3";
    }
    return "?";
}

inline int region_index(Region r) { return static_cast<int>(r) + 1; }

// e1, e2 from the {|01>,|10>} block; e3, e4 from the {|00>,|11>} block.
struct AnalyticEigenData {
    double e1{}, e2{}, e3{}, e4{};
    Complex c1{}, c2{};
    double c3{}, c4{};
};

inline Matrix two_qubit_hamiltonian(const XYZDMParams& p) {
    p.validate();
    const double h = p.h0;
    Matrix H(4);
    H(0, 0) = 2.0 * h + 0.5 * p.Jz;
    H(1, 1) = h - 0.5 * p.Jz;
    H(2, 2) = h - 0.5 * p.Jz;
    H(3, 3) = 0.5 * p.Jz;
    H(0, 3) = p.J * p.gamma;
    H(3, 0) = p.J * p.gamma;
    H(1, 2) = Complex(p.J, p.D);
    H(2, 1) = Complex(p.J, -p.D);
    return H;
}

// Same operator assembled from Pauli products; independent of the entry-wise
// construction above.
inline Matrix two_qubit_hamiltonian_from_paulis(const XYZDMParams& p) {
    using namespace pauli;
    const Matrix n = raising() * lowering();
    Matrix H = p.h0 * (tensor(n, I()) + tensor(I(), n));
    H += (0.5 * p.J) * ((1.0 + p.gamma) * tensor(X(), X()) + (1.0 - p.gamma) * tensor(Y(), Y()));
    H += (0.5 * p.Jz) * tensor(Z(), Z());
    H += (0.5 * p.D) * (tensor(X(), Y()) - tensor(Y(), X()));
    return H;
}

inline double dm_radius(const XYZDMParams& p) { return std::hypot(p.J, p.D); }
inline double xy_radius(const XYZDMParams& p) { return std::hypot(p.h0, p.J * p.gamma); }

// {e1, e2, e3, e4}; always defined.
inline std::array<double, 4> analytic_eigenvalues(const XYZDMParams& p) {
    const double r = dm_radius(p);
    const double s = xy_radius(p);
    return {p.h0 + r - 0.5 * p.Jz, p.h0 - r - 0.5 * p.Jz, p.h0 + s + 0.5 * p.Jz,
            p.h0 - s + 0.5 * p.Jz};
}

inline AnalyticEigenData analytic_eigensystem(const XYZDMParams& p) {
    p.validate();
    const double r = dm_radius(p);
    const double jg = p.J * p.gamma;
    if (r == 0.0) throw DegenerateParameters("analytic_eigensystem: J^2 + D^2 = 0");
    if (jg == 0.0) throw DegenerateParameters("analytic_eigensystem: J*gamma = 0");
    const auto e = analytic_eigenvalues(p);
    const double s = xy_radius(p);
    AnalyticEigenData out;
    out.e1 = e[0];
    out.e2 = e[1];
    out.e3 = e[2];
    out.e4 = e[3];
    out.c1 = Complex(p.J, p.D) / r;
    out.c2 = -out.c1;
    out.c3 = (p.h0 + s) / jg;
    // (h0 - s)/(J gamma) loses all digits when J gamma << h0; use the
    // equivalent -J gamma / (h0 + s).
    out.c4 = -jg / (p.h0 + s);
    return out;
}

// Eigenvectors |e1>..|e4> in the layout (0, c, 1, 0) and (c, 0, 0, 1),
// normalised. Singular coefficients are replaced by their limits:
// J gamma = 0 gives |e3> = |00>, |e4> = |11>; J = D = 0 gives |e1> = |01>,
// |e2> = |10>.
inline std::array<Vector, 4> analytic_eigenvectors(const XYZDMParams& p) {
    p.validate();
    const double r = dm_radius(p);
    const double jg = p.J * p.gamma;
    const double s = xy_radius(p);
    std::array<Vector, 4> v{Vector(4), Vector(4), Vector(4), Vector(4)};
    if (r > 0.0) {
        const Complex c1 = Complex(p.J, p.D) / r;
        v[0] = Vector{0.0, c1, 1.0, 0.0}.normalized();
        v[1] = Vector{0.0, -c1, 1.0, 0.0}.normalized();
    } else {
        v[0] = Vector::basis(4, 1);
        v[1] = Vector::basis(4, 2);
    }
    if (jg != 0.0) {
        v[2] = Vector{(p.h0 + s) / jg, 0.0, 0.0, 1.0}.normalized();
        v[3] = Vector{-jg / (p.h0 + s), 0.0, 0.0, 1.0}.normalized();
    } else {
        v[2] = Vector::basis(4, 0);
        v[3] = Vector::basis(4, 3);
    }
    return v;
}

namespace detail {
// Smallest |D| beyond which sqrt(D^2 + J^2) > threshold; 0 if it already
// holds at D = 0.
inline double crossing_dmi(double threshold, double J) {
    if (threshold <= std::abs(J)) return 0.0;
    return std::sqrt(threshold * threshold - J * J);
}
}  // namespace detail

// d_c: ground state switches |e4> -> |e2> (e2 < e4).
// d_c': top state switches |e3> -> |e1> (e1 > e3).
inline CriticalValues critical_dmi(const XYZDMParams& p) {
    p.validate();
    const double s = xy_radius(p);
    return {detail::crossing_dmi(s - p.Jz, p.J), detail::crossing_dmi(s + p.Jz, p.J)};
}

// Boundaries: |D| = d_c belongs to R1, |D| = d_c' to R2.
inline Region classify_region(const XYZDMParams& p) {
    const auto cv = critical_dmi(p);
    const double d = std::abs(p.D);
    if (d <= cv.d_c) return Region::R1;
    if (d <= cv.d_c_prime) return Region::R2;
    return Region::R3;
}

inline bool ground_is_e2(const XYZDMParams& p) { return std::abs(p.D) > critical_dmi(p).d_c; }

inline double energy_gap(const XYZDMParams& p) {
    p.validate();
    const auto e = analytic_eigenvalues(p);
    const auto [lo, hi] = std::minmax_element(e.begin(), e.end());
    return *hi - *lo;
}

struct GroundState {
    DensityMatrix rho;
    bool degenerate_crossing{false};  // |D| == d_c: e2 and e4 coincide
};

inline GroundState ground_state(const XYZDMParams& p) {
    const auto vecs = analytic_eigenvectors(p);
    const bool switched = ground_is_e2(p);
    const bool crossing = std::abs(p.D) == critical_dmi(p).d_c;
    return {DensityMatrix::pure(switched ? vecs[1] : vecs[3]), crossing};
}

// Coefficient c_i of the initial state: c2 when the ground state is |e2>,
// otherwise c4 (0 in the J gamma = 0 limit).
inline Complex ground_coefficient(const XYZDMParams& p) {
    p.validate();
    if (ground_is_e2(p)) return -Complex(p.J, p.D) / dm_radius(p);
    const double jg = p.J * p.gamma;
    return jg == 0.0 ? Complex{} : Complex(-jg / (p.h0 + xy_radius(p)));
}

// exp(-i omega t (X (x) I + I (x) X)) written out with a = cos 2wt,
// b = -i sin 2wt.
inline Matrix charging_unitary_two(const XYZDMParams& p, double t) {
    if (!(t >= 0.0)) throw InvalidParameter("charging time must be >= 0");
    const double wt2 = 2.0 * p.omega * t;
    const Complex a = std::cos(wt2);
    const Complex b = -kI * std::sin(wt2);
    const Complex ap = a + 1.0;
    const Complex am = a - 1.0;
    return 0.5 * Matrix{ap, b, b, am,
                        b, ap, am, b,
                        b, am, ap, b,
                        am, b, b, ap};
}

inline DensityMatrix charged_state_two(const XYZDMParams& p, double t) {
    const auto g = ground_state(p);
    const Matrix U = charging_unitary_two(p, t);
    return DensityMatrix(U * g.rho.mat() * U.adjoint());
}

}  // namespace qbattery
