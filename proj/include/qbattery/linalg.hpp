// Dense complex linear algebra for one- and two-qubit operators
//
// Everything here works on 2x2 and 4x4 complex matrices. Storage is a fixed
// 16-entry array, so values are cheap to copy and never allocate.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "qbattery/errors.hpp"

namespace qbattery {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

namespace tol {
inline constexpr double kValidation = 1e-10;
inline constexpr double kEquality = 1e-12;
inline constexpr double kNegativeEigenvalue = -1e-10;
}  // namespace tol

inline void require_supported_dim(int dim, const char* where) {
    if (dim != 2 && dim != 4) {
        throw InvalidDimension(std::string(where) + ": dimension must be 2 or 4, got " +
                               std::to_string(dim));
    }
}

class Vector {
public:
    explicit Vector(int dim) : dim_(dim) {
        require_supported_dim(dim, "Vector");
        data_.fill(Complex{});
    }
    Vector(std::initializer_list<Complex> entries) : Vector(static_cast<int>(entries.size())) {
        std::copy(entries.begin(), entries.end(), data_.begin());
    }

    static Vector basis(int dim, int k) {
        Vector v(dim);
        v[k] = 1.0;
        return v;
    }

    int dim() const noexcept { return dim_; }
    Complex& operator[](int i) { return data_[static_cast<std::size_t>(i)]; }
    const Complex& operator[](int i) const { return data_[static_cast<std::size_t>(i)]; }

    double norm() const {
        double s = 0.0;
        for (int i = 0; i < dim_; ++i) s += std::norm((*this)[i]);
        return std::sqrt(s);
    }

    Vector normalized() const {
        const double n = norm();
        if (n == 0.0) throw ContractViolation("Vector::normalized: zero vector");
        Vector out = *this;
        for (int i = 0; i < dim_; ++i) out[i] /= n;
        return out;
    }

    friend Vector operator*(Complex s, Vector v) {
        for (int i = 0; i < v.dim_; ++i) v[i] *= s;
        return v;
    }

private:
    int dim_;
    std::array<Complex, 4> data_{};
};

// <a|b>
inline Complex inner(const Vector& a, const Vector& b) {
    if (a.dim() != b.dim()) throw InvalidDimension("inner: dimension mismatch");
    Complex s{};
    for (int i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

class Matrix {
public:
    explicit Matrix(int dim) : dim_(dim) {
        require_supported_dim(dim, "Matrix");
        data_.fill(Complex{});
    }

    // Row-major initializer; the entry count fixes the dimension (4 or 16).
    Matrix(std::initializer_list<Complex> entries)
        : Matrix(entries.size() == 4 ? 2 : entries.size() == 16 ? 4 : -1) {
        std::copy(entries.begin(), entries.end(), data_.begin());
    }

    static Matrix identity(int dim) {
        Matrix m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix diagonal(const std::vector<double>& d) {
        Matrix m(static_cast<int>(d.size()));
        for (int i = 0; i < m.dim(); ++i) m(i, i) = d[static_cast<std::size_t>(i)];
        return m;
    }

    int dim() const noexcept { return dim_; }

    Complex& operator()(int i, int j) { return data_[static_cast<std::size_t>(i * dim_ + j)]; }
    const Complex& operator()(int i, int j) const {
        return data_[static_cast<std::size_t>(i * dim_ + j)];
    }

    Matrix adjoint() const {
        Matrix out(dim_);
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < dim_; ++j) out(i, j) = std::conj((*this)(j, i));
        return out;
    }

    Complex trace() const {
        Complex s{};
        for (int i = 0; i < dim_; ++i) s += (*this)(i, i);
        return s;
    }

    double max_abs() const {
        double m = 0.0;
        for (int k = 0; k < dim_ * dim_; ++k) m = std::max(m, std::abs(data_[static_cast<std::size_t>(k)]));
        return m;
    }

    double frobenius() const {
        double s = 0.0;
        for (int k = 0; k < dim_ * dim_; ++k) s += std::norm(data_[static_cast<std::size_t>(k)]);
        return std::sqrt(s);
    }

    bool is_hermitian(double tolerance) const {
        for (int i = 0; i < dim_; ++i)
            for (int j = i; j < dim_; ++j)
                if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tolerance) return false;
        return true;
    }

    Matrix& operator+=(const Matrix& o) {
        check_same(o, "operator+=");
        for (int k = 0; k < dim_ * dim_; ++k) data_[static_cast<std::size_t>(k)] += o.data_[static_cast<std::size_t>(k)];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        check_same(o, "operator-=");
        for (int k = 0; k < dim_ * dim_; ++k) data_[static_cast<std::size_t>(k)] -= o.data_[static_cast<std::size_t>(k)];
        return *this;
    }
    Matrix& operator*=(Complex s) {
        for (int k = 0; k < dim_ * dim_; ++k) data_[static_cast<std::size_t>(k)] *= s;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Complex s, Matrix a) { return a *= s; }
    friend Matrix operator*(Matrix a, Complex s) { return a *= s; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        a.check_same(b, "operator*");
        Matrix out(a.dim_);
        for (int i = 0; i < a.dim_; ++i)
            for (int k = 0; k < a.dim_; ++k) {
                const Complex aik = a(i, k);
                if (aik == Complex{}) continue;
                for (int j = 0; j < a.dim_; ++j) out(i, j) += aik * b(k, j);
            }
        return out;
    }

    friend Vector operator*(const Matrix& a, const Vector& v) {
        if (a.dim_ != v.dim()) throw InvalidDimension("Matrix*Vector: dimension mismatch");
        Vector out(a.dim_);
        for (int i = 0; i < a.dim_; ++i)
            for (int j = 0; j < a.dim_; ++j) out[i] += a(i, j) * v[j];
        return out;
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.dim_ == b.dim_ && a.data_ == b.data_;
    }

private:
    void check_same(const Matrix& o, const char* where) const {
        if (o.dim_ != dim_) throw InvalidDimension(std::string(where) + ": dimension mismatch");
    }

    int dim_;
    std::array<Complex, 16> data_{};
};

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).max_abs(); }

// |a><b|
inline Matrix outer(const Vector& a, const Vector& b) {
    if (a.dim() != b.dim()) throw InvalidDimension("outer: dimension mismatch");
    Matrix m(a.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < a.dim(); ++j) m(i, j) = a[i] * std::conj(b[j]);
    return m;
}

inline Matrix projector(const Vector& v) { return outer(v, v); }

// Kronecker product of two single-qubit operators:
// (a (x) b)[2i+k][2j+l] = a[i][j] * b[k][l].
inline Matrix tensor(const Matrix& a, const Matrix& b) {
    if (a.dim() != 2 || b.dim() != 2) {
        throw InvalidDimension("tensor: both factors must be 2x2");
    }
    Matrix out(4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) out(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
    return out;
}

namespace pauli {
inline Matrix I() { return Matrix::identity(2); }
inline Matrix X() { return Matrix{0.0, 1.0, 1.0, 0.0}; }
inline Matrix Y() { return Matrix{0.0, -kI, kI, 0.0}; }
inline Matrix Z() { return Matrix{1.0, 0.0, 0.0, -1.0}; }
// sigma_+ = (X + iY)/2 = |0><1|, sigma_- = |1><0|
inline Matrix raising() { return Matrix{0.0, 1.0, 0.0, 0.0}; }
inline Matrix lowering() { return Matrix{0.0, 0.0, 1.0, 0.0}; }
}  // namespace pauli

// Eigenpairs with values ascending; ties keep the order in which Jacobi left
// them on the diagonal. Each vector's first component above 1e-12 in modulus
// is real and positive.
struct EigenSystem {
    std::vector<double> values;
    std::vector<Vector> vectors;

    Matrix reconstruct() const {
        Matrix m(vectors.front().dim());
        for (std::size_t k = 0; k < values.size(); ++k) m += values[k] * projector(vectors[k]);
        return m;
    }
};

namespace detail {

inline double off_diagonal_mass(const Matrix& m) {
    double s = 0.0;
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j)
            if (i != j) s += std::norm(m(i, j));
    return std::sqrt(s);
}

inline Vector fix_phase(Vector v) {
    for (int i = 0; i < v.dim(); ++i) {
        const double mag = std::abs(v[i]);
        if (mag > 1e-12) {
            const Complex phase = std::conj(v[i]) / mag;
            v = phase * v;
            v[i] = Complex(std::abs(v[i]), 0.0);
            break;
        }
    }
    return v;
}

}  // namespace detail

inline constexpr int kMaxJacobiSweeps = 100;

// Cyclic complex Jacobi. Each pivot (p,q) is first made real by a diagonal
// phase, then annihilated by a real plane rotation.
inline EigenSystem eig_hermitian(const Matrix& a) {
    if (!a.is_hermitian(tol::kValidation)) {
        throw ContractViolation("eig_hermitian: matrix is not Hermitian within 1e-10");
    }
    const int n = a.dim();
    Matrix m = 0.5 * (a + a.adjoint());
    Matrix v = Matrix::identity(n);
    const double threshold = 1e-14 * std::max(1.0, m.frobenius());

    for (int sweep = 0; sweep < kMaxJacobiSweeps; ++sweep) {
        if (detail::off_diagonal_mass(m) < threshold) break;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const Complex beta = m(p, q);
                const double mag = std::abs(beta);
                if (mag == 0.0) continue;
                const Complex phase = std::conj(beta) / mag;  // e^{-i arg beta}
                const double alpha = m(p, p).real();
                const double delta = m(q, q).real();
                const double theta = (delta - alpha) / (2.0 * mag);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                Matrix g = Matrix::identity(n);
                g(p, p) = c;
                g(p, q) = s;
                g(q, p) = -s * phase;
                g(q, q) = c * phase;

                m = g.adjoint() * m * g;
                m(p, q) = 0.0;
                m(q, p) = 0.0;
                m(p, p) = m(p, p).real();
                m(q, q) = m(q, q).real();
                v = v * g;
            }
        }
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return m(i, i).real() < m(j, j).real(); });

    EigenSystem out;
    for (int k : order) {
        out.values.push_back(m(k, k).real());
        Vector col(n);
        for (int i = 0; i < n; ++i) col[i] = v(i, k);
        out.vectors.push_back(detail::fix_phase(col.normalized()));
    }
    return out;
}

inline std::vector<double> eigenvalues_hermitian(const Matrix& a) { return eig_hermitian(a).values; }

// Hermitian, unit-trace, positive-semidefinite state of one or two qubits.
class DensityMatrix {
public:
    explicit DensityMatrix(Matrix m) : mat_(std::move(m)) { validate(mat_); }

    static DensityMatrix pure(const Vector& psi) { return DensityMatrix(projector(psi.normalized())); }

    static void validate(const Matrix& m) {
        if (!m.is_hermitian(tol::kEquality)) {
            throw ContractViolation("DensityMatrix: not Hermitian within 1e-12");
        }
        if (std::abs(m.trace() - 1.0) > tol::kEquality) {
            throw ContractViolation("DensityMatrix: trace deviates from 1 by more than 1e-12");
        }
        const double smallest = eig_hermitian(m).values.front();
        if (smallest < tol::kNegativeEigenvalue) {
            throw ContractViolation("DensityMatrix: eigenvalue " + std::to_string(smallest) +
                                    " below -1e-10");
        }
    }

    const Matrix& mat() const noexcept { return mat_; }
    int dim() const noexcept { return mat_.dim(); }
    Complex operator()(int i, int j) const { return mat_(i, j); }

    double purity() const { return (mat_ * mat_).trace().real(); }

private:
    Matrix mat_;
};

// Re Tr(h rho); the imaginary part must vanish for Hermitian h.
inline double trace_product(const Matrix& h, const Matrix& rho) {
    if (h.dim() != rho.dim()) throw InvalidDimension("trace_product: dimension mismatch");
    const Complex tr = (h * rho).trace();
    if (std::abs(tr.imag()) > tol::kEquality) {
        throw ContractViolation("trace_product: imaginary part exceeds 1e-12");
    }
    return tr.real();
}

inline double trace_product(const Matrix& h, const DensityMatrix& rho) {
    return trace_product(h, rho.mat());
}

}  // namespace qbattery
