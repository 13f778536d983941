// pauli.hpp — qubit operator basics: Pauli matrices, the orthonormal Pauli
// basis, and vectorization helpers used throughout the map/generator code.

#pragma once

#include <array>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace sbt {

using Mat2 = Eigen::Matrix2cd;
using Super = Eigen::Matrix4d;   // superoperator in the orthonormal Pauli basis (real)
using Choi = Eigen::Matrix4cd;

inline Mat2 identity2() { return Mat2::Identity(); }

inline Mat2 sigma_x() {
    Mat2 m;
    m << 0, 1, 1, 0;
    return m;
}

inline Mat2 sigma_y() {
    Mat2 m;
    m << std::complex<double>(0, 0), std::complex<double>(0, -1),
         std::complex<double>(0, 1), std::complex<double>(0, 0);
    return m;
}

inline Mat2 sigma_z() {
    Mat2 m;
    m << 1, 0, 0, -1;
    return m;
}

// Orthonormal Hermitian basis {I, sx, sy, sz} / sqrt(2): Tr(P_a P_b) = delta_ab.
inline const std::array<Mat2, 4>& pauli_basis() {
    static const std::array<Mat2, 4> basis = {
        identity2() / std::numbers::sqrt2,
        sigma_x() / std::numbers::sqrt2,
        sigma_y() / std::numbers::sqrt2,
        sigma_z() / std::numbers::sqrt2,
    };
    return basis;
}

// Components of a (near-)Hermitian matrix in the orthonormal Pauli basis.
// For exactly Hermitian input the components are real; any imaginary part is
// discarded here and should be tracked by the caller as a residual.
inline Eigen::Vector4d pauli_components(const Mat2& m) {
    const auto& basis = pauli_basis();
    Eigen::Vector4d c;
    for (int a = 0; a < 4; ++a) c(a) = (basis[a] * m).trace().real();
    return c;
}

inline Mat2 from_pauli(const Eigen::Vector4d& c) {
    const auto& basis = pauli_basis();
    Mat2 m = Mat2::Zero();
    for (int a = 0; a < 4; ++a) m += c(a) * basis[a];
    return m;
}

// Matrix of a linear map on 2x2 operators in the orthonormal Pauli basis.
template <typename Action>
Super superop_matrix(Action&& act) {
    const auto& basis = pauli_basis();
    Super s;
    for (int b = 0; b < 4; ++b) {
        const Mat2 image = act(basis[b]);
        for (int a = 0; a < 4; ++a) s(a, b) = (basis[a] * image).trace().real();
    }
    return s;
}

// Apply a Pauli-basis superoperator to a Hermitian 2x2 matrix.
inline Mat2 apply_superop(const Super& s, const Mat2& m) {
    return from_pauli(s * pauli_components(m));
}

inline double hermiticity_residual(const Mat2& m) {
    return (m - m.adjoint()).norm();
}

inline Mat2 commutator(const Mat2& a, const Mat2& b) { return a * b - b * a; }

}  // namespace sbt
