#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <limits>

#include "entdyn/model.hpp"

namespace entdyn {

using Eigen::Matrix4cd;

/// Qubit-sector 4x4 submatrix (photon numbers {0,1} per mode) in the basis
/// |1> = |0_A 0_B>, |2> = |0_A 1_B>, |3> = |1_A 0_B>, |4> = |1_A 1_B>.
/// Deliberately NOT renormalized; leaked_weight = 1 - tr(block) reports the
/// population outside the qubit sector.
struct QubitBlock {
    Matrix4cd rho;
    double leaked_weight = 0.0;
};

inline QubitBlock extract_qubit_block(const DensityMatrix& state) {
    if (state.n_max < 1) throw validation_error("extract_qubit_block: n_max must be >= 1");
    const int stride = state.n_max + 1;
    const int idx[4] = {0, 1, stride, stride + 1};
    QubitBlock block;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) block.rho(i, j) = state.rho(idx[i], idx[j]);
    block.leaked_weight = 1.0 - block.rho.trace().real();
    return block;
}

/// (sigma_y (x) sigma_y) rho^* (sigma_y (x) sigma_y); sigma_y (x) sigma_y is
/// the anti-diagonal (-1, 1, 1, -1) permutation.
inline Matrix4cd spin_flip_matrix() {
    Matrix4cd s = Matrix4cd::Zero();
    s(0, 3) = -1.0;
    s(1, 2) = 1.0;
    s(2, 1) = 1.0;
    s(3, 0) = -1.0;
    return s;
}

inline Matrix4cd spin_flip(const Matrix4cd& rho4) {
    const Matrix4cd s = spin_flip_matrix();
    return s * rho4.conjugate() * s;
}

/// Largest magnitude outside the X pattern (diagonal plus anti-diagonal).
inline double xstate_off_pattern_magnitude(const Matrix4cd& rho4) {
    double worst = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (i == j || i + j == 3) continue;
            worst = std::max(worst, std::abs(rho4(i, j)));
        }
    return worst;
}

enum class ConcurrencePath { general, xstate };

struct ConcurrenceResult {
    double value = 0.0;
    /// Eigenvalues of rho * rho~ sorted decreasing (general route only).
    std::array<double, 4> lambdas{std::numeric_limits<double>::quiet_NaN(),
                                  std::numeric_limits<double>::quiet_NaN(),
                                  std::numeric_limits<double>::quiet_NaN(),
                                  std::numeric_limits<double>::quiet_NaN()};
    /// X-state quantities, populated on the xstate route.
    double c1_tilde = std::numeric_limits<double>::quiet_NaN();
    double c2_tilde = std::numeric_limits<double>::quiet_NaN();
    ConcurrencePath path = ConcurrencePath::general;
};

namespace detail {

inline void check_concurrence_input(const Matrix4cd& rho4) {
    if ((rho4 - rho4.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
        throw validation_error("concurrence: input is not Hermitian within 1e-9");
    Eigen::SelfAdjointEigenSolver<Matrix4cd> es(0.5 * (rho4 + rho4.adjoint()),
                                                Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9)
        throw validation_error("concurrence: input is not positive semidefinite within -1e-9");
}

/// sqrt(lambda_i) of rho * rho~ computed without forming the product:
/// the singular values of sqrt(rho) S conj(sqrt(rho)), whose squares are
/// exactly the eigenvalues of the Hermitian sqrt(rho) rho~ sqrt(rho). Stays
/// accurate where the product encoding has already squared away the signal.
inline std::array<double, 4> stable_sqrt_lambdas(const Matrix4cd& rho4) {
    Eigen::SelfAdjointEigenSolver<Matrix4cd> es(0.5 * (rho4 + rho4.adjoint()));
    Eigen::Vector4d eig = es.eigenvalues().cwiseMax(0.0);
    const Matrix4cd sqrt_rho =
        es.eigenvectors() * eig.cwiseSqrt().asDiagonal().toDenseMatrix().cast<complexd>() *
        es.eigenvectors().adjoint();
    const Matrix4cd factor = sqrt_rho * spin_flip_matrix() * sqrt_rho.conjugate();
    Eigen::JacobiSVD<Matrix4cd> svd(factor);
    std::array<double, 4> s{};
    for (int i = 0; i < 4; ++i) s[i] = svd.singularValues()(i); // decreasing
    return s;
}

inline ConcurrenceResult concurrence_from_lambdas(std::array<double, 4> lambdas) {
    for (double& l : lambdas) {
        if (l < -1e-10)
            throw simulation_error("concurrence: eigenvalue " + std::to_string(l) +
                                   " below -1e-10 (numerical degeneracy; invalid input state)");
        if (l < 0.0) l = 0.0; // roundoff in [-1e-10, 0)
    }
    std::sort(lambdas.begin(), lambdas.end(), std::greater<double>());
    ConcurrenceResult res;
    res.lambdas = lambdas;
    const double raw = std::sqrt(lambdas[0]) - std::sqrt(lambdas[1]) - std::sqrt(lambdas[2]) -
                       std::sqrt(lambdas[3]);
    res.value = std::clamp(raw, 0.0, 1.0);
    res.path = ConcurrencePath::general;
    return res;
}

} // namespace detail

/// Wootters concurrence by the general route: eigenvalues of the
/// non-Hermitian product rho * rho~, square-rooted and combined as
/// max(0, sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4)).
///
/// Forming the product squares the conditioning, so eigenvalues below
/// 1e-11 * max(lambda) are indistinguishable from noise in that encoding
/// (sqrt would then inject O(1e-8) garbage); exactly those are refined from
/// the factored Hermitian form. Eigenvalues the product can resolve are
/// reported from the eigensolver untouched.
inline ConcurrenceResult concurrence_general(const Matrix4cd& rho4) {
    detail::check_concurrence_input(rho4);
    const Matrix4cd product = rho4 * spin_flip(rho4);
    Eigen::ComplexEigenSolver<Matrix4cd> es(product, /*computeEigenvectors=*/false);
    std::array<double, 4> lambdas{};
    double lmax = 0.0;
    for (int i = 0; i < 4; ++i) {
        lambdas[i] = es.eigenvalues()(i).real();
        lmax = std::max(lmax, lambdas[i]);
    }
    std::sort(lambdas.begin(), lambdas.end(), std::greater<double>());
    const double resolution = 1e-11 * lmax;
    bool unresolved = false;
    for (double l : lambdas) unresolved |= (l < resolution);
    if (unresolved) {
        const std::array<double, 4> s = detail::stable_sqrt_lambdas(rho4);
        for (int i = 0; i < 4; ++i) {
            if (lambdas[i] >= resolution) continue;
            if (lambdas[i] < -1e-10) // genuinely invalid input, not noise
                throw simulation_error("concurrence: eigenvalue " + std::to_string(lambdas[i]) +
                                       " below -1e-10 (numerical degeneracy; invalid input "
                                       "state)");
            lambdas[i] = s[i] * s[i];
        }
    }
    return detail::concurrence_from_lambdas(lambdas);
}

/// Cross-check route: eigenvalues of the Hermitian matrix
/// sqrt(rho) rho~ sqrt(rho) (equal to those of rho rho~), via the singular
/// values of its factor. Must agree with concurrence_general.
inline ConcurrenceResult concurrence_hermitian(const Matrix4cd& rho4) {
    detail::check_concurrence_input(rho4);
    const std::array<double, 4> s = detail::stable_sqrt_lambdas(rho4);
    std::array<double, 4> lambdas{};
    for (int i = 0; i < 4; ++i) lambdas[i] = s[i] * s[i];
    return detail::concurrence_from_lambdas(lambdas);
}

/// Closed form for X-shaped states:
///   C~_1 = 2 [ sqrt(rho23 rho32) - sqrt(rho11 rho44) ]
///   C~_2 = 2 [ sqrt(rho14 rho41) - sqrt(rho22 rho33) ]
///   C    = max(0, C~_1, C~_2)
/// evaluated on the unnormalized block, indices as printed (1-based).
inline ConcurrenceResult concurrence_xstate(const Matrix4cd& rho4) {
    const double off = xstate_off_pattern_magnitude(rho4);
    if (off > 1e-8)
        throw validation_error("concurrence_xstate: off-pattern magnitude " +
                               std::to_string(off) + " exceeds 1e-8 (not an X state)");
    auto pop = [&rho4](int i) { return std::max(0.0, rho4(i, i).real()); };
    ConcurrenceResult res;
    res.c1_tilde =
        2.0 * (std::sqrt(std::abs(rho4(1, 2) * rho4(2, 1))) - std::sqrt(pop(0) * pop(3)));
    res.c2_tilde =
        2.0 * (std::sqrt(std::abs(rho4(0, 3) * rho4(3, 0))) - std::sqrt(pop(1) * pop(2)));
    res.value = std::clamp(std::max({0.0, res.c1_tilde, res.c2_tilde}), 0.0, 1.0);
    res.path = ConcurrencePath::xstate;
    return res;
}

/// Concurrence of a pure qubit-pair state with amplitudes over
/// |00>, |01>, |10>, |11>: C = 2 |a1 a4 - a2 a3|.
inline double pure_state_concurrence(const std::array<complexd, 4>& amps) {
    return 2.0 * std::abs(amps[0] * amps[3] - amps[1] * amps[2]);
}

} // namespace entdyn
