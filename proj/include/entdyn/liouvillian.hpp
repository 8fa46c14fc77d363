#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "entdyn/model.hpp"

namespace entdyn {

/// Truncated annihilation operator on a single mode: a|n> = sqrt(n)|n-1>,
/// a|0> = 0, and the (n_max)->(n_max+1) raising element dropped entirely.
inline cmat single_mode_annihilation(int n_max) {
    if (n_max < 1) throw validation_error("mode operators: n_max must be >= 1");
    cmat a = cmat::Zero(n_max + 1, n_max + 1);
    for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

/// Annihilation operators of both modes on the full tensor space,
/// a_A = a (x) 1 and a_B = 1 (x) a with n_A as the outer index.
struct ModeOperators {
    int n_max = 1;
    cmat a_a;
    cmat a_b;

    int dim() const { return (n_max + 1) * (n_max + 1); }
};

inline ModeOperators build_mode_operators(int n_max) {
    const cmat a = single_mode_annihilation(n_max);
    const cmat id = cmat::Identity(n_max + 1, n_max + 1);
    ModeOperators ops;
    ops.n_max = n_max;
    ops.a_a = Eigen::kroneckerProduct(a, id);
    ops.a_b = Eigen::kroneckerProduct(id, a);
    return ops;
}

// Column-stacking vectorization: vec(rho)(j*D + i) = rho(i, j). This
// convention is fixed project-wide; vec(A rho B) = (B^T (x) A) vec(rho).
inline cvec vectorize(const cmat& m) {
    return Eigen::Map<const cvec>(m.data(), m.size());
}

inline cmat unvectorize(const cvec& v, int d) {
    if (v.size() != static_cast<Eigen::Index>(d) * d)
        throw validation_error("unvectorize: length does not match dimension");
    return Eigen::Map<const cmat>(v.data(), d, d);
}

namespace detail {

// Superoperator for rho -> P Q rho - 2 Q rho P + rho P Q, the shape shared
// by all four dissipator groups of the master equation.
inline cmat group_superop(const cmat& p, const cmat& q) {
    const int d = static_cast<int>(p.rows());
    const cmat id = cmat::Identity(d, d);
    const cmat pq = p * q;
    return Eigen::kroneckerProduct(id, pq) - 2.0 * Eigen::kroneckerProduct(p.transpose(), q) +
           Eigen::kroneckerProduct(pq.transpose(), id);
}

// Same map evaluated directly on a matrix.
inline cmat group_apply(const cmat& p, const cmat& q, const cmat& rho) {
    return p * q * rho - 2.0 * q * rho * p + rho * p * q;
}

// One cavity's generator groups, assembled via `term` (either of the two
// encodings above with p, q bound).
template <typename Term>
void for_each_group(double kappa, double n, complexd m, const cmat& a, Term&& term) {
    const cmat ad = a.adjoint();
    term(complexd(-0.5 * kappa * (n + 1.0)), ad, a);  // (N+1): a^dag a rho - 2 a rho a^dag + ...
    term(complexd(-0.5 * kappa * n), a, ad);          // N:     a a^dag rho - 2 a^dag rho a + ...
    term(complexd(0.5 * kappa) * m, a, a);            // M:     a a rho - 2 a rho a + rho a a
    term(complexd(0.5 * kappa) * std::conj(m), ad, ad); // M^*
}

} // namespace detail

/// Dense matrix of the master-equation generator acting on column-stacked
/// density matrices. Immutable once built; apply() and the stored operator
/// data expose the two redundant encodings of the same linear map.
struct Superoperator {
    ReservoirParams params;
    ModeOperators ops;
    cmat matrix; // D^2 x D^2

    int n_max() const { return ops.n_max; }
    int dim() const { return ops.dim(); }

    /// unvec(matrix * vec(rho)) — the vectorized route.
    cmat apply(const cmat& rho) const {
        if (rho.rows() != dim() || rho.cols() != dim())
            throw validation_error("superoperator: density matrix dimension mismatch");
        return unvectorize(matrix * vectorize(rho), dim());
    }
};

/// Assemble the generator: per cavity j, the (N+1), N, M and M^* dissipator
/// groups with rates kappa_j/2, summed over j = A, B.
inline Superoperator build_liouvillian(const ReservoirParams& params, const ModeOperators& ops) {
    params.validate();
    if (ops.n_max < 1 || ops.a_a.rows() != ops.dim() || ops.a_b.rows() != ops.dim())
        throw validation_error("build_liouvillian: inconsistent mode operators");
    const BathNumbers bn = derived_bath_numbers(params);
    const int d2 = ops.dim() * ops.dim();
    cmat l = cmat::Zero(d2, d2);
    auto accumulate = [&l](complexd coeff, const cmat& p, const cmat& q) {
        l += coeff * detail::group_superop(p, q);
    };
    detail::for_each_group(params.kappa_a, bn.n_a, bn.m_a, ops.a_a, accumulate);
    detail::for_each_group(params.kappa_b, bn.n_b, bn.m_b, ops.a_b, accumulate);
    Superoperator sup;
    sup.params = params;
    sup.ops = ops;
    sup.matrix = std::move(l);
    return sup;
}

/// Right side of the master equation evaluated directly with matrix
/// products, never through the vectorized matrix. Kept deliberately
/// redundant with Superoperator::apply as a self-check path.
inline cmat apply_rhs(const Superoperator& l, const DensityMatrix& rho) {
    if (rho.dim() != l.dim() || rho.rho.rows() != l.dim())
        throw validation_error("apply_rhs: density matrix dimension mismatch");
    const BathNumbers bn = derived_bath_numbers(l.params);
    cmat out = cmat::Zero(l.dim(), l.dim());
    auto accumulate = [&out, &rho](complexd coeff, const cmat& p, const cmat& q) {
        out += coeff * detail::group_apply(p, q, rho.rho);
    };
    detail::for_each_group(l.params.kappa_a, bn.n_a, bn.m_a, l.ops.a_a, accumulate);
    detail::for_each_group(l.params.kappa_b, bn.n_b, bn.m_b, l.ops.a_b, accumulate);
    return out;
}

} // namespace entdyn
