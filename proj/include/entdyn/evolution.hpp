#pragma once

#include <unsupported/Eigen/MatrixFunctions>

#include <span>
#include <vector>

#include "entdyn/liouvillian.hpp"

namespace entdyn {

/// Time-ordered density-matrix snapshots of one run.
struct Trajectory {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
    /// Largest |rho - (rho + rho^dag)/2| removed when storing a snapshot.
    /// Anything above 1e-10 is treated as an integrator bug, not noise.
    double max_hermitization_correction = 0.0;
};

/// exp(t L) applied to vec(rho0), via Eigen's scaling-and-squaring Pade
/// exponential. Exact for the constant generator up to roundoff; no
/// re-normalization is applied.
inline DensityMatrix evolve_expm(const Superoperator& l, const DensityMatrix& rho0, double t) {
    if (rho0.dim() != l.dim())
        throw validation_error("evolve_expm: density matrix dimension mismatch");
    if (!(t >= 0.0)) throw validation_error("evolve_expm: t must be >= 0");
    if (t == 0.0) return rho0;
    const cmat prop = (t * l.matrix).exp();
    DensityMatrix out;
    out.n_max = rho0.n_max;
    out.rho = unvectorize(prop * vectorize(rho0.rho), l.dim());
    return out;
}

/// One-step propagator exp(dt L) for repeated application on a fixed grid.
inline cmat propagator(const Superoperator& l, double dt) {
    return (dt * l.matrix).exp();
}

namespace detail {

inline void rk4_step(const cmat& l, cvec& v, double dt) {
    const cvec k1 = l * v;
    const cvec k2 = l * (v + (0.5 * dt) * k1);
    const cvec k3 = l * (v + (0.5 * dt) * k2);
    const cvec k4 = l * (v + dt * k3);
    v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

} // namespace detail

/// Classical fixed-step RK4 over t_grid, taking substeps of size dt inside
/// each grid gap. Snapshots are re-hermitized before storage; the trace is
/// never re-normalized so that drift stays visible.
inline Trajectory integrate_rk(const Superoperator& l, const DensityMatrix& rho0,
                               std::span<const double> t_grid, double dt) {
    if (rho0.dim() != l.dim())
        throw validation_error("integrate_rk: density matrix dimension mismatch");
    if (t_grid.empty() || t_grid.front() != 0.0)
        throw validation_error("integrate_rk: time grid must start at 0");
    if (!(dt > 0.0)) throw validation_error("integrate_rk: dt must be > 0");

    Trajectory traj;
    traj.times.reserve(t_grid.size());
    traj.states.reserve(t_grid.size());
    traj.times.push_back(0.0);
    traj.states.push_back(rho0);

    cvec v = vectorize(rho0.rho);
    long total_steps = 0;
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        const double gap = t_grid[k] - t_grid[k - 1];
        if (!(gap > 0.0)) throw validation_error("integrate_rk: time grid must be increasing");
        const long nsub = std::lround(gap / dt);
        if (nsub < 1 || std::abs(nsub * dt - gap) > 1e-9 * std::max(1.0, gap))
            throw validation_error("integrate_rk: dt must divide the grid gaps");
        const double h = gap / static_cast<double>(nsub);
        for (long s = 0; s < nsub; ++s) {
            detail::rk4_step(l.matrix, v, h);
            ++total_steps;
            if (!v.allFinite())
                throw simulation_error("integrate_rk: non-finite state at step " +
                                       std::to_string(total_steps) + " (t ~ " +
                                       std::to_string(t_grid[k - 1] + (s + 1) * h) + ")");
        }
        cmat m = unvectorize(v, l.dim());
        cmat h_part = 0.5 * (m + m.adjoint());
        const double corr = (m - h_part).cwiseAbs().maxCoeff();
        traj.max_hermitization_correction = std::max(traj.max_hermitization_correction, corr);
        if (corr > 1e-10)
            throw simulation_error("integrate_rk: hermiticity drift " + std::to_string(corr) +
                                   " exceeds 1e-10 at t = " + std::to_string(t_grid[k]));
        DensityMatrix snap;
        snap.n_max = rho0.n_max;
        snap.rho = std::move(h_part);
        traj.times.push_back(t_grid[k]);
        traj.states.push_back(std::move(snap));
    }
    return traj;
}

} // namespace entdyn
