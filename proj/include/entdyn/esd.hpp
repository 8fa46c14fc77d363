#pragma once

#include <future>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entdyn/analytic.hpp"
#include "entdyn/concurrence.hpp"
#include "entdyn/evolution.hpp"

namespace entdyn {

/// One trajectory sample: concurrence, the X-pattern elements of the qubit
/// block, and the physicality diagnostics of the full-space state.
/// c1_tilde/c2_tilde are NaN when the block is genuinely not X-shaped
/// (possible only for general initial states).
struct TrajectorySample {
    double t = 0.0;
    double c = 0.0;
    double c1_tilde = 0.0;
    double c2_tilde = 0.0;
    double rho11 = 0.0, rho22 = 0.0, rho33 = 0.0, rho44 = 0.0;
    complexd rho14{0.0, 0.0};
    complexd rho23{0.0, 0.0};
    double trace = 0.0;
    double min_eig = 0.0;
    double leaked_weight = 0.0;
};

struct ConcurrenceTrajectory {
    SimulationConfig config;
    std::vector<TrajectorySample> samples;
};

namespace detail {

// Concurrence of one snapshot with the dual-path cross-check: the X-state
// closed form is the reported value whenever the block is X-shaped, the
// general eigenvalue route must agree with it to 1e-9. For Noon/Epr initial
// states a non-X block is an engine bug; general initial states may leave
// the X sector legitimately, in which case only the general route applies.
struct ConcurrenceEval {
    double c = 0.0;
    double c1_tilde = std::numeric_limits<double>::quiet_NaN();
    double c2_tilde = std::numeric_limits<double>::quiet_NaN();
};

inline ConcurrenceEval evaluate_concurrence(const Matrix4cd& block, InitialState::Kind kind,
                                            double t) {
    const ConcurrenceResult general = concurrence_general(block);
    const double off = xstate_off_pattern_magnitude(block);
    ConcurrenceEval eval;
    if (off <= 1e-8) {
        const ConcurrenceResult x = concurrence_xstate(block);
        if (std::abs(general.value - x.value) > 1e-9)
            throw simulation_error(
                "concurrence_trajectory: general and X-state paths disagree by " +
                std::to_string(std::abs(general.value - x.value)) + " at t = " +
                std::to_string(t));
        eval.c = x.value;
        eval.c1_tilde = x.c1_tilde;
        eval.c2_tilde = x.c2_tilde;
    } else if (kind == InitialState::Kind::general) {
        eval.c = general.value;
    } else {
        throw simulation_error("concurrence_trajectory: X-form violated (off-pattern " +
                               std::to_string(off) + ") at t = " + std::to_string(t) +
                               " for a Noon/Epr initial state — engine bug");
    }
    return eval;
}

inline TrajectorySample make_sample(const DensityMatrix& rho, double t,
                                    InitialState::Kind kind) {
    const QubitBlock block = extract_qubit_block(rho);
    const ConcurrenceEval eval = evaluate_concurrence(block.rho, kind, t);
    TrajectorySample s;
    s.t = t;
    s.c = eval.c;
    s.c1_tilde = eval.c1_tilde;
    s.c2_tilde = eval.c2_tilde;
    s.rho11 = block.rho(0, 0).real();
    s.rho22 = block.rho(1, 1).real();
    s.rho33 = block.rho(2, 2).real();
    s.rho44 = block.rho(3, 3).real();
    s.rho14 = block.rho(0, 3);
    s.rho23 = block.rho(1, 2);
    s.trace = rho.rho.trace().real();
    s.min_eig = rho.min_eigenvalue();
    s.leaked_weight = block.leaked_weight;
    return s;
}

inline DensityMatrix hermitized(cmat m, int n_max) {
    DensityMatrix d;
    d.n_max = n_max;
    d.rho = 0.5 * (m + m.adjoint());
    return d;
}

} // namespace detail

/// Concurrence along the whole run, propagated by matrix exponential at the
/// sample points t_k = k dt.
inline ConcurrenceTrajectory concurrence_trajectory(const SimulationConfig& config) {
    config.validate();
    const ModeOperators ops = build_mode_operators(config.n_max);
    const Superoperator l = build_liouvillian(config.reservoir, ops);
    const DensityMatrix rho0 = make_initial_density(config.initial, config.n_max);
    const long n_steps = static_cast<long>(std::floor(config.t_max / config.dt + 1e-9));
    const cmat step = propagator(l, config.dt);

    ConcurrenceTrajectory traj;
    traj.config = config;
    traj.samples.reserve(n_steps + 1);
    cvec v = vectorize(rho0.rho);
    for (long k = 0; k <= n_steps; ++k) {
        const double t = k * config.dt;
        const DensityMatrix rho = detail::hermitized(unvectorize(v, l.dim()), config.n_max);
        traj.samples.push_back(detail::make_sample(rho, t, config.initial.kind));
        if (k < n_steps) {
            v = step * v;
            if (!v.allFinite())
                throw simulation_error("concurrence_trajectory: non-finite state at t = " +
                                       std::to_string((k + 1) * config.dt));
        }
    }
    return traj;
}

enum class TerminalState { dead, alive_at_horizon };

inline std::string to_string(TerminalState s) {
    return s == TerminalState::dead ? "dead" : "alive-at-horizon";
}

/// Zero intervals of the concurrence trajectory. Death and revival times
/// interleave starting with a death; a trajectory that is already dead at
/// its first sample reports that sample's time.
struct EsdReport {
    std::vector<double> death_times;
    std::vector<double> revival_times;
    TerminalState terminal_state = TerminalState::alive_at_horizon;
    double epsilon = 0.0;
    double t_max = 0.0;
};

namespace detail {

class ConcurrenceProbe {
public:
    explicit ConcurrenceProbe(const SimulationConfig& config)
        : liouvillian_(build_liouvillian(config.reservoir, build_mode_operators(config.n_max))),
          rho0_(make_initial_density(config.initial, config.n_max)),
          kind_(config.initial.kind) {}

    double operator()(double t) const {
        const DensityMatrix rho_t = evolve_expm(liouvillian_, rho0_, t);
        const DensityMatrix h = hermitized(rho_t.rho, rho_t.n_max);
        return evaluate_concurrence(extract_qubit_block(h).rho, kind_, t).c;
    }

private:
    Superoperator liouvillian_;
    DensityMatrix rho0_;
    InitialState::Kind kind_;
};

// Bisect the epsilon-crossing inside [lo, hi] to width 1e-4 (in units of
// 1/kappa). `dying` selects the crossing direction.
inline double refine_crossing(const ConcurrenceProbe& probe, double lo, double hi,
                              double epsilon, bool dying) {
    while (hi - lo > 1e-4) {
        const double mid = 0.5 * (lo + hi);
        const bool above = probe(mid) > epsilon;
        if (above == dying)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

/// Detect threshold crossings of C(t); crossing times are refined by
/// bisection on freshly evolved states, never interpolated. Two
/// resolution guards reject under-sampled trajectories with an error that
/// tells the caller to shrink dt: (1) an excursion fully between two
/// transitions must span at least two samples, and (2) a sampled local
/// minimum inside (epsilon, 10 epsilon] whose refined true minimum dips to
/// or below epsilon means sampling missed a zero interval.
inline EsdReport detect_esd(const ConcurrenceTrajectory& traj, double epsilon) {
    if (!(epsilon > 0.0)) throw validation_error("detect_esd: epsilon must be > 0");
    if (traj.samples.size() < 2)
        throw validation_error("detect_esd: trajectory needs at least two samples");

    const auto& s = traj.samples;
    const std::size_t n = s.size();
    std::vector<char> below(n);
    for (std::size_t i = 0; i < n; ++i) below[i] = s[i].c <= epsilon;

    // Guard (1): interior runs of length one are unresolvable events.
    std::size_t run_start = 0;
    std::size_t transitions_seen = 0;
    for (std::size_t i = 1; i <= n; ++i) {
        if (i == n || below[i] != below[i - 1]) {
            const std::size_t run_len = i - run_start;
            const bool interior = run_start > 0 && i < n;
            if (interior && run_len < 2)
                throw simulation_error(
                    "detect_esd: a zero/alive interval spans a single sample near t = " +
                    std::to_string(s[run_start].t) +
                    "; the trajectory is under-resolved, shrink dt");
            if (i < n) ++transitions_seen;
            run_start = i;
        }
    }

    std::optional<detail::ConcurrenceProbe> probe;
    auto ensure_probe = [&]() -> const detail::ConcurrenceProbe& {
        if (!probe) probe.emplace(traj.config);
        return *probe;
    };

    // Guard (2): near-miss dips that could hide a sub-sample zero interval.
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (below[i]) continue;
        if (s[i].c <= s[i - 1].c && s[i].c <= s[i + 1].c && s[i].c <= 10.0 * epsilon) {
            double lo = s[i - 1].t, hi = s[i + 1].t;
            const auto& c_of = ensure_probe();
            while (hi - lo > 1e-4) { // golden-free ternary search on the smooth dip
                const double m1 = lo + (hi - lo) / 3.0;
                const double m2 = hi - (hi - lo) / 3.0;
                if (c_of(m1) < c_of(m2))
                    hi = m2;
                else
                    lo = m1;
            }
            if (c_of(0.5 * (lo + hi)) <= epsilon)
                throw simulation_error(
                    "detect_esd: concurrence dips below epsilon between samples near t = " +
                    std::to_string(s[i].t) + "; the trajectory is under-resolved, shrink dt");
        }
    }

    EsdReport rep;
    rep.epsilon = epsilon;
    rep.t_max = traj.config.t_max;
    if (below[0]) rep.death_times.push_back(s[0].t);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (below[i] == below[i + 1]) continue;
        const bool dying = !below[i];
        const double refined =
            detail::refine_crossing(ensure_probe(), s[i].t, s[i + 1].t, epsilon, dying);
        if (dying)
            rep.death_times.push_back(refined);
        else
            rep.revival_times.push_back(refined);
    }
    rep.terminal_state = below[n - 1] ? TerminalState::dead : TerminalState::alive_at_horizon;
    return rep;
}

enum class SweepAxis { alpha, r, theta };

inline std::string to_string(SweepAxis a) {
    switch (a) {
    case SweepAxis::alpha: return "alpha";
    case SweepAxis::r: return "r";
    case SweepAxis::theta: return "theta";
    }
    return "?";
}

/// One sweep row; `error` is empty on success and carries the failure
/// message otherwise (a failed row never aborts the sweep).
struct SweepRow {
    double value = 0.0;
    EsdReport report;
    ConcurrenceTrajectory trajectory;
    std::string error;
};

namespace detail {

inline SimulationConfig with_axis_value(SimulationConfig config, SweepAxis axis, double value) {
    if (!std::isfinite(value)) throw validation_error("sweep: values must be finite");
    switch (axis) {
    case SweepAxis::alpha:
        if (config.initial.kind == InitialState::Kind::general)
            throw validation_error("sweep: the alpha axis requires a noon or epr initial state");
        if (!(value >= 0.0 && value <= 1.0))
            throw validation_error("sweep: alpha must lie in [0, 1]");
        config.initial.alpha = value;
        break;
    case SweepAxis::r:
        if (!(value >= 0.0)) throw validation_error("sweep: r must be >= 0");
        config.reservoir.r_a = config.reservoir.r_b = value;
        break;
    case SweepAxis::theta:
        config.reservoir.theta_a = config.reservoir.theta_b = value;
        break;
    }
    return config;
}

} // namespace detail

/// Independent runs over one parameter axis. Rows execute concurrently and
/// are returned in input order.
inline std::vector<SweepRow> sweep(const SimulationConfig& base, SweepAxis axis,
                                   std::span<const double> values) {
    base.validate();
    std::vector<std::future<SweepRow>> futures;
    futures.reserve(values.size());
    for (double value : values) {
        futures.push_back(std::async(std::launch::async, [base, axis, value]() {
            SweepRow row;
            row.value = value;
            try {
                const SimulationConfig config = detail::with_axis_value(base, axis, value);
                row.trajectory = concurrence_trajectory(config);
                row.report = detect_esd(row.trajectory, config.esd_epsilon);
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            return row;
        }));
    }
    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (auto& f : futures) rows.push_back(f.get());
    return rows;
}

} // namespace entdyn
