#pragma once

#include <span>
#include <string>
#include <vector>

#include "entdyn/concurrence.hpp"
#include "entdyn/evolution.hpp"

namespace entdyn {

/// Shorthand constants of the closed-form NOON solution for identical
/// cavities: a = 4N + 1 and b^2 = 8N^2 + 8N + 1, so b^2 - 1 = 8|M|^2.
struct AnalyticParams {
    double n_occ = 0.0;
    double a = 1.0;
    double b = 1.0;
    double m_abs = 0.0;
    complexd m{0.0, 0.0};
    double kappa = 1.0;

    static AnalyticParams from_reservoir(const ReservoirParams& p) {
        p.validate();
        if (!p.is_identical())
            throw validation_error("analytic: closed forms require identical cavities");
        const BathNumbers bn = derived_bath_numbers(p);
        AnalyticParams ap;
        ap.n_occ = bn.n_a;
        ap.a = 4.0 * bn.n_a + 1.0;
        ap.b = std::sqrt(8.0 * bn.n_a * bn.n_a + 8.0 * bn.n_a + 1.0);
        ap.m = bn.m_a;
        ap.m_abs = std::abs(bn.m_a);
        ap.kappa = p.kappa_a;
        return ap;
    }
};

/// One time slice of an X-shaped density matrix. rho41 and rho23 follow by
/// conjugation; everything off the X pattern is zero.
struct XStateElements {
    double t = 0.0;
    double rho11 = 0.0;
    double rho22 = 0.0;
    double rho33 = 0.0;
    double rho44 = 0.0;
    bool populations_valid = true;
    complexd rho14{0.0, 0.0};
    complexd rho32{0.0, 0.0};

    complexd rho41() const { return std::conj(rho14); }
    complexd rho23() const { return std::conj(rho32); }
};

/// The closed-form NOON solution exactly as printed, for identical
/// cavities. The printed population formulas fail t = 0 sanity checks
/// (e.g. rho22(0) = -alpha^2 in the vacuum limit), so they are only
/// returned with verbatim = true; with verbatim = false the populations
/// are marked unavailable and only the coherences — which do pass all
/// sanity checks — are filled in.
inline XStateElements appendix_noon_elements(double alpha, const ReservoirParams& params,
                                             double t, bool verbatim) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw validation_error("appendix_noon_elements: alpha must lie in [0, 1]");
    const AnalyticParams ap = AnalyticParams::from_reservoir(params);
    const double a = ap.a;
    const double b = ap.b;
    const double b2 = b * b;
    const double kt = ap.kappa * t;
    const double decay = std::exp(-a * kt);
    const double amp = alpha * std::sqrt(1.0 - alpha * alpha);

    XStateElements el;
    el.t = t;
    if (verbatim) {
        el.rho11 = -(a + 3.0) / (8.0 * b2) *
                   (1.0 + a + 2.0 * std::sinh(b * kt) - (1.0 + a) / b * std::cosh(b * kt)) *
                   decay;
        el.rho22 = -1.0 / 16.0 *
                   ((16.0 * alpha * alpha + 4.0 / b2 - 4.0) +
                    (1.0 - 1.0 / b2) * std::cosh(b * kt)) *
                   decay;
        el.rho33 = 1.0 / 16.0 *
                   ((-16.0 * alpha * alpha + 4.0 / b2 + 12.0) +
                    (1.0 - 1.0 / b2) * std::cosh(b * kt)) *
                   decay;
        el.rho44 = 1.0 / (8.0 * b2) *
                   (a * a - 1.0 +
                    0.25 * (a - 1.0) *
                        (2.0 * b * std::sinh(b * kt) - (a + 1.0) * std::cosh(b * kt))) *
                   decay;
        el.populations_valid = true;
    } else {
        el.populations_valid = false;
    }
    // sinh(|M| kt) = 0 at M = 0 removes the M/|M| phase singularity.
    el.rho14 = (ap.m_abs == 0.0)
                   ? complexd(0.0)
                   : -(ap.m / ap.m_abs) * amp * std::sinh(ap.m_abs * kt) * decay;
    el.rho32 = amp * std::cosh(ap.m_abs * kt) * decay;
    return el;
}

/// Coherence pair (rho32, rho14) as the solution of the constant-coefficient
/// system u' = -a k u - k M^* v, v' = -a k v - k M u with u(0) = u0,
/// v(0) = 0 — the unique linear system solved by the printed cosh/sinh
/// pair (for real M it is the plain symmetric coupling). Evaluated through
/// a 2x2 matrix exponential, independent of the hyperbolic closed form.
inline std::pair<complexd, complexd> effective_coherence_solution(double u0,
                                                                  const ReservoirParams& params,
                                                                  double t) {
    const AnalyticParams ap = AnalyticParams::from_reservoir(params);
    Eigen::Matrix2cd gen;
    gen << complexd(-ap.a * ap.kappa), -ap.kappa * std::conj(ap.m),
        -ap.kappa * ap.m, complexd(-ap.a * ap.kappa);
    const Eigen::Matrix2cd prop = (t * gen).exp();
    Eigen::Vector2cd uv = prop * Eigen::Vector2cd(complexd(u0), complexd(0.0));
    return {uv(0), uv(1)};
}

/// Vacuum-limit NOON concurrence at qubit truncation:
/// C(t) = 2 alpha sqrt(1 - alpha^2) e^{-kappa t}. The vacuum bath never
/// populates |1_A 1_B> from a NOON state, so C = 2 rho23 exactly.
inline double vacuum_noon_concurrence(double alpha, double kappa, double t) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw validation_error("vacuum_noon_concurrence: alpha must lie in [0, 1]");
    return 2.0 * alpha * std::sqrt(1.0 - alpha * alpha) * std::exp(-kappa * t);
}

/// Audit of the printed closed forms against the numerical engine.
/// Disagreement is a finding, never a failure: the report tabulates, does
/// not throw.
struct ConsistencyReport {
    double alpha = 0.0;
    ReservoirParams reservoir;
    std::vector<double> times;
    std::vector<int> cutoffs;

    std::vector<XStateElements> verbatim;                // per time
    std::vector<std::vector<XStateElements>> numerical;  // [cutoff][time]

    struct Deviations {
        double rho11 = 0.0, rho22 = 0.0, rho33 = 0.0, rho44 = 0.0;
        double rho14 = 0.0, rho32 = 0.0;
    };
    std::vector<Deviations> max_abs_deviation; // per cutoff

    struct T0Violation {
        std::string element;
        double printed = 0.0;
        double expected = 0.0;
        double deviation = 0.0;
    };
    std::vector<T0Violation> t0_violations;
};

inline ConsistencyReport consistency_report(double alpha, const ReservoirParams& params,
                                            std::span<const double> t_grid) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw validation_error("consistency_report: alpha must lie in [0, 1]");
    if (!params.is_identical())
        throw validation_error("consistency_report: requires identical cavities");

    ConsistencyReport rep;
    rep.alpha = alpha;
    rep.reservoir = params;
    rep.times.assign(t_grid.begin(), t_grid.end());
    rep.cutoffs = {1, 2, 3};

    rep.verbatim.reserve(rep.times.size());
    for (double t : rep.times)
        rep.verbatim.push_back(appendix_noon_elements(alpha, params, t, /*verbatim=*/true));

    const InitialState noon = InitialState::noon(alpha);
    for (int n_max : rep.cutoffs) {
        const ModeOperators ops = build_mode_operators(n_max);
        const Superoperator l = build_liouvillian(params, ops);
        const DensityMatrix rho0 = make_initial_density(noon, n_max);
        std::vector<XStateElements> column;
        column.reserve(rep.times.size());
        ConsistencyReport::Deviations dev;
        for (std::size_t k = 0; k < rep.times.size(); ++k) {
            const DensityMatrix rho_t = evolve_expm(l, rho0, rep.times[k]);
            const QubitBlock block = extract_qubit_block(rho_t);
            XStateElements el;
            el.t = rep.times[k];
            el.rho11 = block.rho(0, 0).real();
            el.rho22 = block.rho(1, 1).real();
            el.rho33 = block.rho(2, 2).real();
            el.rho44 = block.rho(3, 3).real();
            el.rho14 = block.rho(0, 3);
            el.rho32 = block.rho(2, 1);
            const XStateElements& v = rep.verbatim[k];
            dev.rho11 = std::max(dev.rho11, std::abs(el.rho11 - v.rho11));
            dev.rho22 = std::max(dev.rho22, std::abs(el.rho22 - v.rho22));
            dev.rho33 = std::max(dev.rho33, std::abs(el.rho33 - v.rho33));
            dev.rho44 = std::max(dev.rho44, std::abs(el.rho44 - v.rho44));
            dev.rho14 = std::max(dev.rho14, std::abs(el.rho14 - v.rho14));
            dev.rho32 = std::max(dev.rho32, std::abs(el.rho32 - v.rho32));
            column.push_back(el);
        }
        rep.numerical.push_back(std::move(column));
        rep.max_abs_deviation.push_back(dev);
    }

    // The printed formulas against the exact initial condition at t = 0,
    // independent of the requested grid.
    const XStateElements at0 = appendix_noon_elements(alpha, params, 0.0, /*verbatim=*/true);
    const double amp = alpha * std::sqrt(1.0 - alpha * alpha);
    const std::array<std::pair<std::string, std::pair<double, double>>, 6> checks = {{
        {"rho11", {at0.rho11, 0.0}},
        {"rho22", {at0.rho22, alpha * alpha}},
        {"rho33", {at0.rho33, 1.0 - alpha * alpha}},
        {"rho44", {at0.rho44, 0.0}},
        {"rho14", {std::abs(at0.rho14), 0.0}},
        {"rho32", {at0.rho32.real(), amp}},
    }};
    for (const auto& [name, pe] : checks) {
        const double deviation = std::abs(pe.first - pe.second);
        if (deviation > 1e-9)
            rep.t0_violations.push_back({name, pe.first, pe.second, deviation});
    }
    return rep;
}

} // namespace entdyn
