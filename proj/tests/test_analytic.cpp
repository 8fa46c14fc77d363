#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "entdyn/analytic.hpp"
#include "entdyn/io.hpp"

using namespace entdyn;

TEST_CASE("analytic constants and their algebra", "[analytic]") {
    const AnalyticParams vac = AnalyticParams::from_reservoir(ReservoirParams::identical(1.0, 0.0));
    REQUIRE(vac.a == 1.0);
    REQUIRE(vac.b == 1.0);
    REQUIRE(vac.m_abs == 0.0);

    for (double r : {0.05, 0.2, 0.6, 1.2}) {
        const AnalyticParams ap =
            AnalyticParams::from_reservoir(ReservoirParams::identical(1.0, r, 0.3));
        REQUIRE(ap.a >= 1.0);
        // b^2 - 1 = 8 N (N+1) = 8 |M|^2
        const double b2m1 = ap.b * ap.b - 1.0;
        REQUIRE(std::abs(b2m1 - 8.0 * ap.n_occ * (ap.n_occ + 1.0)) < 1e-12 * std::max(1.0, b2m1));
        REQUIRE(std::abs(b2m1 - 8.0 * ap.m_abs * ap.m_abs) < 1e-12 * std::max(1.0, b2m1));
    }

    ReservoirParams lopsided = ReservoirParams::identical(1.0, 0.2);
    lopsided.r_b = 0.3;
    REQUIRE_THROWS_AS(AnalyticParams::from_reservoir(lopsided), validation_error);
}

TEST_CASE("closed-form coherences at t = 0", "[analytic]") {
    const ReservoirParams p = ReservoirParams::identical(1.0, 0.2);
    const double alpha = 0.8;
    const XStateElements el = appendix_noon_elements(alpha, p, 0.0, true);
    const double amp = alpha * std::sqrt(1.0 - alpha * alpha);
    REQUIRE(el.rho32 == complexd(amp)); // cosh(0) e^0 = 1 exactly
    REQUIRE(el.rho14 == complexd(0.0)); // sinh(0) = 0 exactly
    REQUIRE(el.rho23() == std::conj(el.rho32));
    REQUIRE(el.rho41() == std::conj(el.rho14));
}

TEST_CASE("printed rho22 fails the initial condition in the vacuum limit", "[analytic]") {
    // direct evaluation of the printed expression at t = 0, r = 0:
    // a = b = 1, so rho22(0) = -(1/16) * 16 alpha^2 = -alpha^2.
    const XStateElements el =
        appendix_noon_elements(0.8, ReservoirParams::identical(1.0, 0.0), 0.0, true);
    REQUIRE(std::abs(el.rho22 + 0.64) < 1e-15);
    // the physical initial condition is +alpha^2; the sign flip is the
    // documented inconsistency of the printed populations
}

TEST_CASE("verbatim=false withholds the populations", "[analytic]") {
    const XStateElements el =
        appendix_noon_elements(0.5, ReservoirParams::identical(1.0, 0.3), 1.0, false);
    REQUIRE_FALSE(el.populations_valid);
    REQUIRE(std::abs(el.rho32) > 0.0);
}

TEST_CASE("closed-form coherence reference value at r = 0.2", "[analytic]") {
    // 0.5 cosh(|M| kappa t) e^{-a kappa t} at alpha = 1/sqrt(2), t = 1/kappa,
    // evaluated with 30-digit arithmetic offline
    const XStateElements el = appendix_noon_elements(
        1.0 / std::sqrt(2.0), ReservoirParams::identical(1.0, 0.2), 1.0, true);
    REQUIRE(std::abs(el.rho32.real() - 0.159717467652210198) < 1e-12);
    REQUIRE(el.rho32.imag() == 0.0);
}

TEST_CASE("effective coherence system: limits and identity with the printed pair",
          "[analytic]") {
    // vacuum: a = 1, M = 0 decouples to plain exponential decay
    const ReservoirParams vacuum = ReservoirParams::identical(1.0, 0.0);
    for (double t : {0.0, 0.5, 2.0}) {
        const auto [u, v] = effective_coherence_solution(0.7, vacuum, t);
        REQUIRE(std::abs(u - 0.7 * std::exp(-t)) < 1e-12);
        REQUIRE(std::abs(v) < 1e-15);
    }

    const ReservoirParams squeezed = ReservoirParams::identical(1.0, 0.2);
    const auto [u0, v0] = effective_coherence_solution(0.5, squeezed, 0.0);
    REQUIRE(std::abs(u0 - 0.5) < 1e-15);
    REQUIRE(std::abs(v0) < 1e-15);

    // closed-form vs closed-form: alpha sqrt(1-alpha^2) = 0.5 at alpha = 1/sqrt(2)
    const double alpha = 1.0 / std::sqrt(2.0);
    for (double t : {0.25, 1.0, 2.0, 4.0}) {
        const XStateElements el = appendix_noon_elements(alpha, squeezed, t, true);
        const auto [u, v] = effective_coherence_solution(0.5, squeezed, t);
        REQUIRE(std::abs(u - el.rho32) < 1e-12);
        REQUIRE(std::abs(v - el.rho14) < 1e-12);
    }
}

TEST_CASE("verbatim coherences satisfy the effective ODE pair", "[analytic]") {
    const double alpha = 0.6;
    for (double r : {0.1, 0.2, 0.5}) {
        const ReservoirParams p = ReservoirParams::identical(1.0, r);
        const AnalyticParams ap = AnalyticParams::from_reservoir(p);
        const double h = 1e-5;
        for (double t : {0.3, 1.0, 2.5}) {
            auto el = [&](double tt) { return appendix_noon_elements(alpha, p, tt, true); };
            const complexd du =
                (el(t + h).rho32 - el(t - h).rho32) / (2.0 * h);
            const complexd dv =
                (el(t + h).rho14 - el(t - h).rho14) / (2.0 * h);
            const XStateElements mid = el(t);
            const complexd rhs_u = -ap.a * ap.kappa * mid.rho32 -
                                   ap.kappa * std::conj(ap.m) * mid.rho14;
            const complexd rhs_v = -ap.a * ap.kappa * mid.rho14 - ap.kappa * ap.m * mid.rho32;
            REQUIRE(std::abs(du - rhs_u) < 1e-6);
            REQUIRE(std::abs(dv - rhs_v) < 1e-6);
        }
    }
}

TEST_CASE("coherence sign structure for real positive M", "[analytic]") {
    const ReservoirParams p = ReservoirParams::identical(1.0, 0.3, 0.0);
    for (double t : {0.0, 0.1, 0.7, 2.0, 6.0}) {
        const XStateElements el = appendix_noon_elements(0.4, p, t, true);
        REQUIRE(el.rho14.real() * el.rho32.real() <= 0.0);
        REQUIRE(std::abs(el.rho14.imag()) == 0.0);
    }
}

TEST_CASE("vacuum limit of the closed-form coherences", "[analytic]") {
    const ReservoirParams vacuum = ReservoirParams::identical(1.0, 0.0);
    const double alpha = 0.35;
    const double amp = alpha * std::sqrt(1.0 - alpha * alpha);
    for (double t : {0.0, 0.4, 1.3, 5.0}) {
        const XStateElements el = appendix_noon_elements(alpha, vacuum, t, true);
        REQUIRE(el.rho14 == complexd(0.0));
        REQUIRE(std::abs(el.rho32.real() - amp * std::exp(-t)) < 1e-15);
    }
}

TEST_CASE("vacuum NOON concurrence closed form", "[analytic]") {
    REQUIRE(std::abs(vacuum_noon_concurrence(1.0 / std::sqrt(2.0), 1.0, 0.0) - 1.0) < 1e-15);
    REQUIRE(vacuum_noon_concurrence(0.0, 1.0, 2.0) == 0.0);
    REQUIRE(vacuum_noon_concurrence(1.0, 1.0, 2.0) == 0.0);
    // e^{-1} at the symmetric point, matching the numerical engine
    const double c1 = vacuum_noon_concurrence(1.0 / std::sqrt(2.0), 1.0, 1.0);
    REQUIRE(std::abs(c1 - 0.367879441171442) < 1e-12);

    const ModeOperators ops = build_mode_operators(1);
    const Superoperator l = build_liouvillian(ReservoirParams::identical(1.0, 0.0), ops);
    const DensityMatrix rho0 = make_initial_density(InitialState::noon(1.0 / std::sqrt(2.0)), 1);
    const DensityMatrix rho1 = evolve_expm(l, rho0, 1.0);
    const double numeric = concurrence_xstate(extract_qubit_block(rho1).rho).value;
    REQUIRE(std::abs(numeric - c1) < 1e-8);
}

TEST_CASE("consistency report: vacuum agreement and t0 findings", "[analytic]") {
    const double alpha = 0.8;
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(0.25 * i);

    const ConsistencyReport vac = consistency_report(alpha, ReservoirParams::identical(1.0, 0.0), grid);
    for (const auto& dev : vac.max_abs_deviation) {
        REQUIRE(dev.rho14 < 1e-8); // both routes give exactly zero
        REQUIRE(dev.rho32 < 1e-8); // both reduce to amp * e^{-kappa t}
    }
    // the printed rho22 misses the initial condition by 2 alpha^2
    bool found = false;
    for (const auto& v : vac.t0_violations) {
        if (v.element == "rho22") {
            found = true;
            REQUIRE(std::abs(v.deviation - 2.0 * alpha * alpha) < 1e-9);
        }
    }
    REQUIRE(found);

    // deterministic: identical inputs, byte-identical serialized report
    const ConsistencyReport again =
        consistency_report(alpha, ReservoirParams::identical(1.0, 0.0), grid);
    REQUIRE(io::consistency_report_json(vac).dump() == io::consistency_report_json(again).dump());

    ReservoirParams lopsided = ReservoirParams::identical(1.0, 0.2);
    lopsided.kappa_b = 2.0;
    REQUIRE_THROWS_AS(consistency_report(alpha, lopsided, grid), validation_error);
}

TEST_CASE("consistency report flags population deviations at r > 0", "[analytic]") {
    std::vector<double> grid{0.0, 0.5, 1.0};
    const ConsistencyReport rep =
        consistency_report(1.0 / std::sqrt(2.0), ReservoirParams::identical(1.0, 0.2), grid);
    REQUIRE_FALSE(rep.t0_violations.empty());
    // populations disagree grossly; the trusted outputs are the coherences
    REQUIRE(rep.max_abs_deviation[0].rho22 > 0.1);
}
