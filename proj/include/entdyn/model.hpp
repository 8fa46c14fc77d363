#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>

#include "entdyn/error.hpp"

namespace entdyn {

using complexd = std::complex<double>;
using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;

/// Occupation N = sinh^2(r) and two-photon correlation
/// M = cosh(r) sinh(r) e^{-i theta} of each squeezed bath.
struct BathNumbers {
    double n_a = 0.0;
    double n_b = 0.0;
    complexd m_a{0.0, 0.0};
    complexd m_b{0.0, 0.0};
};

/// Broadband squeezed-vacuum reservoir seen by each cavity. N and M are
/// always derived from (r, theta), so |M|^2 = N(N+1) holds identically;
/// r = 0 reduces to the plain vacuum bath.
struct ReservoirParams {
    double kappa_a = 1.0; ///< cavity A decay rate, > 0
    double kappa_b = 1.0; ///< cavity B decay rate, > 0
    double r_a = 0.0;     ///< cavity A squeeze parameter, >= 0
    double r_b = 0.0;     ///< cavity B squeeze parameter, >= 0
    double theta_a = 0.0; ///< cavity A squeezing reference phase
    double theta_b = 0.0; ///< cavity B squeezing reference phase

    static ReservoirParams identical(double kappa, double r, double theta = 0.0) {
        ReservoirParams p;
        p.kappa_a = p.kappa_b = kappa;
        p.r_a = p.r_b = r;
        p.theta_a = p.theta_b = theta;
        return p;
    }

    bool is_identical(double tol = 1e-12) const {
        return std::abs(kappa_a - kappa_b) <= tol && std::abs(r_a - r_b) <= tol &&
               std::abs(theta_a - theta_b) <= tol;
    }

    // kappa = 0 is allowed here so a single-cavity generator can be formed
    // by switching the other cavity off; a full simulation requires > 0
    // (enforced by SimulationConfig).
    void validate() const {
        if (!(kappa_a >= 0.0) || !(kappa_b >= 0.0))
            throw validation_error("reservoir: decay rates kappa must be >= 0");
        if (!(r_a >= 0.0) || !(r_b >= 0.0))
            throw validation_error("reservoir: squeeze parameters r must be >= 0");
        if (!std::isfinite(theta_a) || !std::isfinite(theta_b))
            throw validation_error("reservoir: phases theta must be finite");
    }
};

inline BathNumbers derived_bath_numbers(const ReservoirParams& p) {
    p.validate();
    BathNumbers n;
    n.n_a = std::sinh(p.r_a) * std::sinh(p.r_a);
    n.n_b = std::sinh(p.r_b) * std::sinh(p.r_b);
    n.m_a = std::cosh(p.r_a) * std::sinh(p.r_a) * std::exp(complexd(0.0, -p.theta_a));
    n.m_b = std::cosh(p.r_b) * std::sinh(p.r_b) * std::exp(complexd(0.0, -p.theta_b));
    return n;
}

/// Pure two-mode initial state. Noon and Epr carry a single real amplitude
/// alpha in [0, 1]:
///   Noon: alpha |0_A 1_B> + sqrt(1 - alpha^2) |1_A 0_B>
///   Epr:  alpha |0_A 0_B> + sqrt(1 - alpha^2) |1_A 1_B>
/// General carries four complex amplitudes over |00>, |01>, |10>, |11>.
struct InitialState {
    enum class Kind { noon, epr, general };

    Kind kind = Kind::noon;
    double alpha = 0.0;
    std::array<complexd, 4> amps{};

    static InitialState noon(double alpha) {
        InitialState s;
        s.kind = Kind::noon;
        s.alpha = alpha;
        s.validate();
        return s;
    }

    static InitialState epr(double alpha) {
        InitialState s;
        s.kind = Kind::epr;
        s.alpha = alpha;
        s.validate();
        return s;
    }

    static InitialState general(const std::array<complexd, 4>& amps) {
        InitialState s;
        s.kind = Kind::general;
        s.amps = amps;
        s.validate();
        return s;
    }

    /// Amplitudes over the qubit basis |0_A 0_B>, |0_A 1_B>, |1_A 0_B>, |1_A 1_B>.
    std::array<complexd, 4> qubit_amplitudes() const {
        switch (kind) {
        case Kind::noon:
            return {complexd(0.0), complexd(alpha), complexd(std::sqrt(1.0 - alpha * alpha)),
                    complexd(0.0)};
        case Kind::epr:
            return {complexd(alpha), complexd(0.0), complexd(0.0),
                    complexd(std::sqrt(1.0 - alpha * alpha))};
        case Kind::general:
            return amps;
        }
        throw validation_error("initial state: unknown kind");
    }

    void validate() const {
        if (kind == Kind::general) {
            double norm2 = 0.0;
            for (const auto& a : amps) norm2 += std::norm(a);
            if (std::abs(norm2 - 1.0) > 1e-12)
                throw validation_error("initial state: general amplitudes must satisfy "
                                       "sum |alpha_i|^2 = 1 within 1e-12");
        } else {
            if (!(alpha >= 0.0 && alpha <= 1.0))
                throw validation_error("initial state: alpha must lie in [0, 1]");
        }
    }
};

/// Density matrix on the truncated two-mode Fock space. Dimension is
/// D = (n_max + 1)^2 with basis |n_A n_B>, n_A as the outer (slow) index,
/// so at n_max = 1 row/column 0..3 correspond to |0_A 0_B>, |0_A 1_B>,
/// |1_A 0_B>, |1_A 1_B>.
struct DensityMatrix {
    int n_max = 1;
    cmat rho;

    int dim() const { return (n_max + 1) * (n_max + 1); }

    double trace_deviation() const { return std::abs(rho.trace() - complexd(1.0)); }

    double hermiticity_deviation() const {
        return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    }

    /// Smallest eigenvalue of the Hermitian part (rho + rho^dag)/2.
    double min_eigenvalue() const {
        cmat h = 0.5 * (rho + rho.adjoint());
        Eigen::SelfAdjointEigenSolver<cmat> es(h, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }
};

/// Outer product |Psi><Psi| embedded in the (n_max+1)^2-dimensional space.
inline DensityMatrix make_initial_density(const InitialState& state, int n_max) {
    state.validate();
    if (n_max < 1) throw validation_error("n_max must be >= 1");
    const int d = (n_max + 1) * (n_max + 1);
    const auto amps = state.qubit_amplitudes();
    cvec psi = cvec::Zero(d);
    // qubit-sector indices in the full space
    const int idx[4] = {0, 1, n_max + 1, n_max + 2};
    for (int i = 0; i < 4; ++i) psi(idx[i]) = amps[i];
    DensityMatrix dm;
    dm.n_max = n_max;
    dm.rho = psi * psi.adjoint();
    return dm;
}

/// Everything one run needs. Times are in units of 1/kappa.
struct SimulationConfig {
    ReservoirParams reservoir;
    InitialState initial;
    int n_max = 1;
    double t_max = 10.0;
    double dt = 1e-3;
    double esd_epsilon = 1e-6;

    void validate() const {
        reservoir.validate();
        if (!(reservoir.kappa_a > 0.0) || !(reservoir.kappa_b > 0.0))
            throw validation_error("config: decay rates kappa must be > 0");
        initial.validate();
        if (n_max < 1) throw validation_error("config: n_max must be >= 1");
        if (!(t_max > 0.0)) throw validation_error("config: t_max must be > 0");
        if (!(dt > 0.0)) throw validation_error("config: dt must be > 0");
        if (!(dt <= t_max)) throw validation_error("config: dt must not exceed t_max");
        if (!(esd_epsilon > 0.0)) throw validation_error("config: esd_epsilon must be > 0");
    }
};

} // namespace entdyn
