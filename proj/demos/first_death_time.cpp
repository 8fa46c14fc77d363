// Minimal library usage: when does a Bell-like NOON state lose its
// entanglement in a squeezed bath, and how does that compare with the
// vacuum-limit exponential decay?

#include <iostream>

#include "entdyn/analytic.hpp"
#include "entdyn/esd.hpp"

int main() {
    using namespace entdyn;

    SimulationConfig config;
    config.reservoir = ReservoirParams::identical(/*kappa=*/1.0, /*r=*/0.2);
    config.initial = InitialState::noon(0.70710678118654752);
    config.t_max = 10.0;
    config.dt = 1e-3;

    const ConcurrenceTrajectory traj = concurrence_trajectory(config);
    const EsdReport report = detect_esd(traj, config.esd_epsilon);

    std::cout << "C(0) = " << traj.samples.front().c << "\n";
    if (report.death_times.empty()) {
        std::cout << "no sudden death within " << config.t_max << "/kappa\n";
    } else {
        std::cout << "sudden death at kappa*t = " << report.death_times.front() << "\n";
    }
    std::cout << "vacuum-limit C at that time would still be "
              << vacuum_noon_concurrence(config.initial.alpha, 1.0,
                                         report.death_times.empty() ? config.t_max
                                                                    : report.death_times.front())
              << "\n";
    return 0;
}
