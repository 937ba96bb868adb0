#pragma once

#include <vector>

#include "drop/hamiltonian.hpp"

namespace drop {

struct DiagnosticsRow {
    double t = 0.0;
    double energy = 0.0, kinetic = 0.0, potential = 0.0;
    double volume = 0.0;
    double bary_x = 0.0, bary_y = 0.0, bary_z = 0.0;
    double h_norm_H2 = 0.0, psi_norm_H1 = 0.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<SurfaceState> states;
    std::vector<DiagnosticsRow> diagnostics;
    bool aborted = false;      // star-shapedness margin lost mid-run
    std::string abort_reason;
};

struct EvolveOptions {
    DnoOptions dno;
    bool filter = false;        // exponential filter on the top third of modes
    double filter_strength = 36.0;
};

// Direct right-hand side of the evolution system.
std::pair<SphCoeffs, SphCoeffs> rhs(const DnoSolver& dno, const SurfaceState& s,
                                    const DnoOptions& opts = {}, BallField* warm = nullptr);

SurfaceState step_rk4(const DnoSolver& dno, const SurfaceState& s, double dt,
                      const EvolveOptions& opts = {}, BallField* warm = nullptr);

// Steps to time T with fixed dt, recording diagnostics every record_every
// steps (and at t = 0 and t = T). On loss of star-shapedness the partial
// trajectory is returned with aborted = true.
Trajectory evolve(const DnoSolver& dno, const SurfaceState& s0, double T, double dt,
                  int record_every, const EvolveOptions& opts = {});

DiagnosticsRow diagnostics(const DnoSolver& dno, const SurfaceState& s, double t,
                           const DnoOptions& opts = {});

}  // namespace drop
