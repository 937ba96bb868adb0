#pragma once

#include <string>

#include "drop/dynamics.hpp"
#include "drop/spectrum.hpp"
#include "drop/travelling.hpp"

namespace drop {

// SphCoeffs JSON: {"lmax": L, "coeffs": [[l, m, value], ...]}; omitted entries
// are zero; every listed value must be finite.
std::string coeffs_to_json(const SphCoeffs& c);
SphCoeffs coeffs_from_json(const std::string& text);
void write_coeffs(const std::string& path, const SphCoeffs& c);
SphCoeffs read_coeffs(const std::string& path);

// State JSON: {"sigma0": s, "h": <SphCoeffs>, "psi": <SphCoeffs>}.
std::string state_to_json(const SurfaceState& s);
SurfaceState state_from_json(const std::string& text);
void write_state(const std::string& path, const SurfaceState& s);
SurfaceState read_state(const std::string& path);

// ResonanceReport JSON with S sorted lexicographically.
std::string resonance_to_json(const ResonanceReport& rep);

// Branch JSON with inline SphCoeffs for eta/beta.
std::string branch_to_json(const Branch& b);

// Trajectory CSV with the fixed header
// t,energy,kinetic,potential,volume,bary_x,bary_y,bary_z,h_norm_H2,psi_norm_H1.
std::string trajectory_to_csv(const Trajectory& traj);
void write_trajectory(const std::string& path, const Trajectory& traj);

// Round-trip-safe scientific formatting (17 significant digits, C locale).
std::string format_g17(double v);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace drop
