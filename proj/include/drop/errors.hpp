#pragma once

#include <stdexcept>
#include <string>

namespace drop {

// Thrown when a surface leaves the star-shaped regime (1 + h <= margin
// somewhere on the grid).
class domain_degenerate : public std::runtime_error {
public:
    explicit domain_degenerate(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when the Dirichlet-Neumann fixed point (or series) fails to reach
// the requested tolerance within the iteration budget.
class convergence_failure : public std::runtime_error {
public:
    convergence_failure(const std::string& what, double residual, int iterations)
        : std::runtime_error(what), residual(residual), iterations(iterations) {}
    double residual = 0.0;
    int iterations = 0;
};

// Thrown when a resonant 2x2 block is asked to invert data outside its range.
// Carries the solvability defect |omega*m*f + l*g| (or |f| for the (0,0) block).
class range_violation : public std::runtime_error {
public:
    range_violation(const std::string& what, double defect)
        : std::runtime_error(what), defect(defect) {}
    double defect = 0.0;
};

// Thrown when branch continuation is requested at a pair (l0, m0) whose
// restricted resonance set is not a singleton.
class not_simple : public std::runtime_error {
public:
    explicit not_simple(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace drop
