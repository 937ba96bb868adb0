#pragma once

#include "drop/sphgrid.hpp"

namespace drop {

// Grid-side geometry of the graph surface {(1 + h(x)) x : x in S2}.
// All fields live on the (padded) grid of the table used to build them.
struct SurfaceGeometry {
    SphCoeffs h;            // spectral elevation
    GridField h_grid;       // 1 + h > 0 enforced at construction
    VectorGridField grad_h; // nabla_{S2} h
    GridField grad_h_sq;    // |nabla_{S2} h|^2
    GridField J;            // sqrt((1+h)^2 + |nabla h|^2)
    VectorGridField normal; // outward unit normal pulled back to S2
};

// Star-shapedness is enforced with margin min(1 + h) >= 1e-6.
SurfaceGeometry build_geometry(const BasisTable& tab, const SphCoeffs& h);

// Four-term mean curvature of the graph surface; equals 2/(1+c) for h == c.
GridField mean_curvature(const BasisTable& tab, const SurfaceGeometry& g);

// (Delta_{boundary} f~)(gamma(x)) for f given spectrally on S2.
GridField surface_laplacian_pullback(const BasisTable& tab, const SurfaceGeometry& g,
                                     const SphCoeffs& f);

double area(const BasisTable& tab, const SphCoeffs& h);
double volume(const BasisTable& tab, const SphCoeffs& h);

// (1+h)/J, the factor multiplying dh/dt in the normal velocity.
GridField normal_velocity_factor(const SurfaceGeometry& g);

}  // namespace drop
