#pragma once

#include "templab/grid.hpp"

namespace templab {

// Piecewise kernel of the transversal interaction functional:
//   K(s) = 1/c            for s >= 0,
//   K(s) = (1/c) e^{cs/(2 c1)}  for s < 0,
// with c the speed gap between the two families and c1 the (epsilon-scaled)
// viscosity bound.
struct InteractionKernel {
    double c = 1.0;
    double c1 = 1.0;

    double operator()(double s) const;
};

// Q(z, z#) = dx^2 sum_{j,k} K(x_j - y_k) |z_j| |z#_k|, evaluated exactly by an
// O(N) prefix/suffix scan (the exponential branch telescopes). Fields must be
// scalar and share the grid.
double interaction_potential(const GridField& z, const GridField& zsharp,
                             const InteractionKernel& k);

// Reference O(N^2) double sum (same arithmetic content, test oracle).
double interaction_potential_direct(const GridField& z, const GridField& zsharp,
                                    const InteractionKernel& k);

} // namespace templab
