#pragma once

#include <vector>

#include "templab/grid.hpp"
#include "templab/system.hpp"

namespace templab {

enum class Boundary { ConstantExtension, Periodic };

struct SolveConfig {
    double epsilon = 1e-2; // viscosity, >= 0
    double cfl = 0.45;     // in (0,1); combined advective+diffusive stability needs <= 0.5
    double t_end = 1.0;
    Boundary boundary = Boundary::ConstantExtension;
    std::vector<double> record_times; // defaults to {t_end}
    // Conservative Rusanov flux differencing when the system provides a flux;
    // characteristic upwinding of A(u)u_x otherwise (or when disabled).
    bool use_flux_form = true;
};

// Explicit method-of-lines integration of u_t + A(u)u_x = eps*(B(u)u_x)_x.
// dt = cfl * min(dx/max|lambda|, dx^2/(2 eps max mu)) with box-wide bounds;
// record times are hit exactly. Throws DomainExit / Instability.
std::vector<GridField> solve_viscous(const SystemSpec& sys, const GridField& u0,
                                     const SolveConfig& cfg);

// v_i(x_j) = l_i(u_j) . (central difference u_x at x_j); the returned n scalar
// fields reconstruct the discrete u_x exactly through sum_i v_i r_i(u_j).
std::vector<GridField> gradient_decompose(const SystemSpec& sys, const GridField& u);

// First-variation (linearized) equation along the viscous flow: h is advanced
// with frozen-coefficient characteristic upwinding in the frame of u and
// explicit central diffusion; all state-space directional derivatives use
// central differences. u is co-evolved from u_traj.front() with the exact
// solve_viscous scheme so both fields live on the same time axis.
std::vector<GridField> solve_linearized(const SystemSpec& sys,
                                        const std::vector<GridField>& u_traj,
                                        const GridField& h0, const SolveConfig& cfg);

// Box-wide speed/viscosity bounds used for time-step control (lattice sampled).
struct StabilityBounds {
    double lambda_max = 0.0;
    double mu_max = 0.0;
};
StabilityBounds stability_bounds(const SystemSpec& sys);

} // namespace templab
