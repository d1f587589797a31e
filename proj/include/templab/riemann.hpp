#pragma once

#include <utility>
#include <vector>

#include <json.hpp>

#include "templab/grid.hpp"
#include "templab/system.hpp"

namespace templab {

// Endpoint of the i-th rarefaction curve dR/dsigma = r_i(R), R(0) = u_minus,
// integrated with RK4 at step <= curve_step (sign-aligned frames along the
// curve). For Temple systems this equals u_minus + sigma*r_i(u_minus).
Vec rarefaction_curve(const SystemSpec& sys, int family, const Vec& u_minus, double sigma,
                      double curve_step = 1e-3);

struct WaveDecomposition {
    Vec sigma;            // n wave strengths
    std::vector<Vec> w;   // n+1 intermediate states, w[0]=u_l, w[n]=u_r
    int iterations = 0;
    double residual = 0.0;
};

// Damped Newton on Phi(sigma) = R_n(sigma_n; ... R_1(sigma_1; u_l)) - u_r with
// finite-difference Jacobian and initial guess sigma_i = l_i(u_l).(u_r-u_l).
WaveDecomposition wave_decomposition(const SystemSpec& sys, const Vec& u_l, const Vec& u_r,
                                     double newton_tol = 1e-12, int max_iter = 50);

// Tabulated scalar flux F_i(omega) = int_0^omega lambda_i(R_i(s; w_prev)) ds
// on a uniform sigma-grid (composite Simpson per interval, midpoint sampled).
struct ScalarFlux {
    int family = 0;
    Vec base;                     // w_{i-1}
    std::vector<double> omega;    // nodes, 0 is an endpoint
    std::vector<double> F;        // F(omega), F(0) = 0
    std::vector<double> lambda;   // exact F' = lambda_i along the curve
    std::vector<Vec> states;      // R_i(omega; base)
    std::vector<int> convexity;   // per interval: sign of lambda increments

    double F_at(double w) const;
    double lambda_at(double w) const;
    Vec state_at(double w) const;
};

ScalarFlux scalar_flux(const SystemSpec& sys, int family, const Vec& w_prev,
                       double sigma_max, int intervals = 256, double curve_step = 1e-3);

// Synthetic flux from a callable (test/diagnostic use).
ScalarFlux tabulate_flux(const std::function<double(double)>& F, int family,
                         double sigma_max, int intervals);

enum class WaveType { Shock, Rarefaction, Contact };

struct Wave {
    WaveType type;
    double speed_lo, speed_hi; // equal for shock/contact
    double z_lo, z_hi;         // z-levels connected by the wave
    // rarefactions carry their inversion table: (speed = lambda, z) pairs
    // with nondecreasing speeds; z(xi) is interpolated on it
    std::vector<std::pair<double, double>> fan_table;
};

// Self-similar entropy profile of z_t + F(z)_x = 0 with data 0 | sigma.
struct ScalarProfile {
    double sigma = 0.0;
    std::vector<Wave> waves; // ordered by speed

    double operator()(double xi) const;
    double min_speed() const;
    double max_speed() const;
    bool trivial() const { return waves.empty(); }
};

// Envelope construction on the tabulated flux: lower convex envelope on
// [0,sigma] for sigma > 0, upper concave envelope on [sigma,0] for sigma < 0.
// Throws DegenerateFlux only on malformed tabulations; flat segments are
// emitted as contact discontinuities (flat_tol on slope spread).
ScalarProfile scalar_riemann(const ScalarFlux& flux, double flat_tol = 1e-10);

// Exact Temple-class Riemann fan.
struct RiemannFan {
    Vec u_l, u_r;
    Vec sigma;
    std::vector<Vec> w;              // n+1 intermediate states
    std::vector<double> lambda_bar;  // n-1 sector boundaries
    std::vector<ScalarProfile> z;    // per family
    std::vector<ScalarFlux> fluxes;  // per family (state tables)
    bool refinement_converged = true;

    Vec eval(double xi) const;
    Vec eval(double t, double x) const; // requires t > 0
    nlohmann::json to_json() const;
};

RiemannFan solve_riemann(const SystemSpec& sys, const Vec& u_l, const Vec& u_r);

// Non-interacting glued fans for piecewise-constant data: xs are the K jump
// locations (increasing), states the K+1 constant states.
struct GluedEvolution {
    std::vector<double> xs;
    std::vector<Vec> states;
    std::vector<RiemannFan> fans;
    double horizon = 0.0; // first possible interaction time (inf if none)

    // Throws InteractionReached for t > horizon.
    Vec eval(double t, double x) const;
};

GluedEvolution glued_evolution(const SystemSpec& sys, const std::vector<double>& xs,
                               const std::vector<Vec>& states);

// Samples a fan on the grid of `like` at time t (t > 0).
GridField sample_fan(const RiemannFan& fan, const GridField& like, double t,
                     double jump_x = 0.0);

} // namespace templab
