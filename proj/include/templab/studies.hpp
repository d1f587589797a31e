#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "templab/coefficients.hpp"
#include "templab/kernel.hpp"
#include "templab/riemann.hpp"
#include "templab/solver.hpp"

namespace templab {

// Experiment protocols verifying the quantitative estimates on solver output.
// Every report records the thresholds it used; `pass` is derived from the
// recorded scalars only.

struct TransversalParams {
    int family_i = 0; // slow family
    int family_j = 1; // fast family
    SolveConfig solve;
    int records = 201;
    double budget_rel = 1e-3;  // slack for the discrete Q-monotonicity, rel. Q(0)
    double margin_min = 0.05;  // required margin of the (1/c) E1 E2 bound
    int phi_stride = 4;
};

// Discrete transversal interaction: Q(t) + int int |v_i v_j| must be
// non-increasing within the phi-source budget, and the total interaction is
// bounded by (1/c) E1 E2 with margin.
EstimateReport transversal_decay_check(const SystemSpec& sys, const GridField& u0,
                                       const TransversalParams& p);

struct BvParams {
    std::vector<double> eps_list{1e-2, 5e-3, 2.5e-3, 1.25e-3};
    SolveConfig solve;
    int records = 33;
    double delta0 = 0.1;      // smallness budget for the phi monitor
    double ratio_limit = 3.0; // sup_t TV(u^eps)/TV(u0) limit
    int phi_stride = 4;
};

EstimateReport bv_study(const SystemSpec& sys, const GridField& u0, const BvParams& p);

struct StabilityParams {
    double eps = 1e-2;
    int theta_count = 8;
    SolveConfig solve;
    int records = 9;
    double ratio_limit = 1.0 + 1e-6;
    double homotopy_slack_rel = 0.05; // allowed gap of the homotopy bound, rel. ||u0-v0||_L1
};

EstimateReport stability_study(const SystemSpec& sys, const GridField& u0, const GridField& v0,
                               const StabilityParams& p);

struct TimeContinuityParams {
    std::vector<double> eps_list{1e-2, 5e-3, 2.5e-3, 1.25e-3};
    std::vector<std::pair<double, double>> time_pairs;
    SolveConfig solve;
    double residual_limit = 0.25;
};

EstimateReport time_continuity_study(const SystemSpec& sys, const GridField& u0,
                                     const TimeContinuityParams& p);

struct PropagationParams {
    std::vector<double> eps_list{1e-2, 5e-3}; // scaling checked across consecutive entries
    double t = 0.25;
    double a = 0.0, b = 0.0; // support of u0 - v0
    SolveConfig solve;
    double tail_limit_rel = 1e-6; // |u-v| outside the widened support
    double rate_scale_tol = 0.30; // fitted decay rate ~ 1/eps within this
};

EstimateReport propagation_study(const SystemSpec& sys, const GridField& u0,
                                 const GridField& v0, const PropagationParams& p);

struct VanishingViscosityParams {
    std::vector<double> eps_list{1e-2, 5e-3, 2.5e-3, 1.25e-3}; // decreasing
    double t_star = 0.2;
    SolveConfig solve;
    double p_lo = 0.4, p_hi = 1.1;
    double monotone_slack = 0.10;
};

// reference(t) must return the exact semigroup state on the grid of u0.
EstimateReport vanishing_viscosity_study(const SystemSpec& sys, const GridField& u0,
                                         const std::function<GridField(double)>& reference,
                                         const VanishingViscosityParams& p);

struct DecayParams {
    SolveConfig solve;
    double t_min_frac = 0.05;
    int samples = 25;
    double exp_lo = -0.65, exp_hi = -0.35;
};

// Fits ||u_xx(t)||_L1 ~ C t^p over [t_min_frac*t_end, t_end].
EstimateReport decay_study_uxx(const SystemSpec& sys, const GridField& u0, const DecayParams& p);
// Fits ||h_x(t)||_L1 along the linearized flow.
EstimateReport decay_study_hx(const SystemSpec& sys, const GridField& u0, const GridField& h0,
                              const DecayParams& p);

} // namespace templab
