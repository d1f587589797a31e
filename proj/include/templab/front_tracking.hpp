#pragma once

#include <functional>
#include <vector>

#include "templab/grid.hpp"
#include "templab/system.hpp"

namespace templab {

// Classical wave-front tracking for a scalar conservation law with a
// piecewise-linear flux: piecewise-constant data whose values live on the
// flux node grid, pairwise front interactions resolved exactly.
struct ScalarFrontTracker {
    // flux nodes z[0..M] (uniform) and g(z[m])
    std::vector<double> z_nodes;
    std::vector<double> g_nodes;
    int max_fronts = 2'000'000;
    long max_events = 5'000'000;

    // data: jump positions xs (increasing) with node-index values
    // vals[0..K] (vals.size() == xs.size()+1)
    struct Front {
        double x0;    // position at t = 0 (extrapolated)
        double speed;
        int left, right; // node indices
    };

    // Evolves to time t and returns the fronts (sorted by position).
    // Throws FrontBudgetExceeded when budgets trip.
    std::vector<Front> evolve(const std::vector<double>& xs, const std::vector<int>& vals,
                              double t) const;

    int quantize(double v) const;
    double value_at(const std::vector<Front>& fronts, double t, double x,
                    int left_value) const;
};

// Builds a tracker for component `comp` of a decoupled system: flux nodes
// span the data range (plus padding), g integrated from lambda_c by Simpson.
ScalarFrontTracker make_tracker(const DecoupledForm& dec, int comp, double w_min,
                                double w_max, int flux_nodes = 1024);

// Exact entropy solution at time t for a constant-frame (decoupled) system:
// per-component scalar front tracking in w = R^-1 u coordinates, mapped back.
// Throws NoReference when the system carries no decoupled form.
GridField exact_semigroup_decoupled(const SystemSpec& sys, const GridField& u0, double t,
                                    int flux_nodes = 1024);

} // namespace templab
