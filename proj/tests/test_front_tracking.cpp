#include <doctest.h>

#include <cmath>

#include "templab/front_tracking.hpp"
#include "templab/riemann.hpp"
#include "templab/solver.hpp"

using namespace templab;

TEST_CASE("front tracking: linear flux translates exactly") {
    SystemSpec sys = get_system("burgers");
    DecoupledForm dec;
    dec.R = Mat::Identity(1, 1);
    dec.Rinv = dec.R;
    dec.lambda_c = {[](double) { return 0.75; }};
    dec.mu_c = {[](double) { return 1.0; }};
    sys.decoupled = dec;

    GridField u0 = GridField::sample_scalar(-2.0, 2.0, 512, [](double x) {
        return x > -0.5 && x < 0.5 ? 0.3 : 0.0;
    });
    GridField ut = exact_semigroup_decoupled(sys, u0, 1.0);
    double worst = 0.0;
    for (int j = 0; j < 512; ++j) {
        double x = ut.x(j);
        double expect = (x - 0.75 > -0.5 && x - 0.75 < 0.5) ? 0.3 : 0.0;
        // jumps land between cells; ignore the two interface cells
        if (std::abs(x - 0.75 + 0.5) > 2 * u0.dx && std::abs(x - 0.75 - 0.5) > 2 * u0.dx)
            worst = std::max(worst, std::abs(ut.at(j, 0) - expect));
    }
    CHECK(worst < 2e-3); // flux-node quantization only
}

TEST_CASE("front tracking: Burgers step-down gives the exact shock position") {
    SystemSpec sys = get_system("burgers");
    GridField u0 = GridField::sample_scalar(-2.0, 2.0, 1024,
                                            [](double x) { return x < 0 ? 0.8 : 0.0; });
    double t = 1.2;
    GridField ut = exact_semigroup_decoupled(sys, u0, t, 2048);
    // Rankine-Hugoniot speed (0.8+0)/2 = 0.4
    double xs = 0.4 * t;
    for (int j = 0; j < 1024; ++j) {
        double x = ut.x(j);
        if (x < xs - 3 * u0.dx) CHECK(ut.at(j, 0) == doctest::Approx(0.8).epsilon(2e-3));
        if (x > xs + 3 * u0.dx) CHECK(std::abs(ut.at(j, 0)) < 2e-3);
    }
}

TEST_CASE("front tracking matches the Riemann fan for a rarefaction") {
    SystemSpec sys = get_system("burgers");
    GridField u0 = GridField::sample_scalar(-2.0, 2.0, 1024,
                                            [](double x) { return x < 0 ? -0.2 : 0.6; });
    double t = 1.0;
    GridField ft = exact_semigroup_decoupled(sys, u0, t, 2048);
    Vec ul = Vec::Constant(1, -0.2), ur = Vec::Constant(1, 0.6);
    RiemannFan fan = solve_riemann(sys, ul, ur);
    GridField ref = sample_fan(fan, u0, t);
    CHECK(l1_distance(ft, ref) < 3e-3);
}

TEST_CASE("front tracking: shock-rarefaction interaction vs fine viscous run") {
    SystemSpec sys = get_system("burgers");
    const int N = 8192;
    const double t_end = 3.0;
    GridField u0 = GridField::sample_scalar(-1.5, 3.5, N, [](double x) {
        if (x < -0.5) return 0.0;
        if (x < 0.2) return 0.8;
        return 0.0;
    });
    // rarefaction head (speed 0.8) catches the shock (speed 0.4) at t = 1.75;
    // compare after the interaction
    GridField ft = exact_semigroup_decoupled(sys, u0, t_end, 4096);

    SolveConfig cfg;
    cfg.epsilon = 1e-4;
    cfg.t_end = t_end;
    GridField vis = solve_viscous(sys, u0, cfg).back();
    vis.t = ft.t;
    double tv = total_variation(u0);
    double gap = l1_distance(ft, vis);
    INFO("l1 gap ", gap, " tv ", tv);
    CHECK(gap <= 5e-3 * tv);
}

TEST_CASE("front tracking: rotated system via decoupling, against the glued fan") {
    SystemSpec sys = get_system("rotated2");
    const DecoupledForm& dec = *sys.decoupled;
    Vec wl(2), wr(2);
    wl << -0.1, 0.08;
    wr << 0.15, -0.06;
    Vec ul = dec.R * wl, ur = dec.R * wr;
    GridField u0 = GridField::sample(-1.0, 2.0, 2048, [&](double x) {
        return x < 0 ? ul : ur;
    });
    double t = 0.35;
    GridField ft = exact_semigroup_decoupled(sys, u0, t, 4096);
    RiemannFan fan = solve_riemann(sys, ul, ur);
    GridField ref = sample_fan(fan, u0, t);
    CHECK(l1_distance(ft, ref) < 5e-3);
}

TEST_CASE("front tracking budget trips") {
    ScalarFrontTracker tr;
    tr.z_nodes = {0.0, 0.5, 1.0};
    tr.g_nodes = {0.0, 0.4, 0.5};
    tr.max_fronts = 2;
    std::vector<double> xs = {0.0, 1.0};
    std::vector<int> vals = {0, 2, 0};
    CHECK_THROWS_AS(tr.evolve(xs, vals, 100.0), FrontBudgetExceeded);
}

TEST_CASE("exact_semigroup_decoupled requires a decoupled form") {
    SystemSpec sys = get_system("chromatography");
    GridField u0 = GridField::sample(-1.0, 1.0, 64, [&](double) {
        return Vec::Constant(2, 0.5).eval();
    });
    CHECK_THROWS_AS(exact_semigroup_decoupled(sys, u0, 0.1), NoReference);
}
