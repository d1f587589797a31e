#include <doctest.h>

#include <cmath>

#include "templab/front_tracking.hpp"
#include "templab/studies.hpp"

using namespace templab;

TEST_CASE("bv_study: constant data reports zero TV") {
    SystemSpec sys = get_system("burgers");
    GridField u0 = GridField::sample_scalar(-1.0, 1.0, 128, [](double) { return 0.2; });
    BvParams p;
    p.eps_list = {1e-2, 5e-3};
    p.solve.t_end = 0.2;
    p.records = 5;
    p.ratio_limit = 1.0 + 1e-6;
    EstimateReport rep = bv_study(sys, u0, p);
    CHECK(rep.pass);
    CHECK(rep.scalars.at("tv0") == 0.0);
}

TEST_CASE("bv_study: scalar TV is non-increasing (maximum principle)") {
    SystemSpec sys = get_system("burgers");
    GridField u0 = GridField::sample_scalar(-3.0, 3.0, 512, [](double x) {
        return 0.05 * std::exp(-std::pow(x / 0.4, 2));
    });
    BvParams p;
    p.eps_list = {1e-2, 2.5e-3};
    p.solve.t_end = 0.5;
    p.records = 9;
    p.ratio_limit = 1.0 + 1e-6;
    EstimateReport rep = bv_study(sys, u0, p);
    INFO("sup ratio ", rep.scalars.at("sup_ratio"));
    CHECK(rep.pass);
}

TEST_CASE("stability_study: trivial and contraction") {
    SystemSpec sys = get_system("burgers");
    GridField u0 = GridField::sample_scalar(-3.0, 3.0, 384, [](double x) {
        return 0.05 * std::exp(-std::pow(x / 0.4, 2));
    });
    StabilityParams p;
    p.eps = 1e-2;
    p.solve.t_end = 0.3;
    p.records = 4;
    p.theta_count = 4;
    p.ratio_limit = 1.0 + 1e-6;

    EstimateReport triv = stability_study(sys, u0, u0, p);
    CHECK(triv.pass);
    CHECK(triv.scalars.at("initial_l1_distance") == 0.0);

    GridField v0 = GridField::sample_scalar(-3.0, 3.0, 384, [](double x) {
        return 0.05 * std::exp(-std::pow(x / 0.4, 2)) +
               0.02 * std::exp(-std::pow((x - 0.5) / 0.3, 2));
    });
    EstimateReport rep = stability_study(sys, u0, v0, p);
    INFO("ratio ", rep.scalars.at("sup_ratio"), " homotopy gap vs ",
         rep.scalars.at("homotopy_mean_h_l1"));
    CHECK(rep.pass);
}

TEST_CASE("vanishing_viscosity_study: constant data is exact, shock converges") {
    SystemSpec sys = get_system("burgers");
    GridField c0 = GridField::sample_scalar(-1.0, 1.0, 128, [](double) { return 0.1; });
    VanishingViscosityParams pc;
    pc.eps_list = {1e-2, 5e-3};
    pc.t_star = 0.1;
    pc.solve.t_end = 0.1;
    auto const_ref = [&](double t) {
        GridField g = c0;
        g.t = t;
        return g;
    };
    EstimateReport trivial = vanishing_viscosity_study(sys, c0, const_ref, pc);
    CHECK(trivial.pass);
    CHECK(trivial.scalars.at("max_error") < 1e-12);

    CHECK_THROWS_AS(vanishing_viscosity_study(sys, c0, nullptr, pc), NoReference);

    // shock layer: e(eps) ~ eps
    GridField u0 = GridField::sample_scalar(-1.0, 1.0, 2048,
                                            [](double x) { return x < 0 ? 0.4 : -0.2; });
    RiemannFan fan = solve_riemann(sys, Vec::Constant(1, 0.4), Vec::Constant(1, -0.2));
    auto ref = [&](double t) { return sample_fan(fan, u0, t); };
    VanishingViscosityParams p;
    p.eps_list = {2e-2, 1e-2, 5e-3, 2.5e-3};
    p.t_star = 0.25;
    p.solve.t_end = 0.25;
    EstimateReport rep = vanishing_viscosity_study(sys, u0, ref, p);
    INFO("p = ", rep.fit->exponent, " residual ", rep.fit->residual);
    CHECK(rep.pass);
    CHECK(rep.fit->exponent > 0.7); // shock layer is ~linear in eps
}

TEST_CASE("time_continuity_study: heat-like data fits the modulus") {
    SystemSpec sys = get_system("burgers");
    GridField u0 = GridField::sample_scalar(-4.0, 4.0, 512, [](double x) {
        return 0.08 * std::exp(-std::pow(x / 0.25, 2));
    });
    TimeContinuityParams p;
    p.eps_list = {1e-2, 2.5e-3};
    p.solve.t_end = 0.8;
    for (double t : {0.1, 0.2, 0.4, 0.8})
        for (double s : {0.05, 0.15, 0.3})
            if (t > s) p.time_pairs.emplace_back(t, s);
    EstimateReport rep = time_continuity_study(sys, u0, p);
    INFO("residual ", rep.fit->residual, " a ", rep.fit->extra.at("a"), " b ",
         rep.fit->extra.at("b"));
    CHECK(rep.pass);
}

TEST_CASE("propagation_study: identical data and localized difference") {
    SystemSpec sys = get_system("burgers");
    GridField u0 = GridField::sample_scalar(-2.0, 4.0, 1024, [](double) { return 0.1; });
    PropagationParams p;
    p.eps_list = {1e-2};
    p.t = 0.2;
    p.a = -0.25;
    p.b = 0.25;
    EstimateReport triv = propagation_study(sys, u0, u0, p);
    CHECK(triv.pass);

    GridField v0 = GridField::sample_scalar(-2.0, 4.0, 1024, [](double x) {
        return 0.1 + (std::abs(x) < 0.25 ? 0.05 * std::cos(2.0 * 3.14159 * x) + 0.05 : 0.0);
    });
    PropagationParams p2 = p;
    p2.eps_list = {1e-2, 5e-3};
    EstimateReport rep = propagation_study(sys, u0, v0, p2);
    INFO("rate ratio ", rep.scalars.at("rate_ratio_0"));
    CHECK(rep.pass);
}

TEST_CASE("decay studies produce 1/sqrt(t) shapes on steep data") {
    SystemSpec sys = get_system("burgers");
    GridField u0 = GridField::sample_scalar(-6.0, 6.0, 768, [](double x) {
        return 0.05 * std::tanh(x / 0.05);
    });
    DecayParams p;
    p.solve.epsilon = 0.5;
    p.solve.t_end = 1.5;
    p.samples = 13;
    EstimateReport rep = decay_study_uxx(sys, u0, p);
    INFO("exponent ", rep.fit->exponent);
    CHECK(rep.pass);

    GridField base = GridField::sample_scalar(-6.0, 6.0, 768, [](double) { return 0.05; });
    GridField h0 = GridField::sample_scalar(-6.0, 6.0, 768, [](double x) {
        return 0.05 * std::exp(-std::pow(x / 0.08, 2));
    });
    EstimateReport hrep = decay_study_hx(sys, base, h0, p);
    INFO("exponent ", hrep.fit->exponent);
    CHECK(hrep.pass);
}

TEST_CASE("transversal_decay_check on crossing waves of the rotated system") {
    SystemSpec sys = get_system("rotated2");
    const DecoupledForm& dec = *sys.decoupled;
    GridField u0 = GridField::sample(-3.0, 3.0, 1024, [&](double x) {
        Vec w(2);
        w[0] = 0.05 * std::exp(-std::pow((x - 0.3) / 0.15, 2));  // slow, ahead
        w[1] = 0.05 * std::exp(-std::pow((x + 0.8) / 0.15, 2));  // fast, behind
        return (dec.R * w).eval();
    });
    TransversalParams p;
    p.solve.epsilon = 0.02;
    p.solve.t_end = 1.0;
    p.records = 81;
    p.phi_stride = 8;
    EstimateReport rep = transversal_decay_check(sys, u0, p);
    INFO("margin ", rep.scalars.at("margin"), " worst increase ",
         rep.scalars.at("max_increase_beyond_budget"));
    CHECK(rep.pass);
    CHECK(rep.scalars.at("speed_gap_c") > 1.5);

    // single-family data: both sides of the bound are ~0
    GridField single = GridField::sample(-3.0, 3.0, 512, [&](double x) {
        Vec w(2);
        w[0] = 0.05 * std::exp(-std::pow(x / 0.2, 2));
        w[1] = 0.0;
        return (dec.R * w).eval();
    });
    TransversalParams ps = p;
    ps.records = 21;
    ps.solve.t_end = 0.3;
    EstimateReport rs = transversal_decay_check(sys, single, ps);
    CHECK(rs.scalars.at("total_cross") < 1e-10);
}

TEST_CASE("transversal_decay_check rejects missing speed gap") {
    SystemSpec sys = get_system("rotated2");
    GridField u0 = GridField::sample(-1.0, 1.0, 64,
                                     [&](double) { return Vec::Zero(2).eval(); });
    TransversalParams p;
    p.family_i = 1; // fast family listed as slow: gap is negative
    p.family_j = 0;
    p.solve.t_end = 0.05;
    p.records = 3;
    CHECK_THROWS_AS(transversal_decay_check(sys, u0, p), SpeedGapViolated);
}
