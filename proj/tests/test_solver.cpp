#include <doctest.h>

#include <cmath>

#include "templab/solver.hpp"

using namespace templab;

namespace {

// scalar constant-coefficient advection-diffusion system
SystemSpec const_scalar(double lam, double mu) {
    SystemSpec s;
    s.name = "const-scalar";
    s.n = 1;
    s.A = [lam](const Vec&) { return Mat::Constant(1, 1, lam); };
    s.B = [mu](const Vec&) { return Mat::Constant(1, 1, mu); };
    s.flux = [lam](const Vec& u) { return (lam * u).eval(); };
    s.domain_box.lo = Vec::Constant(1, -2.0);
    s.domain_box.hi = Vec::Constant(1, 2.0);
    s.c0 = mu * 0.9;
    s.char_speed_bound = [lam](const Vec&) { return std::abs(lam); };
    return s;
}

// spreading Gaussian: initial amp*exp(-(x/w)^2), exact solution of
// u_t + lam u_x = eps mu u_xx
double gauss_exact(double x, double t, double lam, double D, double amp, double w) {
    double s2 = w * w + 4.0 * D * t;
    return amp * w / std::sqrt(s2) * std::exp(-std::pow(x - lam * t, 2) / s2);
}

} // namespace

TEST_CASE("solve_viscous: constant data is a fixed point") {
    SystemSpec sys = get_system("rotated2");
    Vec ustar = sys.domain_box.center() + Vec::Constant(2, 0.07);
    GridField u0 = GridField::sample(-1.0, 1.0, 64, [&](double) { return ustar; });
    SolveConfig cfg;
    cfg.epsilon = 0.05;
    cfg.t_end = 0.3;
    cfg.record_times = {0.1, 0.3};
    for (const GridField& u : solve_viscous(sys, u0, cfg)) {
        for (int j = 0; j < u.cells(); ++j) {
            CHECK((u.state(j) - ustar).norm() < 1e-13);
        }
    }
}

TEST_CASE("solve_viscous matches the advection-diffusion heat kernel") {
    const double lam = 0.8, mu = 1.3, eps = 0.05, amp = 0.4, w = 0.25;
    SystemSpec sys = const_scalar(lam, mu);
    auto run = [&](int cells) {
        GridField u0 = GridField::sample_scalar(
            -2.0, 3.0, cells, [&](double x) { return amp * std::exp(-x * x / (w * w)); });
        SolveConfig cfg;
        cfg.epsilon = eps;
        cfg.t_end = 0.8;
        std::vector<GridField> traj = solve_viscous(sys, u0, cfg);
        GridField exact = GridField::sample_scalar(-2.0, 3.0, cells, [&](double x) {
            return gauss_exact(x, 0.8, lam, eps * mu, amp, w);
        });
        exact.t = 0.8;
        return l1_distance(traj.back(), exact);
    };
    double e1 = run(512);
    double e2 = run(1024);
    CHECK(e1 < 0.01);
    CHECK(e2 < 0.6 * e1); // first-order convergence
}

TEST_CASE("solve_viscous: rotated system decouples into scalar solves") {
    SystemSpec sys = get_system("rotated2");
    const DecoupledForm& dec = *sys.decoupled;
    const double eps = 0.02, T = 0.25;

    // the scalar references use their own Rusanov dissipation and time step,
    // so the agreement is O(dx), halving under refinement
    auto gap = [&](int cells) {
        GridField u0 = GridField::sample(-2.0, 2.0, cells, [&](double x) {
            Vec w(2);
            w[0] = 0.06 * std::exp(-std::pow((x + 0.5) / 0.25, 2));
            w[1] = 0.05 * std::exp(-std::pow((x - 0.4) / 0.3, 2));
            return (dec.R * w).eval();
        });
        SolveConfig cfg;
        cfg.epsilon = eps;
        cfg.t_end = T;
        GridField ut = solve_viscous(sys, u0, cfg).back();

        double err = 0.0;
        for (int c = 0; c < 2; ++c) {
            SystemSpec sc;
            sc.name = "rotated2-comp";
            sc.n = 1;
            auto lamc = dec.lambda_c[c];
            auto muc = dec.mu_c[c];
            sc.A = [lamc](const Vec& u) { return Mat::Constant(1, 1, lamc(u[0])); };
            sc.B = [muc](const Vec& u) { return Mat::Constant(1, 1, muc(u[0])); };
            // antiderivative of lambda_c: w^2/2 resp. 2w + w^2/2
            sc.flux = [c](const Vec& u) {
                double v = c == 0 ? 0.5 * u[0] * u[0] : 2.0 * u[0] + 0.5 * u[0] * u[0];
                return Vec::Constant(1, v).eval();
            };
            sc.domain_box.lo = Vec::Constant(1, -0.8);
            sc.domain_box.hi = Vec::Constant(1, 0.8);
            sc.c0 = 0.5;
            sc.char_speed_bound = [lamc](const Vec& u) { return std::abs(lamc(u[0])); };

            GridField w0 = GridField::zeros(u0.x0, u0.dx, cells, 1);
            for (int j = 0; j < cells; ++j) {
                w0.data[j] = (dec.Rinv * u0.state(j))[c];
            }
            GridField wt = solve_viscous(sc, w0, cfg).back();
            double e = 0.0;
            for (int j = 0; j < cells; ++j) {
                double wc = (dec.Rinv * ut.state(j))[c];
                e += std::abs(wc - wt.data[j]);
            }
            err = std::max(err, e * u0.dx);
        }
        return err;
    };
    double e1 = gap(256);
    double e2 = gap(512);
    INFO("gaps ", e1, " ", e2);
    CHECK(e1 < 0.01);
    CHECK(e2 < 0.65 * e1);
}

TEST_CASE("solve_viscous conserves the integral for flux systems") {
    SystemSpec sys = get_system("burgers");
    GridField u0 = GridField::sample_scalar(-2.0, 2.0, 512, [](double x) {
        return 0.1 * std::exp(-std::pow(x / 0.3, 2));
    });
    SolveConfig cfg;
    cfg.epsilon = 5e-3;
    cfg.t_end = 1.0;
    cfg.record_times = {0.25, 1.0};
    std::vector<GridField> traj = solve_viscous(sys, u0, cfg);
    double m0 = integral(u0)[0];
    for (const GridField& u : traj) {
        CHECK(std::abs(integral(u)[0] - m0) < 1e-10 * 4.0);
    }
}

TEST_CASE("solve_viscous aborts on domain exit") {
    SystemSpec sys = get_system("burgers");
    sys.domain_box.lo = Vec::Constant(1, -0.05);
    sys.domain_box.hi = Vec::Constant(1, 0.05);
    GridField u0 = GridField::sample_scalar(-1.0, 1.0, 64,
                                            [](double x) { return 0.04 * std::sin(x); });
    SolveConfig cfg;
    cfg.epsilon = 0.0;
    cfg.t_end = 0.5;
    // compressive data steepens and pushes u past the tiny box -> abort
    sys.flux = [](const Vec& u) { return (0.5 * u[0] * u[0] * Vec::Ones(1)).eval(); };
    GridField big = GridField::sample_scalar(-1.0, 1.0, 64,
                                             [](double x) { return 0.2 * std::sin(x); });
    CHECK_THROWS_AS(solve_viscous(sys, big, cfg), DomainExit);
}

TEST_CASE("gradient_decompose: constants, single family, completeness") {
    SystemSpec sys = get_system("rotated2");
    const DecoupledForm& dec = *sys.decoupled;

    GridField c = GridField::sample(-1.0, 1.0, 128,
                                    [&](double) { return Vec::Zero(2).eval(); });
    for (const GridField& v : gradient_decompose(sys, c)) {
        CHECK(linf_norm(v) < 1e-14);
    }

    // u = u* + g(x) r_1: v_1 = g', v_2 = 0
    auto g = [](double x) { return 0.05 * std::sin(2.0 * x); };
    auto gp = [](double x) { return 0.1 * std::cos(2.0 * x); };
    EigenFrame f0 = compute_frame(sys, Vec::Zero(2));
    GridField u = GridField::sample(-1.0, 1.0, 512, [&](double x) {
        return (g(x) * f0.right.col(0)).eval();
    });
    std::vector<GridField> v = gradient_decompose(sys, u);
    double worst1 = 0.0, worst2 = 0.0;
    for (int j = 2; j + 2 < 512; ++j) {
        worst1 = std::max(worst1, std::abs(v[0].data[j] - gp(u.x(j))));
        worst2 = std::max(worst2, std::abs(v[1].data[j]));
    }
    CHECK(worst1 < 1e-4); // O(dx^2)
    CHECK(worst2 < 1e-12);

    // completeness: sum_i v_i r_i == discrete u_x exactly
    GridField mixed = GridField::sample(-1.0, 1.0, 256, [&](double x) {
        Vec w(2);
        w[0] = 0.08 * std::sin(3 * x);
        w[1] = 0.06 * std::cos(2 * x);
        return (dec.R * w).eval();
    });
    std::vector<GridField> vm = gradient_decompose(sys, mixed);
    GridField ux = derivative(mixed);
    double worst = 0.0;
    for (int j = 0; j < mixed.cells(); ++j) {
        EigenFrame f = compute_frame(sys, mixed.state(j));
        Vec rec = Vec::Zero(2);
        for (int i = 0; i < 2; ++i) rec += vm[i].data[j] * f.right.col(i);
        worst = std::max(worst, (rec - ux.state(j)).norm());
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("solve_linearized: zero data, heat kernel, exact linearity") {
    SystemSpec sys = const_scalar(0.6, 1.1);
    const double eps = 0.04;
    GridField u0 = GridField::sample_scalar(-2.0, 2.0, 400,
                                            [](double) { return 0.3; });
    GridField h0 = GridField::sample_scalar(-2.0, 2.0, 400, [](double x) {
        return 0.2 * std::exp(-std::pow(x / 0.2, 2));
    });
    SolveConfig cfg;
    cfg.epsilon = eps;
    cfg.t_end = 0.6;

    GridField zero = GridField::zeros(u0.x0, u0.dx, 400, 1);
    GridField hz = solve_linearized(sys, {u0}, zero, cfg).back();
    CHECK(linf_norm(hz) < 1e-15);

    GridField ht = solve_linearized(sys, {u0}, h0, cfg).back();
    GridField exact = GridField::sample_scalar(-2.0, 2.0, 400, [&](double x) {
        return gauss_exact(x, 0.6, 0.6, eps * 1.1, 0.2, 0.2);
    });
    exact.t = 0.6;
    CHECK(l1_distance(ht, exact) < 0.01);

    GridField h2 = solve_linearized(sys, {u0}, 2.5 * h0, cfg).back();
    double worst = 0.0;
    for (int j = 0; j < 400; ++j) {
        worst = std::max(worst, std::abs(h2.data[j] - 2.5 * ht.data[j]));
    }
    CHECK(worst < 1e-13);
}

TEST_CASE("solve_linearized matches the finite-difference homotopy derivative") {
    SystemSpec sys = get_system("rotated2");
    const int cells = 256;
    const double eps = 0.05, T = 0.4, delta = 1e-3;
    EigenFrame f0 = compute_frame(sys, Vec::Zero(2));

    GridField u0 = GridField::sample(-2.0, 2.0, cells, [&](double x) {
        return (0.05 * std::exp(-std::pow(x / 0.3, 2)) * f0.right.col(0)).eval();
    });
    GridField vbar = GridField::sample(-2.0, 2.0, cells, [&](double x) {
        Vec s = 0.05 * std::exp(-std::pow(x / 0.3, 2)) * f0.right.col(0);
        s += 0.04 * std::exp(-std::pow((x - 0.3) / 0.25, 2)) * f0.right.col(1);
        return s.eval();
    });
    GridField h0 = vbar - u0;

    SolveConfig cfg;
    cfg.epsilon = eps;
    cfg.t_end = T;

    GridField h = solve_linearized(sys, {u0}, h0, cfg).back();

    GridField upd = u0; // u^{theta+delta}(0) = u0 + delta*(vbar - u0)
    for (size_t m = 0; m < upd.data.size(); ++m) upd.data[m] += delta * h0.data[m];
    GridField ua = solve_viscous(sys, u0, cfg).back();
    GridField ub = solve_viscous(sys, upd, cfg).back();
    GridField fd = (1.0 / delta) * (ub - ua);

    double err = l1_distance(h, fd);
    double budget = 5.0 * (delta + u0.dx) * l1_norm(h0);
    INFO("l1 gap ", err, " budget ", budget);
    CHECK(err < budget);
}
