#include <doctest.h>

#include <cmath>
#include <random>

#include "templab/coefficients.hpp"
#include "templab/report.hpp"
#include "templab/solver.hpp"

using namespace templab;

TEST_CASE("source coefficients vanish entirely for constant A, B") {
    SystemSpec s;
    s.name = "const";
    s.n = 2;
    Mat A(2, 2), B(2, 2);
    A << 1, 0.2, 0.2, 2;
    B << 1.5, 0.1, 0.1, 1.8;
    // A, B symmetric and commuting is not needed; pick commuting pair B = a*A + b*I
    B = 0.4 * A + Mat::Identity(2, 2) * 1.5;
    s.A = [A](const Vec&) { return A; };
    s.B = [B](const Vec&) { return B; };
    s.domain_box.lo = Vec::Constant(2, -1.0);
    s.domain_box.hi = Vec::Constant(2, 1.0);
    s.c0 = 1.0;
    SourceCoefficients c = source_coefficients(s, Vec::Zero(2));
    double worst = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                worst = std::max({worst, std::abs(c.p[i](j, k)), std::abs(c.q[i](j, k))});
                worst = std::max(worst, c.phat[j][k].cwiseAbs().maxCoeff());
                worst = std::max(worst, c.shat[j][k].cwiseAbs().maxCoeff());
                worst = std::max(worst, c.what[j][k].cwiseAbs().maxCoeff());
                worst = std::max(worst, c.qhat[i][j][k].cwiseAbs().maxCoeff());
                for (int l = 0; l < 2; ++l)
                    worst = std::max(worst, std::abs(c.s[i][j](k, l)));
            }
    CHECK(worst < 1e-9);
}

TEST_CASE("diagonal vanishing identities hold on the corpus") {
    std::mt19937_64 rng(7ull);
    auto u01 = [&]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    for (const SystemSpec& sys : bundled_systems()) {
        double worst = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            Vec u(sys.n);
            for (int c = 0; c < sys.n; ++c) {
                double lo = sys.domain_box.lo[c], hi = sys.domain_box.hi[c];
                u[c] = lo + (0.15 + 0.7 * u01()) * (hi - lo);
            }
            SourceCoefficients c = source_coefficients(sys, u);
            worst = std::max(worst, c.max_diagonal_violation());
        }
        INFO("system ", sys.name, " worst diagonal ", worst);
        CHECK(worst <= 1e-8);
    }
}

TEST_CASE("chromatography coefficients agree with a step-halved Richardson oracle") {
    SystemSpec sys = get_system("chromatography");
    Vec u(2);
    u << 0.55, 0.65;
    // Richardson extrapolation from steps h and h/2 kills the O(h^2) error
    double h = 2e-5;
    SourceCoefficients c1 = source_coefficients(sys, u, h);
    SourceCoefficients c2 = source_coefficients(sys, u, 0.5 * h);
    SourceCoefficients cref = source_coefficients(sys, u, 1e-5); // production step
    double worst = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                double extrap = (4.0 * c2.p[i](j, k) - c1.p[i](j, k)) / 3.0;
                worst = std::max(worst, std::abs(cref.p[i](j, k) - extrap));
                extrap = (4.0 * c2.q[i](j, k) - c1.q[i](j, k)) / 3.0;
                worst = std::max(worst, std::abs(cref.q[i](j, k) - extrap));
                for (int l = 0; l < 2; ++l) {
                    double ex = (4.0 * c2.s[i][j](k, l) - c1.s[i][j](k, l)) / 3.0;
                    worst = std::max(worst, std::abs(cref.s[i][j](k, l) - ex));
                }
            }
    INFO("worst Richardson deviation ", worst);
    CHECK(worst < 1e-6);
}

TEST_CASE("constant-frame systems have phi == 0") {
    SystemSpec sys = get_system("rotated2");
    Vec u(2);
    u << 0.1, -0.2;
    SourceCoefficients c = source_coefficients(sys, u);
    Vec v(2), vx(2);
    v << 0.3, -0.4;
    vx << 1.0, 2.0;
    CHECK(eval_phi(c, v, vx, 1.0).cwiseAbs().maxCoeff() < 1e-8);
}

namespace {

double residual_at(const SystemSpec& sys, int cells, double eps, double t_end,
                   const std::function<Vec(double)>& init, double x_min, double x_max) {
    GridField u0 = GridField::sample(x_min, x_max, cells, init);
    SolveConfig cfg;
    cfg.epsilon = eps;
    cfg.t_end = t_end;
    double dt_rec = 0.2 * u0.dx;
    cfg.record_times = {t_end - dt_rec, t_end, t_end + dt_rec};
    std::vector<GridField> traj = solve_viscous(sys, u0, cfg);
    return residual_v_equation(sys, traj, eps).scalars.at("mismatch_l1_total");
}

} // namespace

TEST_CASE("residual_v_equation: constant trajectory vanishes") {
    SystemSpec sys = get_system("rotated2");
    Vec ustar = Vec::Constant(2, 0.05);
    GridField u = GridField::sample(-1.0, 1.0, 64, [&](double) { return ustar; });
    GridField u1 = u, u2 = u;
    u1.t = 0.01;
    u2.t = 0.02;
    EstimateReport rep = residual_v_equation(sys, {u, u1, u2}, 0.01);
    CHECK(rep.scalars.at("mismatch_l1_total") < 1e-12);
}

TEST_CASE("residual_v_equation converges at first order: burgers") {
    SystemSpec sys = get_system("burgers");
    auto init = [](double x) {
        return Vec::Constant(1, 0.2 * std::exp(-std::pow(x / 0.4, 2))).eval();
    };
    std::vector<double> dxs, errs;
    for (int cells : {256, 512, 1024, 2048}) {
        errs.push_back(residual_at(sys, cells, 0.05, 0.2, init, -2.0, 2.0));
        dxs.push_back(4.0 / (cells - 1));
    }
    FitResult fit = power_fit(dxs, errs);
    INFO("order ", fit.exponent);
    CHECK(fit.exponent >= 0.8);
}

TEST_CASE("residual_v_equation converges at first order: rotated2") {
    SystemSpec sys = get_system("rotated2");
    EigenFrame f0 = compute_frame(sys, Vec::Zero(2));
    auto init = [&](double x) {
        Vec s = 0.05 * std::exp(-std::pow((x + 0.3) / 0.3, 2)) * f0.right.col(0);
        s += 0.04 * std::exp(-std::pow((x - 0.3) / 0.35, 2)) * f0.right.col(1);
        return s.eval();
    };
    std::vector<double> dxs, errs;
    for (int cells : {128, 256, 512}) {
        errs.push_back(residual_at(sys, cells, 0.05, 0.15, init, -2.0, 2.0));
        dxs.push_back(4.0 / (cells - 1));
    }
    FitResult fit = power_fit(dxs, errs);
    INFO("order ", fit.exponent);
    CHECK(fit.exponent >= 0.8);
}

TEST_CASE("residual_v_equation converges on the curved-frame chromatography system") {
    SystemSpec sys = get_system("chromatography");
    Vec base(2);
    base << 0.6, 0.6;
    EigenFrame f0 = compute_frame(sys, base);
    auto init = [&](double x) {
        Vec s = base;
        s += 0.08 * std::exp(-std::pow(x / 0.3, 2)) * f0.right.col(0);
        s += 0.06 * std::exp(-std::pow((x - 0.5) / 0.3, 2)) * f0.right.col(1);
        return s.eval();
    };
    std::vector<double> dxs, errs;
    for (int cells : {128, 256, 512}) {
        errs.push_back(residual_at(sys, cells, 0.05, 0.15, init, -2.0, 2.0));
        dxs.push_back(4.0 / (cells - 1));
    }
    FitResult fit = power_fit(dxs, errs);
    INFO("order ", fit.exponent, " errs ", errs[0], " ", errs[1], " ", errs[2]);
    CHECK(fit.exponent >= 0.8);
}

TEST_CASE("residual_v_equation input validation") {
    SystemSpec sys = get_system("burgers");
    GridField u = GridField::sample_scalar(-1.0, 1.0, 64, [](double) { return 0.0; });
    CHECK_THROWS_AS(residual_v_equation(sys, {u, u}, 0.01), InsufficientRecords);
    GridField u1 = u, u2 = u;
    u1.t = 0.01;
    u2.t = 0.05; // non-uniform spacing
    CHECK_THROWS_AS(residual_v_equation(sys, {u, u1, u2}, 0.01), InsufficientRecords);
}
