#include <doctest.h>

#include <cmath>

#include "templab/grid.hpp"

using namespace templab;

TEST_CASE("field norms and derivatives") {
    GridField f = GridField::sample_scalar(-1.0, 1.0, 801, [](double x) { return x * x; });
    CHECK(l1_norm(f) == doctest::Approx(2.0 / 3.0).epsilon(5e-3)); // rectangle rule
    CHECK(linf_norm(f) == doctest::Approx(1.0));
    GridField d = derivative(f);
    // interior central difference is exact for quadratics
    CHECK(d.data[400] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(d.data[600] == doctest::Approx(2.0 * f.x(600)).epsilon(1e-10));
    GridField dd = second_derivative(f);
    CHECK(dd.data[400] == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("diagnostics: constant, step, smoothed step") {
    GridField c = GridField::sample_scalar(-1.0, 1.0, 101, [](double) { return 0.7; });
    EstimateReport dc = diagnostics(c);
    CHECK(dc.scalars.at("tv") == doctest::Approx(0.0));
    CHECK(dc.scalars.at("ux_l1") == doctest::Approx(0.0));
    CHECK(dc.scalars.at("uxx_l1") == doctest::Approx(0.0));
    CHECK(dc.scalars.at("dev_linf") == doctest::Approx(0.0));

    const double eta = 0.37;
    GridField s = GridField::sample_scalar(-1.0, 1.0, 256,
                                           [&](double x) { return x < 0 ? 0.0 : eta; });
    CHECK(diagnostics(s).scalars.at("tv") == doctest::Approx(eta));

    // smoothed step: TV converges monotonically to |eta| under refinement
    double prev = 0.0;
    for (int cells : {64, 128, 256, 512}) {
        GridField g = GridField::sample_scalar(
            -1.0, 1.0, cells,
            [&](double x) { return 0.5 * eta * (1.0 + std::tanh(x / 0.05)); });
        double tv = diagnostics(g).scalars.at("tv");
        CHECK(tv <= eta + 1e-12);
        CHECK(tv >= prev - 1e-12);
        prev = tv;
    }
    CHECK(prev == doctest::Approx(eta).epsilon(1e-6));
}

TEST_CASE("grid mismatch is rejected") {
    GridField a = GridField::zeros(0.0, 0.1, 32, 1);
    GridField b = GridField::zeros(0.0, 0.2, 32, 1);
    CHECK_THROWS_AS(l1_distance(a, b), GridMismatch);
}
