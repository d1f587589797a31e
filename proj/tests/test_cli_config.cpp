#include <doctest.h>

#include <fstream>
#include <sstream>

#include "templab/run_config.hpp"

using namespace templab;

namespace {

nlohmann::json base_config() {
    nlohmann::json j;
    j["system"] = "burgers";
    j["grid"] = {{"x_min", -1.0}, {"x_max", 1.0}, {"cells", 64}};
    j["solve"] = {{"epsilon", 0.01}, {"t_end", 0.1}};
    j["initial"] = {{"type", "constant"}, {"state", {0.1}}};
    j["output_dir"] = "out_test";
    j["seed"] = 7;
    return j;
}

} // namespace

TEST_CASE("run config validation") {
    RunConfig rc = run_config_from_json(base_config(), "test");
    CHECK(rc.cells == 64);
    CHECK(rc.solve.epsilon == doctest::Approx(0.01));

    nlohmann::json bad = base_config();
    bad["grid"]["cells"] = 8;
    CHECK_THROWS_AS(run_config_from_json(bad, "test"), ConfigError);
    bad = base_config();
    bad["grid"]["x_min"] = 2.0;
    CHECK_THROWS_AS(run_config_from_json(bad, "test"), ConfigError);
    bad = base_config();
    bad.erase("system");
    CHECK_THROWS_AS(run_config_from_json(bad, "test"), ConfigError);

    CHECK_THROWS_AS(load_run_config("definitely_missing_config.json"), ConfigError);
}

TEST_CASE("initial data profiles") {
    RunConfig rc = run_config_from_json(base_config(), "test");
    SystemSpec sys = get_system("burgers");

    GridField c = build_initial(sys, rc, rc.initial);
    CHECK(c.cells() == 64);
    CHECK(c.at(10, 0) == doctest::Approx(0.1));

    nlohmann::json rspec = {{"type", "riemann"}, {"left", {0.3}}, {"right", {-0.1}},
                            {"x_jump", 0.25}};
    GridField r = build_initial(sys, rc, rspec);
    CHECK(r.at(0, 0) == doctest::Approx(0.3));
    CHECK(r.at(63, 0) == doctest::Approx(-0.1));

    nlohmann::json bspec = {{"type", "bump"}, {"base", {0.0}}, {"family", 1},
                            {"amplitude", 0.05}, {"width", 0.2}, {"center", 0.0}};
    GridField b = build_initial(sys, rc, bspec);
    CHECK(linf_norm(b) == doctest::Approx(0.05).epsilon(1e-3));

    // seeded random field is reproducible
    nlohmann::json fspec = {{"type", "random_fourier"}, {"base", {0.0}}, {"family", 1},
                            {"amplitude", 0.03}, {"modes", 4}};
    GridField f1 = build_initial(sys, rc, fspec);
    GridField f2 = build_initial(sys, rc, fspec);
    CHECK(l1_distance(f1, f2) == 0.0);
    RunConfig rc2 = rc;
    rc2.seed = 8;
    GridField f3 = build_initial(sys, rc2, fspec);
    CHECK(l1_distance(f1, f3) > 0.0);

    nlohmann::json unknown = {{"type", "nope"}};
    CHECK_THROWS_AS(build_initial(sys, rc, unknown), ConfigError);
}

TEST_CASE("report JSON and CSV serialization is deterministic") {
    EstimateReport rep;
    rep.name = "demo";
    rep.scalars["zeta"] = 1.0 / 3.0;
    rep.scalars["alpha"] = 2e-17;
    rep.check_le("bound", 0.5, 1.0);
    rep.series_columns = {"t", "v"};
    rep.series = {{0.1, 0.333333333333333314829616256247}, {0.2, 2.0}};
    FitResult fit;
    fit.model = "C*x^p";
    fit.exponent = -0.5;
    rep.fit = fit;

    std::string j1 = rep.to_json().dump(2);
    std::string j2 = rep.to_json().dump(2);
    CHECK(j1 == j2);
    // keys are emitted sorted
    CHECK(j1.find("\"alpha\"") < j1.find("\"zeta\""));

    std::ostringstream c1, c2;
    rep.write_series_csv(c1);
    rep.write_series_csv(c2);
    CHECK(c1.str() == c2.str());
    CHECK(c1.str().find("0.33333333333333331") != std::string::npos); // 17 digits
}

TEST_CASE("format_double round-trips") {
    for (double v : {1.0 / 3.0, 2e-17, -123456.789, 0.0, 1e300}) {
        std::string s = format_double(v);
        CHECK(std::stod(s) == v);
    }
}
