#include "templab/run_config.hpp"

#include <cmath>
#include <fstream>
#include <random>

namespace templab {

namespace {

SolveConfig solve_from_json(const nlohmann::json& j) {
    SolveConfig cfg;
    if (!j.is_object()) return cfg;
    cfg.epsilon = j.value("epsilon", cfg.epsilon);
    cfg.cfl = j.value("cfl", cfg.cfl);
    cfg.t_end = j.value("t_end", cfg.t_end);
    cfg.use_flux_form = j.value("flux_form", cfg.use_flux_form);
    std::string b = j.value("boundary", std::string("constant"));
    if (b == "constant")
        cfg.boundary = Boundary::ConstantExtension;
    else if (b == "periodic")
        cfg.boundary = Boundary::Periodic;
    else
        throw ConfigError("solve.boundary must be 'constant' or 'periodic'");
    if (j.contains("record_times"))
        cfg.record_times = j.at("record_times").get<std::vector<double>>();
    return cfg;
}

} // namespace

RunConfig run_config_from_json(const nlohmann::json& j, const std::string& where) {
    RunConfig rc;
    try {
        rc.system = j.at("system").get<std::string>();
        const auto& g = j.at("grid");
        rc.x_min = g.at("x_min").get<double>();
        rc.x_max = g.at("x_max").get<double>();
        rc.cells = g.at("cells").get<int>();
        if (rc.cells < 16) throw ConfigError(where + ": grid.cells must be >= 16");
        if (!(rc.x_min < rc.x_max)) throw ConfigError(where + ": need x_min < x_max");
        if (j.contains("solve")) rc.solve = solve_from_json(j.at("solve"));
        if (j.contains("initial")) rc.initial = j.at("initial");
        if (j.contains("initial_v")) rc.initial_v = j.at("initial_v");
        if (j.contains("initial_h")) rc.initial_h = j.at("initial_h");
        if (j.contains("study")) rc.study = j.at("study");
        rc.output_dir = j.value("output_dir", rc.output_dir);
        rc.seed = j.value("seed", rc.seed);
        rc.resolved = j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(where + ": " + e.what());
    }
    return rc;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed JSON in '" + path + "': " + e.what());
    }
    RunConfig rc = run_config_from_json(j, path);
    // referenced files must exist at parse time
    if (rc.system.find('/') != std::string::npos ||
        rc.system.find(".json") != std::string::npos) {
        std::ifstream probe(rc.system);
        if (!probe.good())
            throw ConfigError("config references missing system file '" + rc.system + "'");
    }
    return rc;
}

double symmetric_uniform(std::mt19937_64& rng) {
    return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
}

namespace {

Vec state_from_json(const nlohmann::json& j, int n, const std::string& what) {
    auto v = j.get<std::vector<double>>();
    if (static_cast<int>(v.size()) != n)
        throw ConfigError(what + " must have n=" + std::to_string(n) + " entries");
    return Eigen::Map<Vec>(v.data(), n);
}

} // namespace

GridField build_initial(const SystemSpec& sys, const RunConfig& rc,
                        const nlohmann::json& spec) {
    if (!spec.is_object()) throw ConfigError("initial-data spec missing");
    std::string type = spec.value("type", std::string());
    const int n = sys.n;

    auto sample = [&](const std::function<Vec(double)>& fn) {
        return GridField::sample(rc.x_min, rc.x_max, rc.cells, fn, 0.0);
    };

    if (type == "constant") {
        Vec s = state_from_json(spec.at("state"), n, "initial.state");
        return sample([&](double) { return s; });
    }
    if (type == "riemann") {
        Vec l = state_from_json(spec.at("left"), n, "initial.left");
        Vec r = state_from_json(spec.at("right"), n, "initial.right");
        double xj = spec.value("x_jump", 0.0);
        return sample([&](double x) { return x < xj ? l : r; });
    }
    if (type == "bump" || type == "smooth_step" || type == "bumps" ||
        type == "random_fourier") {
        Vec base = state_from_json(spec.at("base"), n, "initial.base");
        EigenFrame f = compute_frame(sys, base);
        auto family_dir = [&](int fam) {
            if (fam < 1 || fam > n) throw ConfigError("initial.family out of range");
            return Vec(f.right.col(fam - 1));
        };
        if (type == "bump") {
            Vec dir = family_dir(spec.value("family", 1));
            double amp = spec.at("amplitude").get<double>();
            double width = spec.at("width").get<double>();
            double center = spec.value("center", 0.0);
            return sample([&](double x) {
                double g = amp * std::exp(-std::pow((x - center) / width, 2));
                return (base + g * dir).eval();
            });
        }
        if (type == "smooth_step") {
            Vec dir = family_dir(spec.value("family", 1));
            double amp = spec.at("amplitude").get<double>();
            double width = spec.at("width").get<double>();
            double center = spec.value("center", 0.0);
            return sample([&](double x) {
                double g = 0.5 * amp * (1.0 + std::tanh((x - center) / width));
                return (base + g * dir).eval();
            });
        }
        if (type == "bumps") {
            struct B {
                Vec dir;
                double amp, width, center;
            };
            std::vector<B> list;
            for (const auto& bj : spec.at("list")) {
                list.push_back(B{family_dir(bj.value("family", 1)),
                                 bj.at("amplitude").get<double>(),
                                 bj.at("width").get<double>(), bj.value("center", 0.0)});
            }
            return sample([&](double x) {
                Vec s = base;
                for (const B& b : list)
                    s += b.amp * std::exp(-std::pow((x - b.center) / b.width, 2)) * b.dir;
                return s;
            });
        }
        // random_fourier: seeded sum of sines along one family direction
        Vec dir = family_dir(spec.value("family", 1));
        double amp = spec.at("amplitude").get<double>();
        int modes = spec.value("modes", 5);
        double support = spec.value("support", 0.8); // fraction of the domain
        std::mt19937_64 rng(rc.seed ^ 0x9e3779b97f4a7c15ull);
        std::vector<double> coef(modes), phase(modes);
        for (int m = 0; m < modes; ++m) {
            coef[m] = symmetric_uniform(rng) / (m + 1);
            phase[m] = symmetric_uniform(rng) * 3.14159265358979323846;
        }
        double L = rc.x_max - rc.x_min;
        double c = 0.5 * (rc.x_min + rc.x_max);
        double w = 0.5 * support * L;
        return sample([&](double x) {
            double window = std::exp(-std::pow((x - c) / w, 4));
            double g = 0.0;
            for (int m = 0; m < modes; ++m)
                g += coef[m] * std::sin(2.0 * 3.14159265358979323846 * (m + 1) * (x - c) / L +
                                        phase[m]);
            return (base + amp * window * g * dir).eval();
        });
    }
    throw ConfigError("unknown initial-data type '" + type + "'");
}

void write_fields_csv(const std::filesystem::path& path, const GridField& u) {
    std::ofstream os(path);
    os << "x";
    for (int c = 0; c < u.comps; ++c) os << ",u_" << (c + 1);
    os << "\n";
    for (int j = 0; j < u.cells(); ++j) {
        os << format_double(u.x(j));
        for (int c = 0; c < u.comps; ++c) os << ',' << format_double(u.at(j, c));
        os << "\n";
    }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream os(path);
    os << j.dump(2) << "\n";
}

} // namespace templab
