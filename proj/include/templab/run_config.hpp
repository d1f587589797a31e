#pragma once

#include <filesystem>
#include <optional>
#include <random>
#include <string>

#include <json.hpp>

#include "templab/grid.hpp"
#include "templab/report.hpp"
#include "templab/solver.hpp"
#include "templab/system.hpp"

namespace templab {

// Declarative run description shared by the solve/riemann/study subcommands.
struct RunConfig {
    std::string system;
    double x_min = -1.0, x_max = 1.0;
    int cells = 256;
    SolveConfig solve;
    nlohmann::json initial;          // initial-data spec (see README)
    nlohmann::json initial_v;        // second field (stability/propagation)
    nlohmann::json initial_h;        // linearized initial field
    nlohmann::json study;            // study name + parameters
    std::string output_dir = "out";
    uint64_t seed = 0;

    nlohmann::json resolved; // the full config as loaded (audit copy)
};

RunConfig load_run_config(const std::string& path);
RunConfig run_config_from_json(const nlohmann::json& j, const std::string& where);

// Builds a state field from a declarative initial-data spec. Profile types:
// constant, riemann, bump, bumps, smooth_step, random_fourier.
GridField build_initial(const SystemSpec& sys, const RunConfig& rc, const nlohmann::json& spec);

// Deterministic uniform in [-1, 1) from a seeded mt19937_64.
double symmetric_uniform(std::mt19937_64& rng);

// artifact helpers
void write_fields_csv(const std::filesystem::path& path, const GridField& u);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

} // namespace templab
