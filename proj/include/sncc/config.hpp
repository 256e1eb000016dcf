#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "sncc/grid.hpp"
#include "sncc/model.hpp"
#include "sncc/trajectory.hpp"

namespace sncc {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct EnsembleConfig {
    std::size_t trajectories = 1;
    std::size_t samples = 10000;    // per trajectory
    std::size_t segment = 0;        // periodogram length, 0: no periodogram
    double dt = 0.0;                // 0: max_stable_dt
    Integrator integrator = Integrator::Exact;
    unsigned threads = 0;
};

struct VerifyConfig {
    std::size_t draws = 100;
    std::size_t grid_points = 10000;
    double perturb_beta = 0.0;      // relative perturbation injected into beta
};

struct RunConfig {
    std::string subcommand;
    PhysicalParams params;
    std::vector<Theory> theories;          // empty: params.theory
    std::vector<ThermalBath> baths;        // empty: params.bath
    std::vector<double> temp_ladder_K;     // empty: params.theta_T
    std::optional<GridSpec> grid;          // empty: default_grid
    std::uint64_t seed = 1;
    EnsembleConfig ensemble;
    VerifyConfig verify;
    std::vector<std::string> filters;      // empty: all applicable
    std::vector<std::string> emit{"csv"};
    std::string out_dir;                   // not serialized
    bool params_given = false;             // not serialized
};

const std::vector<std::string>& subcommands();

nlohmann::json params_to_json(const PhysicalParams& p);
// Applies the members present in j on top of base.
PhysicalParams params_from_json(const nlohmann::json& j, PhysicalParams base);
PhysicalParams preset_params(const std::string& name);

nlohmann::json config_to_json(const RunConfig& c);
// Accepts a RunConfig object or a sidecar carrying one under "run_config".
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

// Fills defaults that depend on the parameters and checks consistency.
void validate_config(RunConfig& c);

}  // namespace sncc
