#include "sncc/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace sncc {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

double get_number(const json& j, const std::string& key) {
    if (!j.at(key).is_number()) throw ConfigError("'" + key + "' must be a number");
    return j.at(key).get<double>();
}

std::uint64_t get_unsigned(const json& j, const std::string& key) {
    const json& v = j.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0))
        throw ConfigError("'" + key + "' must be a non-negative integer");
    return v.get<std::uint64_t>();
}

std::vector<std::string> get_strings(const json& j, const std::string& key) {
    const json& v = j.at(key);
    if (v.is_string()) return {v.get<std::string>()};
    if (!v.is_array()) throw ConfigError("'" + key + "' must be a string or a list of strings");
    std::vector<std::string> out;
    for (const auto& e : v) {
        if (!e.is_string()) throw ConfigError("'" + key + "' must contain strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

}  // namespace

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"spectrum", "negativity", "trajectory", "verify", "filters"};
    return names;
}

json params_to_json(const PhysicalParams& p) {
    json j;
    j["mass"] = p.mass;
    j["omega_m"] = p.omega_m;
    j["gamma_m"] = p.gamma_m;
    j["omega_grav"] = p.omega_grav;
    if (p.lambda) j["lambda"] = *p.lambda;
    if (p.alpha) j["alpha"] = *p.alpha;
    j["theta"] = p.theta;
    j["theta_T"] = p.theta_T;
    j["protocol"] = to_string(p.protocol);
    j["theory"] = to_string(p.theory);
    j["bath"] = to_string(p.bath);
    return j;
}

PhysicalParams params_from_json(const json& j, PhysicalParams p) {
    check_keys(j,
               {"mass", "omega_m", "gamma_m", "quality", "omega_grav", "lambda", "alpha", "theta", "theta_T",
                "temperature_K", "protocol", "theory", "bath"},
               "params");
    try {
        if (j.contains("mass")) p.mass = get_number(j, "mass");
        if (j.contains("omega_m")) p.omega_m = get_number(j, "omega_m");
        if (j.contains("gamma_m") && j.contains("quality")) throw ConfigError("give gamma_m or quality, not both");
        if (j.contains("gamma_m")) p.gamma_m = get_number(j, "gamma_m");
        if (j.contains("quality")) p.gamma_m = quality_to_gamma(p.omega_m, get_number(j, "quality"));
        if (j.contains("omega_grav")) p.omega_grav = get_number(j, "omega_grav");
        if (j.contains("lambda") && j.contains("alpha")) throw ConfigError("give lambda or alpha, not both");
        if (j.contains("lambda")) {
            p.lambda = get_number(j, "lambda");
            p.alpha.reset();
        }
        if (j.contains("alpha")) {
            p.alpha = get_number(j, "alpha");
            p.lambda.reset();
        }
        if (j.contains("theta")) p.theta = get_number(j, "theta");
        if (j.contains("theta_T") && j.contains("temperature_K"))
            throw ConfigError("give theta_T or temperature_K, not both");
        if (j.contains("theta_T")) p.theta_T = get_number(j, "theta_T");
        if (j.contains("temperature_K")) p.theta_T = temperature_to_theta_T(get_number(j, "temperature_K"));
        if (j.contains("protocol")) p.protocol = protocol_from_string(j.at("protocol").get<std::string>());
        if (j.contains("theory")) p.theory = theory_from_string(j.at("theory").get<std::string>());
        if (j.contains("bath")) p.bath = bath_from_string(j.at("bath").get<std::string>());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("params: ") + e.what());
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("params: ") + e.what());
    }
    return p;
}

PhysicalParams preset_params(const std::string& name) {
    if (name == "table1") return table1_params();
    if (name == "table2") return table2_params();
    throw ConfigError("unknown preset: " + name + " (table1, table2)");
}

json config_to_json(const RunConfig& c) {
    json j;
    j["subcommand"] = c.subcommand;
    j["params"] = params_to_json(c.params);
    j["theories"] = json::array();
    for (Theory t : c.theories) j["theories"].push_back(to_string(t));
    j["baths"] = json::array();
    for (ThermalBath b : c.baths) j["baths"].push_back(to_string(b));
    j["temp_ladder_K"] = c.temp_ladder_K;
    if (c.grid) {
        j["grid"] = format_grid(*c.grid);
        j["grid_refine"] = c.grid->refine;
    }
    j["seed"] = c.seed;
    j["ensemble"] = {{"trajectories", c.ensemble.trajectories},
                     {"samples", c.ensemble.samples},
                     {"segment", c.ensemble.segment},
                     {"dt", c.ensemble.dt},
                     {"integrator", to_string(c.ensemble.integrator)},
                     {"threads", c.ensemble.threads}};
    j["verify"] = {{"draws", c.verify.draws},
                   {"grid_points", c.verify.grid_points},
                   {"perturb_beta", c.verify.perturb_beta}};
    j["filters"] = c.filters;
    j["emit"] = c.emit;
    return j;
}

RunConfig config_from_json(const json& in) {
    if (in.is_object() && in.contains("run_config")) return config_from_json(in.at("run_config"));
    check_keys(in,
               {"subcommand", "preset", "params", "theories", "baths", "temp_ladder_K", "grid", "grid_refine",
                "seed", "ensemble", "verify", "filters", "emit"},
               "config");
    RunConfig c;
    try {
        if (in.contains("subcommand")) c.subcommand = in.at("subcommand").get<std::string>();
        PhysicalParams base;
        if (in.contains("preset")) base = preset_params(in.at("preset").get<std::string>());
        if (in.contains("params")) base = params_from_json(in.at("params"), base);
        c.params = base;
        c.params_given = in.contains("preset") || in.contains("params");
        if (in.contains("theories"))
            for (const auto& s : get_strings(in, "theories")) c.theories.push_back(theory_from_string(s));
        if (in.contains("baths"))
            for (const auto& s : get_strings(in, "baths")) c.baths.push_back(bath_from_string(s));
        if (in.contains("temp_ladder_K")) {
            for (const auto& v : in.at("temp_ladder_K")) {
                if (!v.is_number()) throw ConfigError("temp_ladder_K must contain numbers");
                c.temp_ladder_K.push_back(v.get<double>());
            }
        }
        if (in.contains("grid")) {
            c.grid = parse_grid(in.at("grid").get<std::string>());
            if (in.contains("grid_refine")) c.grid->refine = in.at("grid_refine").get<bool>();
        }
        if (in.contains("seed")) c.seed = get_unsigned(in, "seed");
        if (in.contains("ensemble")) {
            const json& e = in.at("ensemble");
            check_keys(e, {"trajectories", "samples", "segment", "dt", "integrator", "threads"}, "ensemble");
            if (e.contains("trajectories")) c.ensemble.trajectories = get_unsigned(e, "trajectories");
            if (e.contains("samples")) c.ensemble.samples = get_unsigned(e, "samples");
            if (e.contains("segment")) c.ensemble.segment = get_unsigned(e, "segment");
            if (e.contains("dt")) c.ensemble.dt = get_number(e, "dt");
            if (e.contains("integrator"))
                c.ensemble.integrator = integrator_from_string(e.at("integrator").get<std::string>());
            if (e.contains("threads")) c.ensemble.threads = static_cast<unsigned>(get_unsigned(e, "threads"));
        }
        if (in.contains("verify")) {
            const json& v = in.at("verify");
            check_keys(v, {"draws", "grid_points", "perturb_beta"}, "verify");
            if (v.contains("draws")) c.verify.draws = get_unsigned(v, "draws");
            if (v.contains("grid_points")) c.verify.grid_points = get_unsigned(v, "grid_points");
            if (v.contains("perturb_beta")) c.verify.perturb_beta = get_number(v, "perturb_beta");
        }
        if (in.contains("filters")) c.filters = get_strings(in, "filters");
        if (in.contains("emit")) c.emit = get_strings(in, "emit");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
    return config_from_json(j);
}

void validate_config(RunConfig& c) {
    const auto& names = subcommands();
    if (std::find(names.begin(), names.end(), c.subcommand) == names.end())
        throw ConfigError("unknown subcommand: '" + c.subcommand + "'");
    try {
        (void)derive_working_params(c.params);
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("params: ") + e.what());
    }
    for (double t : c.temp_ladder_K)
        if (!(std::isfinite(t) && t >= 0.0)) throw ConfigError("temperatures must be finite and >= 0");
    for (const auto& e : c.emit)
        if (e != "csv" && e != "json") throw ConfigError("unknown emit format: " + e + " (csv, json)");
    if (c.emit.empty()) throw ConfigError("emit needs at least one format");
    if (c.ensemble.trajectories < 1) throw ConfigError("trajectories must be >= 1");
    if (c.ensemble.samples < 1) throw ConfigError("samples must be >= 1");
    if (!(std::isfinite(c.ensemble.dt) && c.ensemble.dt >= 0.0)) throw ConfigError("dt must be >= 0");
    if (c.ensemble.segment % 2 != 0) throw ConfigError("segment must be even");
    if (c.verify.draws < 1) throw ConfigError("verify draws must be >= 1");
    if (c.verify.grid_points < 2) throw ConfigError("verify grid needs at least 2 points");
}

}  // namespace sncc
