#include "doctest.h"

#include "sncc/config.hpp"
#include "sncc/output.hpp"

using namespace sncc;
using nlohmann::json;

TEST_SUITE("config") {

TEST_CASE("run config round trip") {
    RunConfig c;
    c.subcommand = "negativity";
    c.params = table2_params();
    c.params.theta_T = 12.5;
    c.params.bath = ThermalBath::Classical;
    c.theories = {Theory::SN, Theory::QG};
    c.baths = {ThermalBath::Quantum};
    c.temp_ladder_K = {0.0, 1e-3, 0.5};
    c.grid = parse_grid("0.1:2:100:log");
    c.grid->refine = false;
    c.seed = 99;
    c.ensemble.trajectories = 7;
    c.ensemble.samples = 1234;
    c.ensemble.segment = 256;
    c.ensemble.dt = 0.125;
    c.ensemble.integrator = Integrator::EulerMaruyama;
    c.verify.perturb_beta = 1e-6;
    c.filters = {"wiener", "k_ab"};
    c.emit = {"csv", "json"};
    const json j = config_to_json(c);
    const RunConfig back = config_from_json(j);
    CHECK(config_to_json(back) == j);
    CHECK(back.params_given);
    CHECK(back.grid->refine == false);
    CHECK(back.params.lambda == c.params.lambda);
    CHECK(config_from_json(json{{"run_config", j}}).seed == 99);
}

TEST_CASE("parameters accept alternative units") {
    const PhysicalParams p = params_from_json(json{{"omega_m", 2.0}, {"quality", 100.0}, {"temperature_K", 1.0}}, PhysicalParams{});
    CHECK(p.gamma_m == doctest::Approx(0.02));
    CHECK(p.theta_T == doctest::Approx(temperature_to_theta_T(1.0)));
    CHECK_THROWS_AS(params_from_json(json{{"gamma_m", 1.0}, {"quality", 1.0}}, PhysicalParams{}), ConfigError);
    CHECK_THROWS_AS(params_from_json(json{{"theta_T", 1.0}, {"temperature_K", 1.0}}, PhysicalParams{}), ConfigError);
    CHECK_THROWS_AS(params_from_json(json{{"lambda", 1.0}, {"alpha", 1.0}}, PhysicalParams{}), ConfigError);
    const PhysicalParams a = params_from_json(json{{"alpha", 3.0}}, table1_params());
    CHECK(a.alpha == 3.0);
    CHECK_FALSE(a.lambda.has_value());
}

TEST_CASE("strict keys and types") {
    CHECK_THROWS_AS(config_from_json(json{{"subcommand", "spectrum"}, {"colour", "red"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"ensemble", {{"trajectorys", 3}}}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"params", {{"omega", 3}}}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"seed", -1}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"seed", "one"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"params", {{"mass", "heavy"}}}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"theories", {"sn", "mond"}}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json{{"grid", "1:2"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(json::array()), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("presets") {
    CHECK(preset_params("table1").protocol == Protocol::SelfGravity);
    CHECK(preset_params("table2").protocol == Protocol::MutualGravity);
    CHECK_THROWS_AS(preset_params("table3"), ConfigError);
    const RunConfig c = config_from_json(json{{"preset", "table2"}, {"params", {{"theta", 1.0}}}});
    CHECK(c.params.protocol == Protocol::MutualGravity);
    CHECK(c.params.theta == 1.0);
}

TEST_CASE("validation") {
    RunConfig c;
    c.subcommand = "spectrum";
    c.params = table1_params();
    CHECK_NOTHROW(validate_config(c));
    auto bad = [&](auto mutate) {
        RunConfig d = c;
        mutate(d);
        CHECK_THROWS_AS(validate_config(d), ConfigError);
    };
    bad([](RunConfig& d) { d.subcommand = "plot"; });
    bad([](RunConfig& d) { d.params.mass = -1.0; });
    bad([](RunConfig& d) { d.temp_ladder_K = {1.0, -2.0}; });
    bad([](RunConfig& d) { d.emit = {"xml"}; });
    bad([](RunConfig& d) { d.emit.clear(); });
    bad([](RunConfig& d) { d.ensemble.trajectories = 0; });
    bad([](RunConfig& d) { d.ensemble.segment = 255; });
    bad([](RunConfig& d) { d.ensemble.dt = -0.1; });
    bad([](RunConfig& d) { d.verify.grid_points = 1; });
}

TEST_CASE("output formatting") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
    Table t;
    t.name = "x";
    t.columns = {"a", "b"};
    t.rows = {{1.0, 2.5}, {3.0, -4.0}};
    CHECK(csv_text(t) == "# a,b\n1,2.5\n3,-4\n");
    const json j = table_json(t);
    CHECK(j["columns"] == json({"a", "b"}));
    CHECK(j["data"]["b"][1] == -4.0);
    CHECK(params_hash(table1_params()) == params_hash(table1_params()));
    CHECK(params_hash(table1_params()) != params_hash(table2_params()));
    CHECK(params_hash(table1_params()).size() == 16);
}

}
