#include "doctest.h"

#include <algorithm>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "sncc/cli.hpp"

using namespace sncc;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("sncc_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

json load(const fs::path& p) { return json::parse(slurp(p)); }

std::size_t data_rows(const fs::path& csv) {
    std::ifstream f(csv);
    std::string line;
    std::size_t n = 0;
    while (std::getline(f, line))
        if (!line.empty() && line[0] != '#') ++n;
    return n;
}

// Replays every sidecar of `dir` into a fresh directory and compares all data files byte for byte.
void check_replay(const fs::path& dir, const std::string& tag) {
    std::size_t replayed = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        const std::string name = e.path().filename().string();
        if (name.size() < 10 || name.substr(name.size() - 10) != ".meta.json") continue;
        const fs::path again = fresh_dir(tag + "_replay");
        const Run r = cli({"--config", e.path().string(), "--out", again.string()});
        REQUIRE(r.code == kExitOk);
        for (const auto& f : fs::directory_iterator(again)) {
            const fs::path original = dir / f.path().filename();
            REQUIRE(fs::exists(original));
            CHECK(slurp(original) == slurp(f.path()));
        }
        ++replayed;
    }
    CHECK(replayed > 0);
}

// Validates the subset of JSON Schema used by docs/verify_report.schema.json.
bool validate(const json& v, const json& s, std::string& why, const std::string& at = "$") {
    if (s.contains("type")) {
        const std::string t = s["type"];
        const bool ok = (t == "object" && v.is_object()) || (t == "array" && v.is_array()) ||
                        (t == "string" && v.is_string()) || (t == "boolean" && v.is_boolean()) ||
                        (t == "integer" && v.is_number_integer()) || (t == "number" && v.is_number());
        if (!ok) return why = at + ": expected " + t, false;
    }
    if (s.contains("enum") && std::find(s["enum"].begin(), s["enum"].end(), v) == s["enum"].end())
        return why = at + ": not in enum", false;
    if (s.contains("minimum") && v.is_number() && v.get<double>() < s["minimum"].get<double>())
        return why = at + ": below minimum", false;
    if (v.is_object()) {
        for (const auto& r : s.value("required", json::array()))
            if (!v.contains(r.get<std::string>())) return why = at + ": missing " + r.get<std::string>(), false;
        const json props = s.value("properties", json::object());
        for (auto it = v.begin(); it != v.end(); ++it) {
            if (props.contains(it.key())) {
                if (!validate(it.value(), props[it.key()], why, at + "." + it.key())) return false;
            } else if (s.contains("additionalProperties") && s["additionalProperties"] == false) {
                return why = at + ": unexpected " + it.key(), false;
            }
        }
    }
    if (v.is_array()) {
        if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>()) return why = at + ": too short", false;
        if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>()) return why = at + ": too long", false;
        if (s.contains("items"))
            for (std::size_t i = 0; i < v.size(); ++i)
                if (!validate(v[i], s["items"], why, at + "[" + std::to_string(i) + "]")) return false;
    }
    return true;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("exit codes for bad invocations") {
    const fs::path d = fresh_dir("exit");
    CHECK(cli({}).code == kExitConfig);
    CHECK(cli({"spectrum", "--bogus"}).code == kExitConfig);
    CHECK(cli({"spectrum", "--grid", "1:2", "--out", d.string()}).code == kExitConfig);
    CHECK(cli({"spectrum", "--theory", "mond", "--out", d.string()}).code == kExitConfig);
    CHECK(cli({"negativity", "--protocol", "self", "--out", d.string()}).code == kExitConfig);
    CHECK(cli({"spectrum", "--temp-ladder", "0,1", "--out", d.string()}).code == kExitConfig);
    CHECK(cli({"spectrum", "--lambda", "-1", "--out", d.string()}).code == kExitConfig);
    CHECK(cli({"trajectory", "--samples", "100", "--segment", "256", "--out", d.string()}).code == kExitConfig);
    CHECK(cli({"trajectory", "--samples", "1000", "--segment", "256", "--out", d.string()}).code == kExitConfig);
    CHECK(cli({"filters", "--filter", "k_aa", "--out", d.string()}).code == kExitConfig);
    CHECK(cli({"--config", "/nonexistent.json", "spectrum"}).code == kExitConfig);
    const Run help = cli({"--help"});
    CHECK(help.code == kExitOk);
    CHECK(help.out.find("negativity") != std::string::npos);
    const Run bad = cli({"spectrum", "--theta", "nan", "--out", d.string()});
    CHECK(bad.code == kExitConfig);
    CHECK(bad.err.find("configuration error") != std::string::npos);
}

TEST_CASE("spectrum output files and sidecars") {
    const fs::path d = fresh_dir("spectrum");
    const Run r = cli({"spectrum", "--grid", "1e-3:1e-2:200:log", "--emit", "csv,json", "--out", d.string()});
    REQUIRE(r.code == kExitOk);
    for (const char* stem : {"spectrum_sn_none", "spectrum_qg_none"}) {
        const fs::path csv = d / (std::string(stem) + ".csv");
        REQUIRE(fs::exists(csv));
        REQUIRE(fs::exists(d / (std::string(stem) + ".data.json")));
        const json meta = load(d / (std::string(stem) + ".csv.meta.json"));
        CHECK(meta["file"] == std::string(stem) + ".csv");
        CHECK(meta["rows"] == data_rows(csv));
        CHECK(meta["columns"][0] == "freq_hz");
        CHECK(meta["params_hash"].get<std::string>().size() == 16);
        CHECK(meta["run_config"]["subcommand"] == "spectrum");
        CHECK(meta.contains("code_version"));
        CHECK(meta["lambda"]["value_rad_s"].get<double>() > 0.0);
        const json data = load(d / (std::string(stem) + ".data.json"));
        CHECK(data["data"]["freq_hz"].size() == meta["rows"].get<std::size_t>());
    }
    check_replay(d, "spectrum");
}

TEST_CASE("temperature ladder produces one curve per temperature") {
    const fs::path d = fresh_dir("ladder");
    const Run r = cli({"negativity", "--theory", "sn", "--bath", "quantum", "--temp-ladder", "0,1e-6,1e-3",
                       "--grid", "0.45:0.55:50", "--out", d.string()});
    REQUIRE(r.code == kExitOk);
    for (int k = 0; k < 3; ++k) {
        const fs::path csv = d / ("negativity_sn_quantum_t" + std::to_string(k) + ".csv");
        REQUIRE(fs::exists(csv));
        CHECK(load(fs::path(csv.string() + ".meta.json"))["curve"]["temperature_K"].is_number());
    }
    check_replay(d, "ladder");
}

TEST_CASE("trajectory record of 10^4 samples replays byte for byte") {
    const fs::path d = fresh_dir("record");
    const Run r = cli({"trajectory", "--samples", "10000", "--seed", "5", "--out", d.string()});
    REQUIRE(r.code == kExitOk);
    CHECK(data_rows(d / "record.csv") == 10000);
    const json meta = load(d / "record.csv.meta.json");
    CHECK(meta["seed"] == 5);
    CHECK(meta["curve"]["channel_seeds"].size() == 2);
    check_replay(d, "record");
    const fs::path other = fresh_dir("record_seed");
    REQUIRE(cli({"trajectory", "--samples", "10000", "--seed", "6", "--out", other.string()}).code == kExitOk);
    CHECK(slurp(d / "record.csv") != slurp(other / "record.csv"));
}

TEST_CASE("ensemble periodogram, filters and mutual records replay") {
    const fs::path d = fresh_dir("ensemble");
    REQUIRE(cli({"trajectory", "--trajectories", "3", "--samples", "8192", "--segment", "256", "--threads", "2",
                 "--out", d.string()})
                .code == kExitOk);
    CHECK(data_rows(d / "periodogram.csv") == 129);
    check_replay(d, "ensemble");
    const fs::path f = fresh_dir("filters");
    REQUIRE(cli({"filters", "--grid", "1e-3:1e-2:50:log", "--out", f.string()}).code == kExitOk);
    CHECK(fs::exists(f / "filter_wiener.csv"));
    CHECK(fs::exists(f / "filter_kalman_full.csv"));
    check_replay(f, "filters");
    const fs::path m = fresh_dir("mutual");
    REQUIRE(cli({"trajectory", "--protocol", "mutual", "--samples", "2000", "--out", m.string()}).code == kExitOk);
    CHECK(load(m / "record.csv.meta.json")["columns"] == json({"time_s", "yA", "yB"}));
    check_replay(m, "mutual");
}

TEST_CASE("thread count does not change an ensemble") {
    const fs::path a = fresh_dir("threads_a"), b = fresh_dir("threads_b");
    const std::vector<std::string> base{"trajectory", "--trajectories", "4", "--samples", "8192", "--segment", "256"};
    auto with = [&](const fs::path& d, const std::string& t) {
        auto args = base;
        args.insert(args.end(), {"--threads", t, "--out", d.string()});
        return cli(args).code;
    };
    REQUIRE(with(a, "1") == kExitOk);
    REQUIRE(with(b, "3") == kExitOk);
    CHECK(slurp(a / "periodogram.csv") == slurp(b / "periodogram.csv"));
}

TEST_CASE("verify report matches its schema and detects a perturbed root") {
    const fs::path d = fresh_dir("verify");
    const Run ok = cli({"verify", "--draws", "5", "--grid-points", "300", "--out", d.string()});
    CHECK(ok.code == kExitOk);
    CHECK(ok.out.find("kalman_wiener") != std::string::npos);
    const json report = load(d / "verify_report.json");
    const json schema = load(fs::path(SNCC_SOURCE_DIR) / "docs" / "verify_report.schema.json");
    std::string why;
    CHECK_MESSAGE(validate(report, schema, why), why);
    CHECK(report["passed"] == true);
    CHECK(report["identities"].size() == 10);
    json broken = report;
    broken["identities"][0].erase("tolerance");
    CHECK_FALSE(validate(broken, schema, why));

    const fs::path p = fresh_dir("verify_perturbed");
    const Run bad = cli({"verify", "--draws", "5", "--grid-points", "300", "--perturb-beta", "1e-6", "--out", p.string()});
    CHECK(bad.code == kExitVerify);
    CHECK(bad.out.find("FAIL") != std::string::npos);
    CHECK(load(p / "verify_report.json")["passed"] == false);
}

TEST_CASE("config file drives a run") {
    const fs::path d = fresh_dir("config");
    const fs::path cfg = d / "run.json";
    std::ofstream(cfg) << R"({"subcommand": "spectrum", "preset": "table1", "theories": "qg",
                              "grid": "1e-3:1e-2:20:log", "grid_refine": false})";
    const fs::path out = d / "out";
    REQUIRE(cli({"--config", cfg.string(), "--out", out.string()}).code == kExitOk);
    CHECK(data_rows(out / "spectrum_qg_none.csv") == 20);
    CHECK_FALSE(fs::exists(out / "spectrum_sn_none.csv"));
    std::ofstream(cfg) << R"({"subcommand": "spectrum", "colour": "red"})";
    CHECK(cli({"--config", cfg.string(), "--out", out.string()}).code == kExitConfig);
}

}
