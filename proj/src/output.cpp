#include "sncc/output.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#ifndef SNCC_VERSION
#define SNCC_VERSION "0.0.0"
#endif

namespace sncc {

using nlohmann::json;

std::string code_version() { return SNCC_VERSION; }

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_text(const Table& t) {
    std::string out = "#";
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        out += i ? "," : " ";
        out += t.columns[i];
    }
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_number(row[i]);
        }
        out += '\n';
    }
    return out;
}

json table_json(const Table& t) {
    json cols = json::object();
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
        json v = json::array();
        for (const auto& row : t.rows) v.push_back(row[c]);
        cols[t.columns[c]] = v;
    }
    return {{"columns", t.columns}, {"data", cols}};
}

std::string params_hash(const PhysicalParams& p) {
    const std::string text = params_to_json(p).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json sidecar(const RunConfig& cfg, const Table& t, const std::string& file) {
    json j;
    j["file"] = file;
    j["columns"] = t.columns;
    j["rows"] = t.rows.size();
    j["code_version"] = code_version();
    j["params_hash"] = params_hash(cfg.params);
    j["seed"] = cfg.seed;
    j["grid"] = cfg.grid ? json(format_grid(*cfg.grid)) : json(nullptr);
    const WorkingParams wp = derive_working_params(cfg.params);
    j["lambda"] = {{"value_rad_s", wp.lambda},
                   {"source", cfg.params.lambda ? "given directly" : "alpha sqrt(hbar/M)"},
                   {"note", "cavity parameters are not mapped onto lambda; the value is an input choice"}};
    j["units"] = {{"frequency", "Hz (Omega / 2 pi)"},
                  {"spectra", "two-sided, shot-noise floor 1"},
                  {"time", "s"}};
    j["curve"] = t.meta;
    j["run_config"] = config_to_json(cfg);
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::vector<std::string> write_table(const RunConfig& cfg, const Table& t) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    std::vector<std::string> written;
    for (const auto& fmt : cfg.emit) {
        const std::string file = t.name + (fmt == "csv" ? ".csv" : ".data.json");
        const fs::path path = fs::path(cfg.out_dir) / file;
        write_text(path.string(), fmt == "csv" ? csv_text(t) : table_json(t).dump(1) + "\n");
        write_text(path.string() + ".meta.json", sidecar(cfg, t, file).dump(2) + "\n");
        written.push_back(path.string());
    }
    return written;
}

}  // namespace sncc
