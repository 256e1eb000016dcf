#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "sncc/config.hpp"

namespace sncc {

std::string code_version();

// One curve (or record) per file.
struct Table {
    std::string name;                      // file stem
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    nlohmann::json meta = nlohmann::json::object();   // curve-specific sidecar entries
};

// %.17g, so values round-trip exactly.
std::string format_number(double v);

std::string csv_text(const Table& t);
nlohmann::json table_json(const Table& t);

// 64-bit FNV-1a of the canonical parameter JSON, as hex.
std::string params_hash(const PhysicalParams& p);

nlohmann::json sidecar(const RunConfig& cfg, const Table& t, const std::string& file);

// Writes <out>/<name>.csv and/or <out>/<name>.data.json per cfg.emit, each
// with <file>.meta.json next to it. Returns the written data paths.
std::vector<std::string> write_table(const RunConfig& cfg, const Table& t);
void write_text(const std::string& path, const std::string& text);

}  // namespace sncc
