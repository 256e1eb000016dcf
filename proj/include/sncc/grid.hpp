#pragma once

#include <string>
#include <vector>

#include "sncc/model.hpp"

namespace sncc {

// Frequencies given in Hz, grids returned in rad/s.
struct GridSpec {
    double min_hz = 0.0;
    double max_hz = 0.0;
    std::size_t points = 0;
    bool log_spacing = true;
    bool refine = true;       // add resonance windows
};

// Parses MIN:MAX:N[:log|:lin].
GridSpec parse_grid(const std::string& text);
std::string format_grid(const GridSpec& g);

// Default: 1e-3 omega_m .. 1e3 omega_m, log spaced.
GridSpec default_grid(const WorkingParams& wp, std::size_t points = 2000);

// Resonances: omega_q, plus sqrt(omega_q^2 +- omega_g^2) for mutual gravity.
std::vector<double> resonances(const WorkingParams& wp);

std::vector<double> make_grid(const GridSpec& spec, const WorkingParams& wp);

}  // namespace sncc
