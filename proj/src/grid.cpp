#include "sncc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sncc {

GridSpec parse_grid(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() < 3 || parts.size() > 4) throw ParameterError("grid must be MIN:MAX:N[:log|:lin]");
    GridSpec g;
    try {
        std::size_t used = 0;
        g.min_hz = std::stod(parts[0], &used);
        if (used != parts[0].size()) throw ParameterError("bad grid minimum");
        g.max_hz = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw ParameterError("bad grid maximum");
        const long long n = std::stoll(parts[2], &used);
        if (used != parts[2].size() || n < 2) throw ParameterError("grid needs at least 2 points");
        g.points = static_cast<std::size_t>(n);
    } catch (const std::logic_error& e) {
        if (dynamic_cast<const ParameterError*>(&e)) throw;
        throw ParameterError("grid must be MIN:MAX:N[:log|:lin]");
    }
    g.log_spacing = false;
    if (parts.size() == 4) {
        if (parts[3] == "log") g.log_spacing = true;
        else if (parts[3] != "lin") throw ParameterError("grid spacing must be log or lin");
    }
    if (!(g.max_hz > g.min_hz) || g.min_hz < 0.0) throw ParameterError("grid needs 0 <= MIN < MAX");
    if (g.log_spacing && !(g.min_hz > 0.0)) throw ParameterError("log grid needs MIN > 0");
    return g;
}

std::string format_grid(const GridSpec& g) {
    std::ostringstream os;
    os.precision(17);
    os << g.min_hz << ':' << g.max_hz << ':' << g.points << ':' << (g.log_spacing ? "log" : "lin");
    return os.str();
}

GridSpec default_grid(const WorkingParams& wp, std::size_t points) {
    GridSpec g;
    const double f = wp.omega_m / kTwoPi;
    g.min_hz = 1e-3 * f;
    g.max_hz = 1e3 * f;
    g.points = points;
    g.log_spacing = true;
    return g;
}

std::vector<double> resonances(const WorkingParams& wp) {
    std::vector<double> r{wp.quantum_omega()};
    if (wp.protocol == Protocol::MutualGravity) {
        const double wq2 = wp.omega_q * wp.omega_q, wg2 = wp.omega_grav * wp.omega_grav;
        r.push_back(std::sqrt(wq2 + wg2));
        if (wq2 > wg2) r.push_back(std::sqrt(wq2 - wg2));
    }
    return r;
}

std::vector<double> make_grid(const GridSpec& spec, const WorkingParams& wp) {
    if (spec.points < 2) throw ParameterError("grid needs at least 2 points");
    const double lo = kTwoPi * spec.min_hz, hi = kTwoPi * spec.max_hz;
    std::vector<double> g;
    g.reserve(spec.points + 256);
    for (std::size_t i = 0; i < spec.points; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(spec.points - 1);
        g.push_back(spec.log_spacing ? lo * std::pow(hi / lo, u) : lo + (hi - lo) * u);
    }
    g.front() = lo;
    g.back() = hi;
    if (spec.refine) {
        // offsets c (1 +- 10^e), e from -12 to -1 in eighth decades
        for (double c : resonances(wp)) {
            std::vector<double> extra{c};
            for (int k = -96; k <= -8; ++k) {
                const double d = std::pow(10.0, k / 8.0);
                extra.push_back(c * (1.0 - d));
                extra.push_back(c * (1.0 + d));
            }
            for (double v : extra)
                if (v >= lo && v <= hi) g.push_back(v);
        }
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

}  // namespace sncc
