#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "sncc/config.hpp"
#include "sncc/factorization.hpp"
#include "sncc/model.hpp"

namespace sncc {

// Uniform doubles from a 64-bit engine, identical across standard libraries.
class DrawStream {
public:
    explicit DrawStream(std::uint64_t seed) : eng_(seed) {}
    double uniform(double lo, double hi);
    double log_uniform(double lo, double hi);
    std::uint64_t bits() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

// theta in (0.1, pi - 0.1), Lambda/omega in [1e-2, 1e2], gamma/omega in [1e-8, 1e-1],
// theory, gravity strength and bath drawn as well.
WorkingParams random_self_draw(DrawStream& rng);
// Mutual protocol, theta = pi/2, SN.
WorkingParams random_mutual_draw(DrawStream& rng);

std::vector<double> draw_grid(const WorkingParams& wp, std::size_t points);

struct IdentityResult {
    std::string name;
    double tolerance = 0.0;
    double max_residual = 0.0;
    std::size_t draws = 0;
    std::size_t evaluations = 0;
    std::size_t worst_draw = 0;
    bool passed = false;
};

struct VerifyOptions {
    std::size_t draws = 100;
    std::size_t grid_points = 10000;
    std::uint64_t seed = 1;
    double perturb_beta = 0.0;
};

IdentityResult check_kalman_wiener(const VerifyOptions& o);
IdentityResult check_filters_three_way(const VerifyOptions& o);
IdentityResult check_spectrum_identity(const VerifyOptions& o);
IdentityResult check_spectrum_routes(const VerifyOptions& o);
IdentityResult check_covariance_det(const VerifyOptions& o);
IdentityResult check_mutual_routes(const VerifyOptions& o);
IdentityResult check_riccati_steady(const VerifyOptions& o);
IdentityResult check_roots(const VerifyOptions& o);
IdentityResult check_factorization(const VerifyOptions& o);
IdentityResult check_negativity(const VerifyOptions& o);

// Lower-half-plane square roots of the two roots (in Omega^2) of the quartic,
// from the companion matrix with Newton polishing.
std::vector<cplx> companion_lower_roots(const WorkingParams& wp);

struct VerifyReport {
    std::size_t draws = 0;
    std::uint64_t seed = 0;
    std::vector<IdentityResult> identities;
    std::size_t degenerate_draws = 0;
    std::size_t real_root_draws = 0;
    nlohmann::json root_table = nlohmann::json::array();
    bool passed() const;
    nlohmann::json to_json() const;
};

VerifyReport run_verify(const VerifyOptions& o);

}  // namespace sncc
