#include "sncc/verify.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "sncc/entanglement.hpp"
#include "sncc/filters.hpp"
#include "sncc/grid.hpp"
#include "sncc/riccati.hpp"
#include "sncc/spectra.hpp"

namespace sncc {

using nlohmann::json;

double DrawStream::uniform(double lo, double hi) {
    const double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

double DrawStream::log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
}

WorkingParams random_self_draw(DrawStream& rng) {
    PhysicalParams p;
    p.protocol = Protocol::SelfGravity;
    p.omega_m = rng.log_uniform(1e-1, 1e1);
    p.theory = rng.uniform(0.0, 1.0) < 0.5 ? Theory::SN : Theory::QG;
    p.omega_grav = rng.log_uniform(1e-2, 1e1) * p.omega_m;
    const double w = p.theory == Theory::SN ? std::hypot(p.omega_m, p.omega_grav) : p.omega_m;
    const double L = rng.log_uniform(1e-2, 1e2) * w;
    p.lambda = L;
    p.gamma_m = rng.log_uniform(1e-8, 1e-1) * w;
    p.theta = rng.uniform(0.1, std::numbers::pi - 0.1);
    const double b = rng.uniform(0.0, 3.0);
    p.bath = b < 1.0 ? ThermalBath::None : (b < 2.0 ? ThermalBath::Quantum : ThermalBath::Classical);
    const double ratio = rng.log_uniform(1e-3, 1e1);   // 4 gamma theta_T / Lambda^2
    p.theta_T = p.bath == ThermalBath::None ? 0.0 : ratio * L * L / (4.0 * p.gamma_m);
    return derive_working_params(p);
}

WorkingParams random_mutual_draw(DrawStream& rng) {
    PhysicalParams p;
    p.protocol = Protocol::MutualGravity;
    p.theory = Theory::SN;
    p.omega_m = rng.log_uniform(1e-1, 1e1);
    p.omega_grav = rng.log_uniform(1e-4, 0.5) * p.omega_m;
    const double w = std::sqrt((p.omega_m - p.omega_grav) * (p.omega_m + p.omega_grav));
    const double L = rng.log_uniform(1e-2, 1e2) * w;
    p.lambda = L;
    p.gamma_m = rng.log_uniform(1e-8, 1e-1) * w;
    p.theta = std::numbers::pi / 2;
    p.bath = rng.uniform(0.0, 1.0) < 0.5 ? ThermalBath::None : ThermalBath::Quantum;
    p.theta_T = p.bath == ThermalBath::None ? 0.0 : rng.log_uniform(1e-3, 1e1) * L * L / (4.0 * p.gamma_m);
    return derive_working_params(p);
}

std::vector<double> draw_grid(const WorkingParams& wp, std::size_t points) {
    GridSpec g;
    const double f = wp.quantum_omega() / kTwoPi;
    g.min_hz = 1e-3 * f;
    g.max_hz = 1e3 * f;
    g.points = points;
    g.log_spacing = true;
    g.refine = true;
    return make_grid(g, wp);
}

namespace {

double rel(cplx a, cplx b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s > 0.0 ? std::abs(a - b) / s : 0.0;
}

double rel(double a, double b) {
    const double s = std::max(std::abs(a), std::abs(b));
    return s > 0.0 ? std::abs(a - b) / s : 0.0;
}

struct Tracker {
    IdentityResult r;
    std::size_t draw = 0;
    Tracker(std::string name, double tol) {
        r.name = std::move(name);
        r.tolerance = tol;
    }
    void add(double residual) {
        ++r.evaluations;
        if (!(residual <= r.max_residual)) {   // NaN counts as worst
            r.max_residual = std::isnan(residual) ? INFINITY : residual;
            r.worst_draw = draw;
        }
    }
    IdentityResult finish(std::size_t draws) {
        r.draws = draws;
        r.passed = r.max_residual <= r.tolerance;
        return r;
    }
};

template <class Draw, class Body>
IdentityResult sweep(const VerifyOptions& o, std::uint64_t suite, const std::string& name, double tol,
                     Draw draw, Body body) {
    DrawStream rng(stream_seed(o.seed, suite));
    Tracker t(name, tol);
    for (std::size_t d = 0; d < o.draws; ++d) {
        t.draw = d;
        const WorkingParams wp = draw(rng);
        body(wp, t);
    }
    return t.finish(o.draws);
}

// Real 4x4 states S diag(n1, n1, n2, n2) S^T with random symplectic S.
Eigen::Matrix4d random_state(DrawStream& rng) {
    auto local = [&](double r, double phi) {
        Eigen::Matrix2d rot, sq;
        rot << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
        sq << std::exp(r), 0.0, 0.0, std::exp(-r);
        return Eigen::Matrix2d(rot * sq);
    };
    Eigen::Matrix4d S = Eigen::Matrix4d::Identity();
    for (int layer = 0; layer < 2; ++layer) {
        Eigen::Matrix4d L = Eigen::Matrix4d::Zero();
        L.topLeftCorner<2, 2>() = local(rng.uniform(-1.0, 1.0), rng.uniform(0.0, kTwoPi));
        L.bottomRightCorner<2, 2>() = local(rng.uniform(-1.0, 1.0), rng.uniform(0.0, kTwoPi));
        // beam splitter then two-mode squeezer
        const double t = rng.uniform(0.0, kTwoPi), r = rng.uniform(-1.0, 1.0);
        Eigen::Matrix4d B = Eigen::Matrix4d::Zero();
        B.topLeftCorner<2, 2>() = std::cos(t) * Eigen::Matrix2d::Identity();
        B.topRightCorner<2, 2>() = std::sin(t) * Eigen::Matrix2d::Identity();
        B.bottomLeftCorner<2, 2>() = -std::sin(t) * Eigen::Matrix2d::Identity();
        B.bottomRightCorner<2, 2>() = std::cos(t) * Eigen::Matrix2d::Identity();
        const Eigen::Matrix2d Z = Eigen::Vector2d(1.0, -1.0).asDiagonal();
        Eigen::Matrix4d T = Eigen::Matrix4d::Zero();
        T.topLeftCorner<2, 2>() = std::cosh(r) * Eigen::Matrix2d::Identity();
        T.bottomRightCorner<2, 2>() = std::cosh(r) * Eigen::Matrix2d::Identity();
        T.topRightCorner<2, 2>() = std::sinh(r) * Z;
        T.bottomLeftCorner<2, 2>() = std::sinh(r) * Z;
        S = T * B * L * S;
    }
    const double n1 = rng.log_uniform(1.0, 10.0), n2 = rng.log_uniform(1.0, 10.0);
    const Eigen::Vector4d d(n1, n1, n2, n2);
    return S * d.asDiagonal() * S.transpose();
}

double symplectic_negativity(const Eigen::Matrix4d& sigma) {
    Eigen::Matrix4d P = Eigen::Matrix4d::Identity();
    P(3, 3) = -1.0;
    const Eigen::Matrix4d pt = P * sigma * P;
    Eigen::Matrix4d J = Eigen::Matrix4d::Zero();
    J(0, 1) = J(2, 3) = 1.0;
    J(1, 0) = J(3, 2) = -1.0;
    const Eigen::Vector4cd ev = (J * pt).eigenvalues();
    double nu = INFINITY;
    for (int i = 0; i < 4; ++i) nu = std::min(nu, std::abs(ev(i)));
    return -std::log(nu);
}

}  // namespace

std::vector<cplx> companion_lower_roots(const WorkingParams& wp) {
    using ld = long double;
    using lc = std::complex<long double>;
    const ld w = wp.quantum_omega(), g = wp.gamma_m, L = wp.lambda, Lt = wp.lambda_tilde;
    const ld s = std::sin(static_cast<ld>(wp.theta)), s2 = std::sin(2.0L * static_cast<ld>(wp.theta));
    // u^2 - c1 u + c0 with u = Omega^2
    const ld c1 = 2.0L * w * w + L * L * s2 - g * g;
    const ld c0 = w * w * w * w + L * L * w * w * s2 + L * L * Lt * Lt * s * s;
    Eigen::Matrix2cd comp;
    comp << static_cast<double>(c1), static_cast<double>(-c0), 1.0, 0.0;
    const Eigen::Vector2cd ev = comp.eigenvalues();
    std::vector<cplx> out;
    for (int i = 0; i < 2; ++i) {
        lc u(ev(i).real(), ev(i).imag());
        for (int it = 0; it < 8; ++it) {
            const lc f = u * u - c1 * u + c0;
            const lc df = 2.0L * u - c1;
            if (std::abs(df) == 0.0L) break;
            u -= f / df;
        }
        lc z = std::sqrt(u);
        if (z.imag() > 0.0L || (z.imag() == 0.0L && z.real() < 0.0L)) z = -z;
        out.emplace_back(static_cast<double>(z.real()), static_cast<double>(z.imag()));
    }
    return out;
}

IdentityResult check_kalman_wiener(const VerifyOptions& o) {
    return sweep(o, 1, "kalman_wiener", 1e-10, random_self_draw, [&](const WorkingParams& wp, Tracker& t) {
        const FilterModel f(wp);
        SpectralRoots r = f.roots();
        r.b *= 1.0 + o.perturb_beta;
        r.beta = cplx(r.a, r.b);
        for (double w : draw_grid(wp, o.grid_points)) t.add(rel(wiener_from_roots(wp, r, w), f.kalman_quantum(w)));
    });
}

IdentityResult check_filters_three_way(const VerifyOptions& o) {
    auto draw = [](DrawStream& rng) {
        WorkingParams wp = random_self_draw(rng);
        PhysicalParams p;
        p.omega_m = wp.omega_m;
        p.gamma_m = wp.gamma_m;
        p.lambda = wp.lambda;
        p.theta = wp.theta;
        p.theta_T = wp.theta_T;
        p.bath = wp.bath;
        p.theory = Theory::SN;
        p.omega_grav = 0.0;
        return derive_working_params(p);
    };
    return sweep(o, 2, "filters_three_way", 1e-10, draw, [&](const WorkingParams& wp, Tracker& t) {
        const FilterModel f(wp);
        for (double w : draw_grid(wp, o.grid_points)) {
            const cplx kw = f.wiener(w);
            t.add(std::max(rel(kw, f.kalman_full(w)), rel(kw, f.kalman_quantum(w))));
        }
    });
}

IdentityResult check_spectrum_identity(const VerifyOptions& o) {
    return sweep(o, 3, "spectrum_identity", 1e-10, random_self_draw, [&](const WorkingParams& wp, Tracker& t) {
        const FilterModel f(wp);
        for (double w : draw_grid(wp, o.grid_points)) {
            const ResponseFunctions r = f.responses(w);
            t.add(rel(std::norm(r.a_q - r.r_q) / std::norm(r.r_q), spectrum_quantum_direct(wp, w)));
        }
    });
}

IdentityResult check_spectrum_routes(const VerifyOptions& o) {
    return sweep(o, 4, "spectrum_routes", 1e-10, random_self_draw, [&](const WorkingParams& wp, Tracker& t) {
        const FilterModel f(wp);
        const double s = std::sin(wp.theta);
        const double L2 = wp.lambda * wp.lambda;
        for (double w : draw_grid(wp, o.grid_points)) {
            cplx k(1.0, 0.0);
            const ResponseFunctions r = f.responses(w);
            if (wp.theory == Theory::SN) k = (r.r_q / r.r_m) * (r.a_q - r.r_m) / (r.a_q - r.r_q);
            const double route =
                std::norm(k) * spectrum_quantum_direct(wp, w) + wp.classical_force() * L2 * s * s / std::norm(r.r_m);
            t.add(rel(spectrum_self(wp, w), route));
        }
    });
}

IdentityResult check_covariance_det(const VerifyOptions& o) {
    return sweep(o, 5, "covariance_det", 1e-10, random_self_draw, [&](const WorkingParams& wp, Tracker& t) {
        const auto grid = draw_grid(wp, std::min<std::size_t>(o.grid_points, 2000));
        for (double w : grid) {
            const SelfCovariance c = covariance_self(wp, w);
            t.add(rel(c.det, c.det_closed));
        }
    });
}

IdentityResult check_mutual_routes(const VerifyOptions& o) {
    return sweep(o, 6, "mutual_routes", 1e-10, random_mutual_draw, [&](const WorkingParams& wp, Tracker& t) {
        for (double w : draw_grid(wp, o.grid_points)) {
            const MutualTransfer m = mutual_output_transfer(wp, w);
            // relative to the size of the transfer matrix
            const double scale = std::max({std::abs(m.wiener.t_aa), std::abs(m.wiener.t_ab),
                                           std::abs(m.sme.t_aa), std::abs(m.sme.t_ab)});
            t.add(std::max(std::abs(m.wiener.t_aa - m.sme.t_aa), std::abs(m.wiener.t_ab - m.sme.t_ab)) / scale);
        }
    });
}

IdentityResult check_riccati_steady(const VerifyOptions& o) {
    return sweep(o, 7, "riccati_steady", 1e-8, random_self_draw, [&](const WorkingParams& wp, Tracker& t) {
        const SteadyMoments st = steady_vxx(wp);
        ConditionalMoments m0 = st.moments;
        m0.vxx *= 10.0;
        const double horizon = 60.0 / (wp.gamma_m + st.gain);
        const ConditionalMoments m = riccati_propagate(m0, wp, horizon);
        t.add(rel(m.vxx, st.moments.vxx));
    });
}

IdentityResult check_roots(const VerifyOptions& o) {
    return sweep(o, 8, "roots_companion", 1e-10, random_self_draw, [&](const WorkingParams& wp, Tracker& t) {
        const SpectralRoots r = spectral_roots(wp);
        const std::vector<cplx> z = companion_lower_roots(wp);
        const double scale = std::max(std::abs(r.beta), std::abs(r.beta_c));
        const cplx b1 = r.beta, b2 = -r.beta_c;
        const double e1 = std::max(std::abs(b1 - z[0]), std::abs(b2 - z[1]));
        const double e2 = std::max(std::abs(b1 - z[1]), std::abs(b2 - z[0]));
        t.add(std::min(e1, e2) / scale);
    });
}

IdentityResult check_factorization(const VerifyOptions& o) {
    return sweep(o, 9, "factorization", 1e-10, random_self_draw, [&](const WorkingParams& wp, Tracker& t) {
        const SpectralRoots r = spectral_roots(wp);
        for (double w : draw_grid(wp, o.grid_points))
            t.add(rel((phi_plus(r, w) * phi_minus(r, w)).real(), spectrum_quantum_direct(wp, w)));
    });
}

IdentityResult check_negativity(const VerifyOptions& o) {
    DrawStream rng(stream_seed(o.seed, 10));
    Tracker t("negativity_symplectic", 1e-10);
    for (std::size_t d = 0; d < o.draws; ++d) {
        t.draw = d;
        const Eigen::Matrix4d s = random_state(rng);
        CovarianceBlocks b;
        b.sigma_a = s.topLeftCorner<2, 2>().cast<cplx>();
        b.sigma_b = s.bottomRightCorner<2, 2>().cast<cplx>();
        b.sigma_ab = s.topRightCorner<2, 2>().cast<cplx>();
        const NegativityResult n = log_negativity(b);
        t.add(std::abs(n.n_raw - symplectic_negativity(s)));
    }
    return t.finish(o.draws);
}

bool VerifyReport::passed() const {
    return std::all_of(identities.begin(), identities.end(), [](const IdentityResult& r) { return r.passed; });
}

json VerifyReport::to_json() const {
    json j;
    j["schema"] = "sncc-verify-report/1";
    j["draws"] = draws;
    j["seed"] = seed;
    j["passed"] = passed();
    j["degenerate_draws"] = degenerate_draws;
    j["real_root_draws"] = real_root_draws;
    j["identities"] = json::array();
    for (const auto& r : identities)
        j["identities"].push_back({{"name", r.name},
                                   {"tolerance", r.tolerance},
                                   {"max_residual", r.max_residual},
                                   {"draws", r.draws},
                                   {"evaluations", r.evaluations},
                                   {"worst_draw", r.worst_draw},
                                   {"passed", r.passed}});
    j["root_table"] = root_table;
    return j;
}

VerifyReport run_verify(const VerifyOptions& o) {
    VerifyReport rep;
    rep.draws = o.draws;
    rep.seed = o.seed;
    rep.identities = {check_kalman_wiener(o),   check_filters_three_way(o), check_spectrum_identity(o),
                      check_spectrum_routes(o), check_covariance_det(o),    check_mutual_routes(o),
                      check_riccati_steady(o),  check_roots(o),             check_factorization(o),
                      check_negativity(o)};

    DrawStream rng(stream_seed(o.seed, 1));
    for (std::size_t d = 0; d < o.draws; ++d) {
        const SpectralRoots r = spectral_roots(random_self_draw(rng));
        rep.degenerate_draws += r.near_degenerate;
        rep.real_root_draws += r.regime == RootRegime::RealRoots;
    }

    auto row = [](const std::string& name, const WorkingParams& wp) {
        const SpectralRoots r = spectral_roots(wp);
        auto c = [](cplx z) { return json::array({z.real(), z.imag()}); };
        return json{{"case", name},
                    {"beta", c(r.beta)},
                    {"beta_c", c(r.beta_c)},
                    {"eta", c(r.eta)},
                    {"a1", r.a1},
                    {"a2", r.a2},
                    {"regime", r.regime == RootRegime::ComplexPair ? "complex_pair" : "real_roots"},
                    {"near_degenerate", r.near_degenerate}};
    };
    rep.root_table.push_back(row("table1_sn", derive_working_params(table1_params())));
    PhysicalParams q1 = table1_params();
    q1.theory = Theory::QG;
    rep.root_table.push_back(row("table1_qg", derive_working_params(q1)));
    rep.root_table.push_back(row("table2_sn", derive_working_params(table2_params())));
    return rep;
}

}  // namespace sncc
