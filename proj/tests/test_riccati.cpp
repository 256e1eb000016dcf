#include "doctest.h"

#include <array>

#include "sncc/riccati.hpp"
#include "test_support.hpp"

using namespace sncc;

namespace {

// Independent fixed-step RK4 integration of the moment equations.
ConditionalMoments rk4(ConditionalMoments m, const WorkingParams& wp, double t, int steps) {
    const double h = t / steps;
    const double w2 = wp.quantum_omega() * wp.quantum_omega(), g = wp.gamma_m;
    const double s = std::sin(wp.theta), c = std::cos(wp.theta), L2 = wp.lambda * wp.lambda;
    const double Lt2 = wp.lambda_tilde * wp.lambda_tilde;
    auto f = [&](const std::array<double, 3>& v) {
        const double xx = v[0], xp = v[1], pp = v[2];
        return std::array<double, 3>{
            2.0 * xp - 2.0 * L2 * s * s * xx * xx,
            pp - w2 * xx - g * xp - 2.0 * L2 * s * s * xx * xp - L2 * s * c * xx,
            -2.0 * w2 * xp - 2.0 * g * pp + 0.5 * (Lt2 - L2 * c * c) - 2.0 * L2 * s * s * xp * xp -
                2.0 * L2 * s * c * xp};
    };
    std::array<double, 3> v{m.vxx, m.vxp, m.vpp};
    for (int k = 0; k < steps; ++k) {
        auto add = [](std::array<double, 3> a, const std::array<double, 3>& b, double x) {
            for (int i = 0; i < 3; ++i) a[i] += x * b[i];
            return a;
        };
        const auto k1 = f(v), k2 = f(add(v, k1, h / 2)), k3 = f(add(v, k2, h / 2)), k4 = f(add(v, k3, h));
        for (int i = 0; i < 3; ++i) v[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }
    return {v[0], v[1], v[2]};
}

}  // namespace

TEST_SUITE("riccati") {

TEST_CASE("free mass steady state") {
    PhysicalParams p;
    p.omega_m = 1e-12;
    p.lambda = 2.0;
    const WorkingParams wp = derive_working_params(p);
    const SteadyMoments st = steady_vxx(wp);
    CHECK(st.moments.vxx == doctest::Approx(1.0 / (std::sqrt(2.0) * 2.0)).epsilon(1e-9));
    CHECK(st.moments.vxp == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(st.moments.vpp == doctest::Approx(2.0 / std::sqrt(2.0)).epsilon(1e-9));
}

TEST_CASE("steady state is a fixed point of the moment equations") {
    std::mt19937_64 eng(21);
    for (int d = 0; d < 100; ++d) {
        const WorkingParams wp = testing::random_params(eng);
        const SteadyMoments st = steady_vxx(wp);
        const ConditionalMoments r = riccati_rhs(st.moments, wp);
        const ConditionalMoments& m = st.moments;
        const double w = wp.quantum_omega();
        CHECK(std::abs(r.vxx) <= 1e-9 * std::abs(m.vxp));
        CHECK(std::abs(r.vxp) <= 1e-9 * (std::abs(m.vpp) + w * w * m.vxx));
        CHECK(std::abs(r.vpp) <= 1e-9 * (w * w * std::abs(m.vxp) + std::abs(m.vpp) * (wp.gamma_m + 1.0) +
                                        wp.lambda_tilde * wp.lambda_tilde));
        CHECK(is_valid_covariance(m));
        CHECK(m.det() > 0.0);
        CHECK(st.vxx_compact == doctest::Approx(m.vxx).epsilon(1e-9));
    }
}

TEST_CASE("undamped conditional state without a bath is pure") {
    std::mt19937_64 eng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int d = 0; d < 20; ++d) {
        PhysicalParams p;
        p.omega_m = 0.5 + u(eng);
        p.omega_grav = 0.5 * u(eng);
        p.lambda = 0.1 + 2.0 * u(eng);
        p.gamma_m = 0.0;
        const SteadyMoments st = steady_vxx(derive_working_params(p));
        CHECK(st.moments.det() == doctest::Approx(0.25).epsilon(1e-9));
    }
}

TEST_CASE("RK4 oracle converges onto the closed form") {
    std::mt19937_64 eng(22);
    for (int d = 0; d < 10; ++d) {
        PhysicalParams p;
        std::uniform_real_distribution<double> u(0.0, 1.0);
        p.omega_m = 1.0;
        p.gamma_m = 0.05 + 0.2 * u(eng);
        p.lambda = 0.3 + 2.0 * u(eng);
        p.theta = 0.3 + 2.5 * u(eng);
        p.omega_grav = 0.5 * u(eng);
        const WorkingParams wp = derive_working_params(p);
        const SteadyMoments st = steady_vxx(wp);
        const ConditionalMoments start{3.0 * st.moments.vxx, 0.0, 3.0 * st.moments.vpp};
        const double t = 80.0 / (wp.gamma_m + st.gain);
        const ConditionalMoments m = rk4(start, wp, t, static_cast<int>(t / 1e-3));
        CHECK(m.vxx == doctest::Approx(st.moments.vxx).epsilon(1e-9));
        CHECK(m.vxp == doctest::Approx(st.moments.vxp).epsilon(1e-8));
        CHECK(m.vpp == doctest::Approx(st.moments.vpp).epsilon(1e-9));
    }
}

TEST_CASE("exact propagation agrees with the library RK4 step") {
    PhysicalParams p;
    p.omega_m = 1.0;
    p.gamma_m = 0.1;
    p.lambda = 0.8;
    p.theta = 1.2;
    const WorkingParams wp = derive_working_params(p);
    const ConditionalMoments start{2.0, 0.3, 1.5};
    ConditionalMoments m = start;
    for (int k = 0; k < 5000; ++k) m = riccati_step(m, wp, 1e-3);
    const ConditionalMoments e = riccati_propagate(start, wp, 5.0);
    CHECK(e.vxx == doctest::Approx(m.vxx).epsilon(1e-10));
    CHECK(e.vxp == doctest::Approx(m.vxp).epsilon(1e-10));
    CHECK(e.vpp == doctest::Approx(m.vpp).epsilon(1e-10));
    const ConditionalMoments o = rk4(start, wp, 5.0, 5000);
    CHECK(o.vxx == doctest::Approx(m.vxx).epsilon(1e-12));
}

TEST_CASE("without measurement the moments rotate") {
    PhysicalParams p;
    p.omega_m = 2.0;
    p.lambda = 0.0;
    const WorkingParams wp = derive_working_params(p);
    const ConditionalMoments start{1.0, 0.0, 0.0};
    const double t = 0.3;
    const ConditionalMoments m = riccati_propagate(start, wp, t);
    const double c = std::cos(2.0 * t), s = std::sin(2.0 * t);
    CHECK(m.vxx == doctest::Approx(c * c).epsilon(1e-12));
    CHECK(m.vxp == doctest::Approx(-2.0 * s * c).epsilon(1e-12));
    CHECK(m.vpp == doctest::Approx(4.0 * s * s).epsilon(1e-12));
}

TEST_CASE("invalid inputs") {
    PhysicalParams p;
    p.lambda = 1.0;
    const WorkingParams wp = derive_working_params(p);
    CHECK_THROWS_AS(riccati_step({1, 0, 1}, wp, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(riccati_propagate({1, 0, 1}, wp, -1.0), std::invalid_argument);
    CHECK_FALSE(is_valid_covariance({1.0, 2.0, 1.0}));
    CHECK_FALSE(is_valid_covariance({NAN, 0.0, 1.0}));
    CHECK(is_valid_covariance({1.0, 0.5, 1.0}));
}

}
