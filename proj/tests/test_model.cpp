#include "doctest.h"

#include <cmath>

#include "sncc/model.hpp"

using namespace sncc;

TEST_SUITE("model") {

TEST_CASE("string round trips") {
    for (Protocol p : {Protocol::SelfGravity, Protocol::MutualGravity}) CHECK(protocol_from_string(to_string(p)) == p);
    for (Theory t : {Theory::SN, Theory::QG}) CHECK(theory_from_string(to_string(t)) == t);
    for (ThermalBath b : {ThermalBath::None, ThermalBath::Quantum, ThermalBath::Classical})
        CHECK(bath_from_string(to_string(b)) == b);
    CHECK_THROWS_AS(theory_from_string("newton"), ParameterError);
    CHECK_THROWS_AS(bath_from_string("hot"), ParameterError);
}

TEST_CASE("self gravity shifts the mean frequency") {
    PhysicalParams p;
    p.omega_m = 3.0;
    p.omega_grav = 4.0;
    p.lambda = 1.0;
    const WorkingParams sn = derive_working_params(p);
    CHECK(sn.omega_q == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(sn.quantum_omega() == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(sn.mean_omega() == 3.0);
    p.theory = Theory::QG;
    const WorkingParams qg = derive_working_params(p);
    CHECK(qg.quantum_omega() == 3.0);
}

TEST_CASE("mutual gravity softens the mode") {
    PhysicalParams p;
    p.protocol = Protocol::MutualGravity;
    p.omega_m = 5.0;
    p.omega_grav = 3.0;
    p.lambda = 1.0;
    const WorkingParams w = derive_working_params(p);
    CHECK(w.omega_q == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(w.mean_omega() == w.omega_q);
    p.omega_grav = 5.0;
    CHECK_THROWS_AS(derive_working_params(p), ParameterError);
}

TEST_CASE("alpha converts with the mass") {
    PhysicalParams p;
    p.mass = 2.0;
    p.lambda.reset();
    p.alpha = 3.0;
    const WorkingParams w = derive_working_params(p);
    CHECK(w.lambda == doctest::Approx(3.0 * std::sqrt(kHbar / 2.0)).epsilon(1e-15));
    p.lambda = 1.0;
    CHECK_THROWS_AS(derive_working_params(p), ParameterError);
    p.alpha.reset();
    p.lambda.reset();
    CHECK_THROWS_AS(derive_working_params(p), ParameterError);
}

TEST_CASE("invalid inputs are rejected") {
    PhysicalParams p;
    p.lambda = 1.0;
    auto bad = [&](auto mutate) {
        PhysicalParams q = p;
        mutate(q);
        CHECK_THROWS_AS(derive_working_params(q), ParameterError);
    };
    bad([](PhysicalParams& q) { q.mass = 0.0; });
    bad([](PhysicalParams& q) { q.omega_m = -1.0; });
    bad([](PhysicalParams& q) { q.gamma_m = -1e-3; });
    bad([](PhysicalParams& q) { q.theta_T = NAN; });
    bad([](PhysicalParams& q) { q.lambda = -1.0; });
    bad([](PhysicalParams& q) { q.theta = INFINITY; });
    CHECK_THROWS_AS(quality_to_gamma(1.0, 0.0), ParameterError);
}

TEST_CASE("thermal noise enters the variance by prescription") {
    PhysicalParams p;
    p.lambda = 2.0;
    p.gamma_m = 0.1;
    p.theta_T = 5.0;
    const double lt = std::sqrt(4.0 + 4.0 * 0.1 * 5.0);
    p.bath = ThermalBath::None;
    CHECK(derive_working_params(p).lambda_tilde == 2.0);
    CHECK(derive_working_params(p).thermal_force() == 0.0);
    p.bath = ThermalBath::Quantum;
    CHECK(derive_working_params(p).lambda_tilde == doctest::Approx(lt).epsilon(1e-15));
    CHECK(derive_working_params(p).classical_force() == 0.0);
    p.bath = ThermalBath::Classical;
    CHECK(derive_working_params(p).lambda_tilde == 2.0);
    CHECK(derive_working_params(p).classical_force() == doctest::Approx(2.0).epsilon(1e-15));
    p.theory = Theory::QG;
    CHECK(derive_working_params(p).lambda_tilde == doctest::Approx(lt).epsilon(1e-15));
    CHECK(derive_working_params(p).classical_force() == 0.0);
}

TEST_CASE("unit conversions") {
    CHECK(temperature_to_theta_T(1.0) == doctest::Approx(kBoltzmann / kHbar).epsilon(1e-15));
    CHECK(quality_to_gamma(10.0, 100.0) == doctest::Approx(0.1));
    const WorkingParams t1 = derive_working_params(table1_params());
    CHECK(t1.protocol == Protocol::SelfGravity);
    CHECK(t1.omega_m == doctest::Approx(kTwoPi * 4e-3));
    CHECK(t1.gamma_m == doctest::Approx(t1.omega_m / 1e7));
    const WorkingParams t2 = derive_working_params(table2_params());
    CHECK(t2.protocol == Protocol::MutualGravity);
    CHECK(t2.omega_q < t2.omega_m);
}

}
