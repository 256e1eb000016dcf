#include "sncc/model.hpp"

#include <cmath>

namespace sncc {

std::string to_string(Protocol p) { return p == Protocol::SelfGravity ? "self" : "mutual"; }
std::string to_string(Theory t) { return t == Theory::SN ? "sn" : "qg"; }
std::string to_string(ThermalBath b) {
    switch (b) {
        case ThermalBath::None: return "none";
        case ThermalBath::Quantum: return "quantum";
        case ThermalBath::Classical: return "classical";
    }
    return "none";
}

Protocol protocol_from_string(const std::string& s) {
    if (s == "self") return Protocol::SelfGravity;
    if (s == "mutual") return Protocol::MutualGravity;
    throw ParameterError("unknown protocol: " + s);
}

Theory theory_from_string(const std::string& s) {
    if (s == "sn") return Theory::SN;
    if (s == "qg") return Theory::QG;
    throw ParameterError("unknown theory: " + s);
}

ThermalBath bath_from_string(const std::string& s) {
    if (s == "none") return ThermalBath::None;
    if (s == "quantum") return ThermalBath::Quantum;
    if (s == "classical") return ThermalBath::Classical;
    throw ParameterError("unknown bath prescription: " + s);
}

double WorkingParams::quantum_omega() const {
    if (protocol == Protocol::SelfGravity && theory == Theory::QG) return omega_m;
    return omega_q;
}

double WorkingParams::mean_omega() const {
    if (protocol == Protocol::SelfGravity) return omega_m;
    return omega_q;
}

double WorkingParams::thermal_force() const {
    return bath == ThermalBath::None ? 0.0 : 4.0 * gamma_m * theta_T;
}

double WorkingParams::classical_force() const {
    return (theory == Theory::SN && bath == ThermalBath::Classical) ? thermal_force() : 0.0;
}

double WorkingParams::sin_theta() const { return std::sin(theta); }
double WorkingParams::cos_theta() const { return std::cos(theta); }

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ParameterError(what);
}

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

WorkingParams derive_working_params(const PhysicalParams& p) {
    require(std::isfinite(p.mass) && p.mass > 0.0, "mass must be positive");
    require(std::isfinite(p.omega_m) && p.omega_m > 0.0, "omega_m must be positive");
    require(finite_nonneg(p.gamma_m), "gamma_m must be >= 0");
    require(finite_nonneg(p.omega_grav), "gravity frequency must be >= 0");
    require(finite_nonneg(p.theta_T), "theta_T must be >= 0");
    require(std::isfinite(p.theta), "theta must be finite");
    require(p.lambda.has_value() != p.alpha.has_value(),
            "give exactly one of lambda or alpha");

    WorkingParams w;
    w.omega_m = p.omega_m;
    w.gamma_m = p.gamma_m;
    w.omega_grav = p.omega_grav;
    w.theta = p.theta;
    w.theta_T = p.theta_T;
    w.protocol = p.protocol;
    w.theory = p.theory;
    w.bath = p.bath;

    if (p.lambda) {
        w.lambda = *p.lambda;
    } else {
        require(finite_nonneg(*p.alpha), "alpha must be >= 0");
        w.lambda = *p.alpha * std::sqrt(kHbar / p.mass);
    }
    require(finite_nonneg(w.lambda), "lambda must be >= 0");

    const double wm2 = p.omega_m * p.omega_m;
    const double wg2 = p.omega_grav * p.omega_grav;
    if (p.protocol == Protocol::SelfGravity) {
        w.omega_q = std::sqrt(wm2 + wg2);
    } else {
        require(p.omega_grav < p.omega_m, "mutual gravity needs omega_g < omega_m");
        w.omega_q = std::sqrt((p.omega_m - p.omega_grav) * (p.omega_m + p.omega_grav));
    }

    const bool thermal_in_variance =
        p.bath == ThermalBath::Quantum || (p.theory == Theory::QG && p.bath == ThermalBath::Classical);
    w.lambda_tilde = w.lambda;
    if (thermal_in_variance && p.theta_T > 0.0)
        w.lambda_tilde = std::sqrt(w.lambda * w.lambda + 4.0 * p.gamma_m * p.theta_T);
    return w;
}

WorkingParams with_theta(WorkingParams wp, double theta) {
    wp.theta = theta;
    return wp;
}

double temperature_to_theta_T(double kelvin) { return kBoltzmann * kelvin / kHbar; }

double quality_to_gamma(double omega_m, double quality) {
    if (!(quality > 0.0)) throw ParameterError("quality factor must be positive");
    return omega_m / quality;
}

PhysicalParams table1_params() {
    PhysicalParams p;
    p.mass = 0.2;
    p.omega_m = kTwoPi * 4e-3;
    p.gamma_m = quality_to_gamma(p.omega_m, 1e7);
    p.omega_grav = kTwoPi * 7.8e-2;
    p.lambda = kTwoPi * 0.1;
    p.protocol = Protocol::SelfGravity;
    return p;
}

PhysicalParams table2_params() {
    PhysicalParams p;
    p.mass = 1e-3;
    p.omega_m = kTwoPi * 0.5;
    p.gamma_m = quality_to_gamma(p.omega_m, 3e7);
    p.omega_grav = kTwoPi * 2e-4;
    p.lambda = kTwoPi * 1.0;
    p.protocol = Protocol::MutualGravity;
    return p;
}

}  // namespace sncc
