#pragma once

#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace sncc {

using cplx = std::complex<double>;

inline constexpr double kHbar = 1.054571817e-34;      // J s
inline constexpr double kBoltzmann = 1.380649e-23;    // J/K
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class Protocol { SelfGravity, MutualGravity };
enum class Theory { SN, QG };
enum class ThermalBath { None, Quantum, Classical };

std::string to_string(Protocol p);
std::string to_string(Theory t);
std::string to_string(ThermalBath b);
Protocol protocol_from_string(const std::string& s);
Theory theory_from_string(const std::string& s);
ThermalBath bath_from_string(const std::string& s);

class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Physical inputs. Frequencies in rad/s.
struct PhysicalParams {
    double mass = 1.0;                  // kg
    double omega_m = 1.0;
    double gamma_m = 0.0;
    double omega_grav = 0.0;            // omega_SN (self) or omega_g (mutual)
    std::optional<double> lambda;       // measurement strength
    std::optional<double> alpha;        // raw coupling, converted with mass
    double theta = std::numbers::pi / 2;
    double theta_T = 0.0;               // k_B T / hbar
    Protocol protocol = Protocol::SelfGravity;
    Theory theory = Theory::SN;
    ThermalBath bath = ThermalBath::None;
};

struct WorkingParams {
    double omega_m = 1.0;
    double gamma_m = 0.0;
    double omega_q = 1.0;
    double omega_grav = 0.0;
    double lambda = 0.0;
    double lambda_tilde = 0.0;          // enters the conditional variance
    double theta = std::numbers::pi / 2;
    double theta_T = 0.0;
    Protocol protocol = Protocol::SelfGravity;
    Theory theory = Theory::SN;
    ThermalBath bath = ThermalBath::None;

    // Restoring frequency of the quantum dynamics (omega_m for self-gravity QG).
    double quantum_omega() const;
    // Net stiffness acting on the conditional mean of a single mirror.
    double mean_omega() const;
    // Thermal force intensity 4 gamma theta_T (zero when no bath).
    double thermal_force() const;
    // Part of the thermal force that is a classical drive of the mean.
    double classical_force() const;
    double sin_theta() const;
    double cos_theta() const;
};

WorkingParams derive_working_params(const PhysicalParams& p);

// Same physics, different homodyne angle.
WorkingParams with_theta(WorkingParams wp, double theta);

double temperature_to_theta_T(double kelvin);
double quality_to_gamma(double omega_m, double quality);

// Sample parameters. Cavity rows are not modelled; Lambda is chosen here.
PhysicalParams table1_params();
PhysicalParams table2_params();

}  // namespace sncc
