#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sncc/model.hpp"
#include "sncc/riccati.hpp"

namespace sncc {

struct MirrorState {
    double x = 0.0;   // conditional mean, reduced units
    double p = 0.0;
    ConditionalMoments moments;
};

struct TrajectoryState {
    std::vector<MirrorState> mirrors;
    double t = 0.0;
};

class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Means at zero, moments at the closed-form steady state.
TrajectoryState initial_state(const WorkingParams& wp);

// Euler-Maruyama step of the conditional means. dW ~ N(0, dt) drives the
// homodyne noise, d_force ~ N(0, dt) the classical thermal force.
// Returns the stored sample sqrt(2 dt) * y~ (white floor 1).
std::pair<TrajectoryState, double> trajectory_step_self(const TrajectoryState& s, const WorkingParams& wp,
                                                        double dW, double dt, bool co_evolve = false,
                                                        double d_force = 0.0);

std::pair<TrajectoryState, std::array<double, 2>> trajectory_step_mutual(
    const TrajectoryState& s, const WorkingParams& wp, double dW_a, double dW_b, double dt,
    bool co_evolve = false, double d_force_a = 0.0, double d_force_b = 0.0);

// Largest step allowed: min(2 pi/omega_q, 1/Lambda, 1/gamma) / 50.
double max_stable_dt(const WorkingParams& wp);

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index);

// Standard normals from mt19937_64 via Box-Muller, identical across platforms.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : eng_(seed) {}
    double next();

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

enum class Integrator { Exact, EulerMaruyama };

std::string to_string(Integrator i);
Integrator integrator_from_string(const std::string& s);

struct RecordSpec {
    std::size_t samples = 0;
    double dt = 0.0;
    std::uint64_t seed = 0;
    Integrator integrator = Integrator::Exact;
    bool co_evolve = false;          // Euler-Maruyama only: transient moments
    bool stationary_start = true;    // draw initial means from the stationary law
    std::optional<ConditionalMoments> initial_moments;   // default: steady state
};

struct MeasurementRecord {
    double dt = 0.0;
    std::vector<std::string> channels;
    std::vector<std::vector<double>> samples;   // [channel][k]
    std::uint64_t seed = 0;
    std::uint64_t trajectory = 0;
    std::array<std::uint64_t, 2> channel_seeds{};
    double duration() const { return dt * static_cast<double>(samples.empty() ? 0 : samples[0].size()); }
};

// Linear-Gaussian form of the conditional-mean dynamics augmented by the
// integrated record(s): dz = F z dt + G dW.
struct LinearGaussianModel {
    Eigen::MatrixXd F;
    Eigen::MatrixXd G;
    int means = 0;     // leading block of z holding conditional means
    int records = 0;   // trailing block holding integrated records
};

LinearGaussianModel conditional_mean_model(const WorkingParams& wp);

// Exact one-step transition of a LinearGaussianModel.
class ExactPropagator {
public:
    ExactPropagator(const LinearGaussianModel& model, double dt);
    const Eigen::MatrixXd& transition() const { return phi_; }
    const Eigen::MatrixXd& noise_root() const { return root_; }
    const Eigen::MatrixXd& stationary_root() const { return stationary_root_; }

private:
    Eigen::MatrixXd phi_;
    Eigen::MatrixXd root_;
    Eigen::MatrixXd stationary_root_;
};

// Symmetric positive semidefinite square root.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m);

// Stationary covariance of dz = F z dt + G dW (F stable).
Eigen::MatrixXd lyapunov_stationary(const Eigen::MatrixXd& F, const Eigen::MatrixXd& G);

MeasurementRecord simulate_record(const WorkingParams& wp, const RecordSpec& spec, std::uint64_t trajectory = 0);

// Explicit per-channel seeds (used to check A/B exchange symmetry).
MeasurementRecord simulate_record_seeded(const WorkingParams& wp, const RecordSpec& spec,
                                         const std::array<std::uint64_t, 2>& channel_seeds);

}  // namespace sncc
