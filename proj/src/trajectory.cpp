#include "sncc/trajectory.hpp"

#include <cmath>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

namespace sncc {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

struct Gains {
    double gx;   // innovation gain on x
    double gp;   // innovation gain on p
};

Gains innovation_gains(const WorkingParams& wp, const ConditionalMoments& m) {
    const double s = std::sin(wp.theta), c = std::cos(wp.theta);
    const double L = wp.lambda;
    return {kSqrt2 * s * L * m.vxx, kSqrt2 * s * L * m.vxp + L * c / kSqrt2};
}

void check_finite(const MirrorState& m) {
    if (!std::isfinite(m.x) || !std::isfinite(m.p)) throw DivergenceError("trajectory diverged (non-finite mean)");
}

}  // namespace

TrajectoryState initial_state(const WorkingParams& wp) {
    TrajectoryState s;
    const ConditionalMoments m = steady_vxx(wp).moments;
    const int n = wp.protocol == Protocol::SelfGravity ? 1 : 2;
    s.mirrors.assign(n, MirrorState{0.0, 0.0, m});
    return s;
}

std::pair<TrajectoryState, double> trajectory_step_self(const TrajectoryState& s, const WorkingParams& wp,
                                                        double dW, double dt, bool co_evolve, double d_force) {
    if (s.mirrors.size() != 1) throw std::invalid_argument("trajectory_step_self: expected one mirror");
    const MirrorState& in = s.mirrors[0];
    const Gains k = innovation_gains(wp, in.moments);
    const double wq = wp.quantum_omega();
    const double wsn2 = (wp.theory == Theory::SN && wp.protocol == Protocol::SelfGravity)
                            ? wp.omega_grav * wp.omega_grav
                            : 0.0;
    const double ls = wp.lambda * std::sin(wp.theta);

    TrajectoryState out = s;
    MirrorState& m = out.mirrors[0];
    m.x = in.x + in.p * dt + k.gx * dW;
    m.p = in.p + (-wq * wq * in.x + wsn2 * in.x - wp.gamma_m * in.p) * dt + k.gp * dW +
          std::sqrt(0.5 * wp.classical_force()) * d_force;
    if (co_evolve) m.moments = riccati_step(in.moments, wp, dt);
    out.t = s.t + dt;
    check_finite(m);
    const double sample = ls * in.x * std::sqrt(2.0 * dt) + dW / std::sqrt(dt);
    return {out, sample};
}

std::pair<TrajectoryState, std::array<double, 2>> trajectory_step_mutual(
    const TrajectoryState& s, const WorkingParams& wp, double dW_a, double dW_b, double dt, bool co_evolve,
    double d_force_a, double d_force_b) {
    if (s.mirrors.size() != 2) throw std::invalid_argument("trajectory_step_mutual: expected two mirrors");
    if (wp.theory != Theory::SN) throw ParameterError("trajectory_step_mutual: SN conditional means only");
    const double wq2 = wp.omega_q * wp.omega_q;
    const double wg2 = wp.omega_grav * wp.omega_grav;
    const double ls = wp.lambda * std::sin(wp.theta);
    const double fc = std::sqrt(0.5 * wp.classical_force());
    const std::array<double, 2> dW{dW_a, dW_b};
    const std::array<double, 2> dF{d_force_a, d_force_b};

    TrajectoryState out = s;
    std::array<double, 2> samples{};
    for (int i = 0; i < 2; ++i) {
        const MirrorState& in = s.mirrors[i];
        const MirrorState& other = s.mirrors[1 - i];
        const Gains k = innovation_gains(wp, in.moments);
        MirrorState& m = out.mirrors[i];
        m.x = in.x + in.p * dt + k.gx * dW[i];
        m.p = in.p + (-wq2 * in.x + wg2 * other.x - wp.gamma_m * in.p) * dt + k.gp * dW[i] + fc * dF[i];
        if (co_evolve) m.moments = riccati_step(in.moments, wp, dt);
        check_finite(m);
        samples[i] = ls * in.x * std::sqrt(2.0 * dt) + dW[i] / std::sqrt(dt);
    }
    out.t = s.t + dt;
    return {out, samples};
}

double max_stable_dt(const WorkingParams& wp) {
    double t = std::numeric_limits<double>::infinity();
    const double wq = wp.quantum_omega();
    if (wq > 0.0) t = std::min(t, kTwoPi / wq);
    if (wp.lambda > 0.0) t = std::min(t, 1.0 / wp.lambda);
    if (wp.gamma_m > 0.0) t = std::min(t, 1.0 / wp.gamma_m);
    return t / 50.0;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

double NormalStream::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    constexpr double scale = 1.0 / 9007199254740992.0;   // 2^-53
    double u1;
    do {
        u1 = static_cast<double>(eng_() >> 11) * scale;
    } while (u1 <= 0.0);
    const double u2 = static_cast<double>(eng_() >> 11) * scale;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = kTwoPi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

std::string to_string(Integrator i) { return i == Integrator::Exact ? "exact" : "euler-maruyama"; }

Integrator integrator_from_string(const std::string& s) {
    if (s == "exact") return Integrator::Exact;
    if (s == "euler-maruyama" || s == "em") return Integrator::EulerMaruyama;
    throw ParameterError("unknown integrator: " + s);
}

namespace {

// Single oscillator mode with its integrated record: z = (x, p, record), noise (dW, dF).
LinearGaussianModel single_mode(double w2, double gamma, const Gains& k, double ls, double fc) {
    LinearGaussianModel lg;
    lg.means = 2;
    lg.records = 1;
    lg.F = Eigen::MatrixXd::Zero(3, 3);
    lg.F(0, 1) = 1.0;
    lg.F(1, 0) = -w2;
    lg.F(1, 1) = -gamma;
    lg.F(2, 0) = ls;
    lg.G = Eigen::MatrixXd::Zero(3, 2);
    lg.G(0, 0) = k.gx;
    lg.G(1, 0) = k.gp;
    lg.G(2, 0) = 1.0 / kSqrt2;
    lg.G(1, 1) = fc;
    return lg;
}

// Normal modes of the conditional-mean dynamics: one for self gravity; (A + B)/sqrt2 and
// (A - B)/sqrt2 for mutual gravity, with stiffness omega_q^2 -/+ omega_g^2.
std::vector<LinearGaussianModel> mode_models(const WorkingParams& wp) {
    const Gains k = innovation_gains(wp, steady_vxx(wp).moments);
    const double ls = wp.lambda * std::sin(wp.theta);
    const double fc = std::sqrt(0.5 * wp.classical_force());
    if (wp.protocol == Protocol::SelfGravity) {
        const double w = wp.mean_omega();
        return {single_mode(w * w, wp.gamma_m, k, ls, fc)};
    }
    if (wp.theory != Theory::SN) throw ParameterError("conditional_mean_model: SN conditional means only");
    const double wq2 = wp.omega_q * wp.omega_q;
    const double wg2 = wp.omega_grav * wp.omega_grav;
    return {single_mode(wq2 - wg2, wp.gamma_m, k, ls, fc), single_mode(wq2 + wg2, wp.gamma_m, k, ls, fc)};
}

}  // namespace

LinearGaussianModel conditional_mean_model(const WorkingParams& wp) {
    if (wp.protocol == Protocol::SelfGravity) return mode_models(wp).front();
    if (wp.theory != Theory::SN) throw ParameterError("conditional_mean_model: SN conditional means only");
    const ConditionalMoments m = steady_vxx(wp).moments;
    const Gains k = innovation_gains(wp, m);
    const double ls = wp.lambda * std::sin(wp.theta);
    const double fc = std::sqrt(0.5 * wp.classical_force());
    const double wq2 = wp.omega_q * wp.omega_q;
    const double wg2 = wp.omega_grav * wp.omega_grav;
    LinearGaussianModel lg;
    lg.means = 4;
    lg.records = 2;
    lg.F = Eigen::MatrixXd::Zero(6, 6);
    lg.G = Eigen::MatrixXd::Zero(6, 4);
    for (int i = 0; i < 2; ++i) {
        const int x = 2 * i, p = 2 * i + 1, xo = 2 * (1 - i);
        lg.F(x, p) = 1.0;
        lg.F(p, x) = -wq2;
        lg.F(p, p) = -wp.gamma_m;
        lg.F(p, xo) = wg2;
        lg.F(4 + i, x) = ls;
        lg.G(x, 2 * i) = k.gx;
        lg.G(p, 2 * i) = k.gp;
        lg.G(4 + i, 2 * i) = 1.0 / kSqrt2;
        lg.G(p, 2 * i + 1) = fc;
    }
    return lg;
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
    const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    Eigen::VectorXd d = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd lyapunov_stationary(const Eigen::MatrixXd& F, const Eigen::MatrixXd& G) {
    const Eigen::Index n = F.rows();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n * n, n * n);
    // vec(F P + P F^T) = (I kron F + F kron I) vec(P), column-major vec
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            K.block(i * n, j * n, n, n) += I(i, j) * F;
            K.block(i * n, j * n, n, n) += F(i, j) * I;
        }
    const Eigen::MatrixXd Q = G * G.transpose();
    const Eigen::VectorXd q = Eigen::Map<const Eigen::VectorXd>(Q.data(), n * n);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
    if (!lu.isInvertible()) throw std::runtime_error("lyapunov_stationary: dynamics not strictly stable");
    Eigen::VectorXd p = lu.solve(-q);
    Eigen::MatrixXd P = Eigen::Map<Eigen::MatrixXd>(p.data(), n, n);
    return 0.5 * (P + P.transpose());
}

ExactPropagator::ExactPropagator(const LinearGaussianModel& model, double dt) {
    const Eigen::Index n = model.F.rows();
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    C.topLeftCorner(n, n) = -model.F * dt;
    C.topRightCorner(n, n) = model.G * model.G.transpose() * dt;
    C.bottomRightCorner(n, n) = model.F.transpose() * dt;
    const Eigen::MatrixXd E = C.exp();
    phi_ = E.bottomRightCorner(n, n).transpose();
    const Eigen::MatrixXd Qd = phi_ * E.topRightCorner(n, n);
    root_ = psd_sqrt(Qd);
    const int k = model.means;
    try {
        stationary_root_ = psd_sqrt(lyapunov_stationary(model.F.topLeftCorner(k, k), model.G.topRows(k)));
    } catch (const std::runtime_error&) {
        stationary_root_ = Eigen::MatrixXd::Zero(k, k);
    }
}

namespace {

// Per-mode standard normals from the two channel streams. With two modes the
// inputs are (a + b)/sqrt2 and (a - b)/sqrt2, so exchanging the streams leaves
// the first unchanged and negates the second exactly.
class ModeNoise {
public:
    ModeNoise(std::size_t modes, const std::array<std::uint64_t, 2>& seeds)
        : modes_(modes), rng_{NormalStream(seeds[0]), NormalStream(seeds[1])} {}

    void draw(std::size_t count, std::vector<std::vector<double>>& out) {
        out.assign(modes_, std::vector<double>(count));
        for (std::size_t i = 0; i < count; ++i) {
            if (modes_ == 1) {
                out[0][i] = rng_[0].next();
                continue;
            }
            const double a = rng_[0].next();
            const double b = rng_[1].next();
            out[0][i] = (a + b) / kSqrt2;
            out[1][i] = (a - b) / kSqrt2;
        }
    }

private:
    std::size_t modes_;
    std::array<NormalStream, 2> rng_;
};

// Mode coordinates back to mirror coordinates.
void to_mirrors(const std::vector<double>& v, std::array<double, 2>& out) {
    if (v.size() == 1) {
        out[0] = v[0];
        return;
    }
    out[0] = (v[0] + v[1]) / kSqrt2;
    out[1] = (v[0] - v[1]) / kSqrt2;
}

MeasurementRecord run_exact(const WorkingParams& wp, const RecordSpec& spec,
                            const std::array<std::uint64_t, 2>& seeds) {
    const std::vector<LinearGaussianModel> models = mode_models(wp);
    const std::size_t nm = models.size();
    std::vector<ExactPropagator> props;
    for (const auto& m : models) props.emplace_back(m, spec.dt);
    ModeNoise noise(nm, seeds);

    std::vector<std::array<double, 2>> z(nm, {0.0, 0.0});
    std::vector<std::vector<double>> xi;
    if (spec.stationary_start) {
        noise.draw(2, xi);
        for (std::size_t m = 0; m < nm; ++m) {
            const Eigen::MatrixXd& r = props[m].stationary_root();
            z[m] = {r(0, 0) * xi[m][0] + r(0, 1) * xi[m][1], r(1, 0) * xi[m][0] + r(1, 1) * xi[m][1]};
        }
    }
    MeasurementRecord rec;
    rec.samples.assign(nm, std::vector<double>(spec.samples));
    const double scale = std::sqrt(2.0 / spec.dt);
    std::vector<double> y(nm);
    std::array<double, 2> out{};
    for (std::size_t t = 0; t < spec.samples; ++t) {
        noise.draw(3, xi);
        for (std::size_t m = 0; m < nm; ++m) {
            const Eigen::MatrixXd& phi = props[m].transition();
            const Eigen::MatrixXd& root = props[m].noise_root();
            double next[3];
            for (int i = 0; i < 3; ++i) {
                double v = phi(i, 0) * z[m][0] + phi(i, 1) * z[m][1];
                for (int j = 0; j < 3; ++j) v += root(i, j) * xi[m][j];
                next[i] = v;
            }
            if (!std::isfinite(next[0]) || !std::isfinite(next[1]))
                throw DivergenceError("trajectory diverged (non-finite mean)");
            z[m] = {next[0], next[1]};
            y[m] = next[2];
        }
        to_mirrors(y, out);
        for (std::size_t c = 0; c < nm; ++c) rec.samples[c][t] = scale * out[c];
    }
    return rec;
}

MeasurementRecord run_euler(const WorkingParams& wp, const RecordSpec& spec,
                            const std::array<std::uint64_t, 2>& seeds) {
    TrajectoryState st = initial_state(wp);
    if (spec.initial_moments)
        for (auto& m : st.mirrors) m.moments = *spec.initial_moments;
    const std::size_t nm = st.mirrors.size();
    ModeNoise start(nm, seeds);
    if (spec.stationary_start) {
        const std::vector<LinearGaussianModel> models = mode_models(wp);
        std::vector<std::vector<double>> e;
        start.draw(2, e);
        std::vector<double> x(nm), p(nm);
        for (std::size_t m = 0; m < nm; ++m) {
            const Eigen::MatrixXd r =
                psd_sqrt(lyapunov_stationary(models[m].F.topLeftCorner(2, 2), models[m].G.topRows(2)));
            x[m] = r(0, 0) * e[m][0] + r(0, 1) * e[m][1];
            p[m] = r(1, 0) * e[m][0] + r(1, 1) * e[m][1];
        }
        std::array<double, 2> xs{}, ps{};
        to_mirrors(x, xs);
        to_mirrors(p, ps);
        for (std::size_t i = 0; i < nm; ++i) {
            st.mirrors[i].x = xs[i];
            st.mirrors[i].p = ps[i];
        }
    }
    std::array<NormalStream, 2> rng{NormalStream(stream_seed(seeds[0], 1)), NormalStream(stream_seed(seeds[1], 1))};
    const bool thermal = wp.classical_force() > 0.0;
    const double sdt = std::sqrt(spec.dt);
    MeasurementRecord rec;
    const std::size_t channels = st.mirrors.size();
    rec.samples.assign(channels, std::vector<double>(spec.samples));
    for (std::size_t t = 0; t < spec.samples; ++t) {
        if (channels == 1) {
            const double dW = sdt * rng[0].next();
            const double dF = thermal ? sdt * rng[0].next() : 0.0;
            auto [s2, y] = trajectory_step_self(st, wp, dW, spec.dt, spec.co_evolve, dF);
            st = std::move(s2);
            rec.samples[0][t] = y;
        } else {
            const double dWa = sdt * rng[0].next();
            const double dFa = thermal ? sdt * rng[0].next() : 0.0;
            const double dWb = sdt * rng[1].next();
            const double dFb = thermal ? sdt * rng[1].next() : 0.0;
            auto [s2, y] = trajectory_step_mutual(st, wp, dWa, dWb, spec.dt, spec.co_evolve, dFa, dFb);
            st = std::move(s2);
            rec.samples[0][t] = y[0];
            rec.samples[1][t] = y[1];
        }
    }
    return rec;
}

}  // namespace

MeasurementRecord simulate_record_seeded(const WorkingParams& wp, const RecordSpec& spec,
                                         const std::array<std::uint64_t, 2>& channel_seeds) {
    if (!(spec.dt > 0.0)) throw ParameterError("simulate_record: dt must be positive");
    if (spec.samples == 0) throw ParameterError("simulate_record: no samples requested");
    if (spec.co_evolve && spec.integrator == Integrator::Exact)
        throw ParameterError("simulate_record: transient co-evolution needs the Euler-Maruyama integrator");
    MeasurementRecord rec = spec.integrator == Integrator::Exact ? run_exact(wp, spec, channel_seeds)
                                                                 : run_euler(wp, spec, channel_seeds);
    rec.dt = spec.dt;
    rec.seed = spec.seed;
    rec.channel_seeds = channel_seeds;
    if (rec.samples.size() == 1)
        rec.channels = {"y"};
    else
        rec.channels = {"yA", "yB"};
    return rec;
}

MeasurementRecord simulate_record(const WorkingParams& wp, const RecordSpec& spec, std::uint64_t trajectory) {
    const std::array<std::uint64_t, 2> seeds{stream_seed(spec.seed, 2 * trajectory),
                                             stream_seed(spec.seed, 2 * trajectory + 1)};
    MeasurementRecord rec = simulate_record_seeded(wp, spec, seeds);
    rec.trajectory = trajectory;
    return rec;
}

}  // namespace sncc
