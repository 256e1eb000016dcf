#include "sncc/spectral_estimate.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <thread>

#include <fftw3.h>

namespace sncc {

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

class RealFft {
public:
    explicit RealFft(std::size_t n) : n_(n) {
        in_ = fftw_alloc_real(n);
        out_ = fftw_alloc_complex(n / 2 + 1);
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_, FFTW_ESTIMATE);
    }
    ~RealFft() {
        {
            std::lock_guard<std::mutex> lock(planner_mutex());
            fftw_destroy_plan(plan_);
        }
        fftw_free(in_);
        fftw_free(out_);
    }
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    double* in() { return in_; }
    cplx out(std::size_t k) const { return {out_[k][0], out_[k][1]}; }
    void run() { fftw_execute(plan_); }

private:
    std::size_t n_;
    double* in_;
    fftw_complex* out_;
    fftw_plan plan_;
};

// Running sums for mean and standard error.
struct Accumulator {
    std::vector<std::vector<double>> s1, s2;   // per channel
    std::vector<cplx> c1;
    std::vector<double> c2re, c2im;
    std::size_t n = 0;

    void init(std::size_t channels, std::size_t bins) {
        s1.assign(channels, std::vector<double>(bins, 0.0));
        s2 = s1;
        if (channels == 2) {
            c1.assign(bins, cplx(0.0, 0.0));
            c2re.assign(bins, 0.0);
            c2im.assign(bins, 0.0);
        }
    }
    void add(const std::vector<std::vector<double>>& p, const std::vector<cplx>& x) {
        for (std::size_t c = 0; c < p.size(); ++c)
            for (std::size_t k = 0; k < p[c].size(); ++k) {
                s1[c][k] += p[c][k];
                s2[c][k] += p[c][k] * p[c][k];
            }
        for (std::size_t k = 0; k < x.size(); ++k) {
            c1[k] += x[k];
            c2re[k] += x[k].real() * x[k].real();
            c2im[k] += x[k].imag() * x[k].imag();
        }
        ++n;
    }
    void merge(const Accumulator& o) {
        for (std::size_t c = 0; c < s1.size(); ++c)
            for (std::size_t k = 0; k < s1[c].size(); ++k) {
                s1[c][k] += o.s1[c][k];
                s2[c][k] += o.s2[c][k];
            }
        for (std::size_t k = 0; k < c1.size(); ++k) {
            c1[k] += o.c1[k];
            c2re[k] += o.c2re[k];
            c2im[k] += o.c2im[k];
        }
        n += o.n;
    }
};

double std_error(double s1, double s2, std::size_t n) {
    const double nn = static_cast<double>(n);
    const double mean = s1 / nn;
    const double var = std::max(0.0, (s2 - nn * mean * mean) / (nn - 1.0));
    return std::sqrt(var / nn);
}

SpectrumEstimate finish(const Accumulator& acc, std::size_t segment, double dt) {
    if (acc.n < 2) throw RecordTooShort("spectrum estimate needs at least two averages");
    SpectrumEstimate e;
    e.segment = segment;
    e.units = acc.n;
    const std::size_t bins = segment / 2 + 1;
    e.omega.resize(bins);
    for (std::size_t k = 0; k < bins; ++k)
        e.omega[k] = kTwoPi * static_cast<double>(k) / (static_cast<double>(segment) * dt);
    const double nn = static_cast<double>(acc.n);
    e.auto_mean.resize(acc.s1.size());
    e.auto_se.resize(acc.s1.size());
    for (std::size_t c = 0; c < acc.s1.size(); ++c) {
        e.auto_mean[c].resize(bins);
        e.auto_se[c].resize(bins);
        for (std::size_t k = 0; k < bins; ++k) {
            e.auto_mean[c][k] = acc.s1[c][k] / nn;
            e.auto_se[c][k] = std_error(acc.s1[c][k], acc.s2[c][k], acc.n);
        }
    }
    if (!acc.c1.empty()) {
        e.cross_mean.resize(bins);
        e.cross_se_re.resize(bins);
        e.cross_se_im.resize(bins);
        for (std::size_t k = 0; k < bins; ++k) {
            e.cross_mean[k] = acc.c1[k] / nn;
            e.cross_se_re[k] = std_error(acc.c1[k].real(), acc.c2re[k], acc.n);
            e.cross_se_im[k] = std_error(acc.c1[k].imag(), acc.c2im[k], acc.n);
        }
    }
    return e;
}

// Periodograms of consecutive segments, averaged over segments.
class SegmentAnalyzer {
public:
    SegmentAnalyzer(std::size_t channels, std::size_t segment)
        : segment_(segment), window_(hann_window(segment)) {
        for (double w : window_) norm_ += w * w;
        for (std::size_t c = 0; c < channels; ++c) ffts_.emplace_back(std::make_unique<RealFft>(segment));
        spectra_.assign(channels, std::vector<cplx>(segment / 2 + 1));
    }

    // Fills per-channel periodograms and the cross periodogram of segment `s`.
    void analyze(const MeasurementRecord& rec, std::size_t s, std::vector<std::vector<double>>& p,
                 std::vector<cplx>& x) {
        const std::size_t bins = segment_ / 2 + 1;
        for (std::size_t c = 0; c < ffts_.size(); ++c) {
            double* in = ffts_[c]->in();
            const double* src = rec.samples[c].data() + s * segment_;
            for (std::size_t i = 0; i < segment_; ++i) in[i] = window_[i] * src[i];
            ffts_[c]->run();
            p[c].resize(bins);
            for (std::size_t k = 0; k < bins; ++k) {
                spectra_[c][k] = ffts_[c]->out(k);
                p[c][k] = std::norm(spectra_[c][k]) / norm_;
            }
        }
        if (ffts_.size() == 2) {
            x.resize(bins);
            for (std::size_t k = 0; k < bins; ++k) x[k] = spectra_[0][k] * std::conj(spectra_[1][k]) / norm_;
        } else {
            x.clear();
        }
    }

private:
    std::size_t segment_;
    std::vector<double> window_;
    double norm_ = 0.0;
    std::vector<std::unique_ptr<RealFft>> ffts_;
    std::vector<std::vector<cplx>> spectra_;
};

}  // namespace

std::vector<double> hann_window(std::size_t n) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n)));
    return w;
}

SpectrumEstimate estimate_spectrum(const MeasurementRecord& rec, std::size_t segment) {
    if (segment < 8 || segment % 2 != 0) throw std::invalid_argument("estimate_spectrum: segment must be even and >= 8");
    if (rec.samples.empty() || rec.samples.size() > 2) throw std::invalid_argument("estimate_spectrum: one or two channels");
    const std::size_t n = rec.samples[0].size();
    const std::size_t segments = n / segment;
    if (segments < 32) throw RecordTooShort("estimate_spectrum: record shorter than 32 segments");
    SegmentAnalyzer an(rec.samples.size(), segment);
    Accumulator acc;
    acc.init(rec.samples.size(), segment / 2 + 1);
    std::vector<std::vector<double>> p(rec.samples.size());
    std::vector<cplx> x;
    for (std::size_t s = 0; s < segments; ++s) {
        an.analyze(rec, s, p, x);
        acc.add(p, x);
    }
    return finish(acc, segment, rec.dt);
}

SpectrumEstimate ensemble_spectrum(const WorkingParams& wp, const EnsembleSpec& spec) {
    if (spec.trajectories < 2) throw std::invalid_argument("ensemble_spectrum: need at least two trajectories");
    if (spec.segment < 8 || spec.segment % 2 != 0) throw std::invalid_argument("ensemble_spectrum: bad segment length");
    const std::size_t segments = spec.samples / spec.segment;
    if (segments < 1) throw RecordTooShort("ensemble_spectrum: trajectory shorter than one segment");
    const std::size_t channels = wp.protocol == Protocol::SelfGravity ? 1 : 2;
    const std::size_t bins = spec.segment / 2 + 1;

    RecordSpec rs;
    rs.samples = segments * spec.segment;
    rs.dt = spec.dt;
    rs.seed = spec.seed;
    rs.integrator = spec.integrator;

    constexpr std::size_t chunk = 16;
    const std::size_t n_chunks = (spec.trajectories + chunk - 1) / chunk;
    std::vector<Accumulator> partial(n_chunks);
    unsigned threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_chunks));

    std::mutex next_mutex;
    std::size_t next_chunk = 0;
    std::exception_ptr failure;
    auto worker = [&]() {
        try {
            SegmentAnalyzer an(channels, spec.segment);
            std::vector<std::vector<double>> p(channels), mean(channels);
            std::vector<cplx> x, xmean;
            for (;;) {
                std::size_t ci;
                {
                    std::lock_guard<std::mutex> lock(next_mutex);
                    if (next_chunk >= n_chunks || failure) return;
                    ci = next_chunk++;
                }
                Accumulator& acc = partial[ci];
                acc.init(channels, bins);
                const std::size_t end = std::min(spec.trajectories, (ci + 1) * chunk);
                for (std::size_t t = ci * chunk; t < end; ++t) {
                    const MeasurementRecord rec = simulate_record(wp, rs, t);
                    for (auto& m : mean) m.assign(bins, 0.0);
                    xmean.assign(channels == 2 ? bins : 0, cplx(0.0, 0.0));
                    for (std::size_t s = 0; s < segments; ++s) {
                        an.analyze(rec, s, p, x);
                        for (std::size_t c = 0; c < channels; ++c)
                            for (std::size_t k = 0; k < bins; ++k) mean[c][k] += p[c][k];
                        for (std::size_t k = 0; k < x.size(); ++k) xmean[k] += x[k];
                    }
                    const double inv = 1.0 / static_cast<double>(segments);
                    for (auto& m : mean)
                        for (double& v : m) v *= inv;
                    for (auto& v : xmean) v *= inv;
                    acc.add(mean, xmean);
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(next_mutex);
            if (!failure) failure = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    Accumulator total;
    total.init(channels, bins);
    for (const auto& a : partial) total.merge(a);
    return finish(total, spec.segment, spec.dt);
}

std::vector<double> expected_periodogram(const LineShape& line, double dt, std::size_t segment) {
    if (!(line.gamma > 0.0)) throw std::invalid_argument("expected_periodogram: needs gamma > 0");
    const cplx I(0.0, 1.0);
    // Roots of R(Omega) lie in the lower half plane; their conjugates in the upper one.
    const cplx sq = std::sqrt(cplx(4.0 * line.omega * line.omega - line.gamma * line.gamma, 0.0));
    const std::array<cplx, 2> lower{0.5 * sq - 0.5 * I * line.gamma, -0.5 * sq - 0.5 * I * line.gamma};
    const std::array<cplx, 4> poles{lower[0], lower[1], std::conj(lower[0]), std::conj(lower[1])};
    // r(tau) = sum_j C_j exp(i p_j tau), tau >= 0, from the upper poles
    std::array<cplx, 2> up{poles[2], poles[3]}, coef{};
    for (int j = 0; j < 2; ++j) {
        cplx den(1.0, 0.0);
        for (const cplx& q : poles)
            if (q != up[j]) den *= (up[j] - q);
        coef[j] = I * (line.n0 + line.n2 * up[j] * up[j]) / den;
    }
    auto kernel0 = [](cplx z) {   // (e^z - 1 - z)/z^2
        if (std::abs(z) < 1e-3) return 0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0;
        return (std::exp(z) - 1.0 - z) / (z * z);
    };

    const std::size_t L = segment;
    std::vector<double> c(L);
    {
        cplx s(0.0, 0.0);
        for (int j = 0; j < 2; ++j) s += coef[j] * 2.0 * dt * kernel0(I * up[j] * dt);
        c[0] = 1.0 + s.real();
    }
    std::array<cplx, 2> amp{}, step{};
    for (int j = 0; j < 2; ++j) {
        const cplx sn = std::sin(0.5 * up[j] * dt);
        amp[j] = coef[j] * 4.0 * sn * sn / (up[j] * up[j] * dt) * std::exp(I * up[j] * dt);
        step[j] = std::exp(I * up[j] * dt);
    }
    for (std::size_t m = 1; m < L; ++m) {
        cplx s(0.0, 0.0);
        for (int j = 0; j < 2; ++j) {
            s += amp[j];
            amp[j] *= step[j];
        }
        c[m] = s.real();
    }

    const std::vector<double> w = hann_window(L);
    double norm = 0.0;
    for (double v : w) norm += v * v;
    std::vector<double> g(L);
    for (std::size_t m = 0; m < L; ++m) {
        double rho = 0.0;
        for (std::size_t n = 0; n + m < L; ++n) rho += w[n] * w[n + m];
        g[m] = rho * c[m];
    }
    RealFft fft(L);
    std::copy(g.begin(), g.end(), fft.in());
    fft.run();
    std::vector<double> out(L / 2 + 1);
    for (std::size_t k = 0; k <= L / 2; ++k) out[k] = (2.0 * fft.out(k).real() - g[0]) / norm;
    return out;
}

}  // namespace sncc
