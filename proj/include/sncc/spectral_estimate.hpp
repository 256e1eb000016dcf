#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "sncc/spectra.hpp"
#include "sncc/trajectory.hpp"

namespace sncc {

// Averaged Hann-windowed periodogram. Bins k = 0..L/2 at Omega_k = 2 pi k/(L dt).
// Normalized so unit-variance white samples give density 1.
struct SpectrumEstimate {
    std::vector<double> omega;
    std::vector<std::vector<double>> auto_mean;   // [channel][bin]
    std::vector<std::vector<double>> auto_se;
    std::vector<cplx> cross_mean;                 // <X_A X_B*> when two channels
    std::vector<double> cross_se_re;
    std::vector<double> cross_se_im;
    std::size_t units = 0;     // independent averages entering the standard errors
    std::size_t segment = 0;
};

class RecordTooShort : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

std::vector<double> hann_window(std::size_t n);

// Non-overlapping segments of length `segment`; needs at least 32 of them.
SpectrumEstimate estimate_spectrum(const MeasurementRecord& rec, std::size_t segment);

struct EnsembleSpec {
    std::size_t trajectories = 0;
    std::size_t samples = 0;        // per trajectory
    std::size_t segment = 0;        // periodogram length
    double dt = 0.0;
    std::uint64_t seed = 0;
    Integrator integrator = Integrator::Exact;
    unsigned threads = 0;           // 0: hardware concurrency
};

// Each trajectory contributes the mean of its segment periodograms;
// standard errors are taken across trajectories.
SpectrumEstimate ensemble_spectrum(const WorkingParams& wp, const EnsembleSpec& spec);

// Exact expectation of the windowed periodogram for records whose samples are
// integrate-and-dump averages of a process with spectrum 1 + line.
std::vector<double> expected_periodogram(const LineShape& line, double dt, std::size_t segment);

}  // namespace sncc
