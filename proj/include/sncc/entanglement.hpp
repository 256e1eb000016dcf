#pragma once

#include <stdexcept>

#include "sncc/spectra.hpp"

namespace sncc {

struct NegativityResult {
    double sigma = 0.0;     // det sigma_A + det sigma_B - 2 det sigma_AB
    double det = 0.0;       // det of the full 4x4 covariance
    double n_raw = 0.0;     // -ln(nu~^2)/2
    double eps_n = 0.0;     // max(n_raw, 0)
};

class NegativityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

NegativityResult log_negativity(const CovarianceBlocks& blocks);

// Same quantity from an output map (rows y1A, y2A, y1B, y2B), using
// orthogonalized rows and QR factors so near-singular covariances keep their digits.
NegativityResult log_negativity_from_map(const OutputMap& m);

}  // namespace sncc
