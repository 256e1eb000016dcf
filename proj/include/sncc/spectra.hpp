#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sncc/filters.hpp"
#include "sncc/model.hpp"

namespace sncc {

struct FrequencyCurve {
    std::string label;
    std::vector<double> omega;   // rad/s
    std::vector<cplx> value;
};

cplx chi_q(const WorkingParams& wp, double Omega);
cplx chi_q_raw(const WorkingParams& wp, double Omega, double mass);

struct SpectrumParts {
    double total = 0.0;
    double shot_backaction = 0.0;  // 1 + [L^4 s^2 + L^2 sin2theta (w_m^2 - Omega^2)] / |R_m|^2
    double bath = 0.0;             // 4 gamma theta_T L^2 s^2 / |R_m|^2
    double sn_line = 0.0;          // omega_SN^2 [...] / |R_m|^2
};

// Closed-form output spectrum of the homodyne record (self-gravity protocol).
SpectrumParts spectrum_self_parts(const WorkingParams& wp, double Omega);
double spectrum_self(const WorkingParams& wp, double Omega);
// |K_yy|^2 S_q plus the classical drive term.
double spectrum_self_transfer_route(const WorkingParams& wp, double Omega);

// Spectrum of the quantum part of the record, direct and factored forms.
double spectrum_quantum_direct(const WorkingParams& wp, double Omega);
double spectrum_quantum_factored(const WorkingParams& wp, double Omega);

cplx transfer_self(const WorkingParams& wp, double Omega);

// S - 1 = (n0 + n2 Omega^2) / |R(Omega)|^2 with R built from omega, gamma.
struct LineShape {
    double n0 = 0.0;
    double n2 = 0.0;
    double omega = 0.0;
    double gamma = 0.0;
};
LineShape self_line_shape(const WorkingParams& wp);

// Rows are output quadratures, columns independent unit-white inputs.
// Per mirror the inputs are (a1, a2, quantum thermal force, classical thermal force).
using OutputMap = Eigen::MatrixXcd;

OutputMap self_output_map(const WorkingParams& wp, double Omega);
OutputMap mutual_output_map(const WorkingParams& wp, double Omega);

struct SelfCovariance {
    Eigen::Matrix2cd v;
    double det = 0.0;          // determinant of the assembled matrix
    double det_closed = 0.0;   // closed form
};
SelfCovariance covariance_self(const WorkingParams& wp, double Omega);

struct TransferPair {
    cplx t_aa;
    cplx t_ab;
};
struct MutualTransfer {
    TransferPair wiener;       // general theta
    TransferPair sme;          // simplified two-channel Kalman form, theta = pi/2
    TransferPair sme_matrix;   // inverse of the two-channel filter matrix, theta = pi/2
};
MutualTransfer mutual_output_transfer(const WorkingParams& wp, double Omega);

struct CovarianceBlocks {
    Eigen::Matrix2cd sigma_a;
    Eigen::Matrix2cd sigma_b;
    Eigen::Matrix2cd sigma_ab;
};
CovarianceBlocks blocks_from_map(const OutputMap& m);
CovarianceBlocks covariance_mutual(const WorkingParams& wp, double Omega);
CovarianceBlocks covariance_mutual(WorkingParams wp, double Omega, Theory theory);

// Two-sided spectra of the stored records of the mutual protocol at angle theta:
// returns (S_AA, S_AB) with S_AB = <y_A y_B*>.
std::pair<double, cplx> mutual_record_spectra(const WorkingParams& wp, double Omega);

}  // namespace sncc
