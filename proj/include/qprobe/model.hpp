#pragma once

#include <cmath>
#include <complex>
#include <string>

#include <Eigen/Dense>

namespace qprobe {

using complexd = std::complex<double>;

// Two-qubit density matrix in the fixed ordered basis
//   index 0: |11>,  1: |10>,  2: |01>,  3: |00>
// All modules share this ordering.
using DensityMatrix4 = Eigen::Matrix4cd;

// Parameter labels for estimation targets and sensitivity tracks.
//   time  - elapsed evolution time t
//   rabi  - vacuum Rabi frequency R
//   width - spectral width lambda of the Lorentzian reservoir
//   phase - initial relative phase phi of the probe state
enum class ParamTag { time, rabi, width, phase };

const char* to_string(ParamTag tag);
ParamTag param_tag_from_string(const std::string& name);

// Physical constants of one experiment: two dimensionless couplings to the
// common reservoir mode, the vacuum Rabi frequency, the Lorentzian width,
// the bare transition frequency (a bookkeeping reference only; it drops out
// of the reduced dynamics) and the final evolution time.
struct ModelParams {
    double a1 = 0.4;
    double a2 = 0.6;
    double rabi = 5.0;
    double lambda = 1.0;
    double omega0 = 0.0;
    double horizon = 2.0;

    double total_coupling() const { return std::hypot(a1, a2); }
    void validate() const;
};

// Initial probe state C01|10> + C02|01> parametrized by separability s and
// phase phi: C01 = sqrt((1-s)/2), C02 = sqrt((1+s)/2) e^{i phi}.
// s = 0 is maximally entangled, |s| = 1 separable.
struct InitialStateParam {
    double s = 0.0;
    double phi = 0.0;

    void validate() const;
};

// Excitation amplitudes C1, C2 of |10> and |01> plus their time derivatives.
// Also reused as a sensitivity track entry, where the fields hold the
// derivative of each amplitude with respect to a tagged parameter.
struct ProbeAmplitudes {
    complexd c1{0.0, 0.0};
    complexd c2{0.0, 0.0};
    complexd c1dot{0.0, 0.0};
    complexd c2dot{0.0, 0.0};

    double excitation() const { return std::norm(c1) + std::norm(c2); }
};

ProbeAmplitudes amplitudes_from_param(const InitialStateParam& p);

// Inverse of amplitudes_from_param for normalized states with c1 real >= 0.
InitialStateParam param_from_amplitudes(const ProbeAmplitudes& a);

// The stationary superposition (a2|10> - a1|01>)/a_t, decoupled from the
// collective reservoir mode; a constant solution for every control field.
ProbeAmplitudes subradiant_state(const ModelParams& m);

// The orthogonal superposition (a1|10> + a2|01>)/a_t, maximally coupled to
// the reservoir mode; the fastest-evolving initial state.
ProbeAmplitudes superradiant_state(const ModelParams& m);

// (s, phi) locations of the two special states: sub-radiant at
// (-(a2^2-a1^2)/a_t^2, pi), super-radiant at (+(a2^2-a1^2)/a_t^2, 0).
InitialStateParam subradiant_param(const ModelParams& m);
InitialStateParam superradiant_param(const ModelParams& m);

// rho with central block [[|C1|^2, C1 C2*], [C1* C2, |C2|^2]], ground
// population 1 - |C1|^2 - |C2|^2 and every other element zero.
// Throws std::invalid_argument if the excitation exceeds 1 + 1e-9.
DensityMatrix4 density_from_amplitudes(const ProbeAmplitudes& a);

// Product-rule derivative of density_from_amplitudes: `d` holds the
// derivatives of (C1, C2) with respect to the parameter of interest.
DensityMatrix4 density_derivative(const ProbeAmplitudes& a, const ProbeAmplitudes& d);

// Checks Hermiticity (1e-12), unit trace (1e-10) and spectrum >= -1e-10.
// Throws std::invalid_argument on violation.
void validate_density(const DensityMatrix4& rho);

} // namespace qprobe
