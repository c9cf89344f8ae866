#pragma once

#include <vector>

#include "qprobe/dynamics.hpp"
#include "qprobe/model.hpp"

namespace qprobe {

// Eigensystem of a density matrix, eigenvalues sorted descending.
struct SpectralDecomposition {
    Eigen::Vector4d eigenvalues;
    Eigen::Matrix4cd eigenvectors; // orthonormal columns, same order
};

SpectralDecomposition spectral_decomposition(const DensityMatrix4& rho);

// Generalized measurement: positive effects summing to the identity.
struct Povm {
    std::vector<Eigen::Matrix4cd> effects;

    // Throws std::invalid_argument unless every effect is PSD (1e-10) and
    // the effects sum to the identity (1e-10).
    void validate() const;
};

// Quantum Fisher information of (rho, d rho). Evaluated in the eigenbasis of
// rho: with M = V^dag (drho) V,
//   classical part  sum_n M_nn^2 / w_n              over w_n > eig_cutoff,
//   quantum part    sum_{n != m} 2 |M_nm|^2 / (w_n + w_m)
//                                                   over w_n + w_m > eig_cutoff.
// drho must be Hermitian and traceless to 1e-8.
double qfi(const DensityMatrix4& rho, const DensityMatrix4& drho, double eig_cutoff = 1e-12);

// QFI for time estimation at one grid point: qfi(rho(t), drho/dt).
double qfi_time(const Trajectory& traj, int index);

struct FisherCurve {
    std::vector<double> times;
    std::vector<double> values;
    ParamTag tag = ParamTag::time;
};

// Per-grid-point QFI for the tagged parameter. Values in (-1e-9, 0) are
// clamped to zero; anything more negative raises (broken sensitivities).
FisherCurve qfi_curve(const Trajectory& traj, ParamTag tag);

// Trapezoidal integral of the curve over its grid.
double total_qfi(const FisherCurve& curve);

// Classical Fisher information sum_x (d p_x)^2 / p_x for outcome
// probabilities p_x = tr(P_x rho). Outcomes with p_x below prob_cutoff are
// kept (with p floored at the cutoff) only while |d p_x| < sqrt(prob_cutoff);
// otherwise the divergent term is dropped and counted in *degenerate_outcomes.
double classical_fisher(const DensityMatrix4& rho, const DensityMatrix4& drho, const Povm& povm,
                        int* degenerate_outcomes = nullptr, double prob_cutoff = 1e-12);

FisherCurve classical_fisher_curve(const Trajectory& traj, ParamTag tag, const Povm& povm);

// Three-outcome POVM weighing the two single-excitation populations:
//   E1 = w |10><10|, E2 = w |01><01|, E3 = 1 - E1 - E2,  w = sqrt(2)/(1+sqrt(2)).
Povm single_excitation_povm();

} // namespace qprobe
