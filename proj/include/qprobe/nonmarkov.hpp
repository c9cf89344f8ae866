#pragma once

#include <vector>

#include "qprobe/dynamics.hpp"
#include "qprobe/model.hpp"

namespace qprobe {

// Trace distance (1/2) ||rho0 - rho1||_1 via the spectrum of the difference.
double trace_distance(const DensityMatrix4& rho0, const DensityMatrix4& rho1);

// Same quantity in closed form for two states of the single-excitation
// family (the difference is a 2x2 block plus the ground-population gap).
double trace_distance(const ProbeAmplitudes& a, const ProbeAmplitudes& b);

// D(rho_a(t), rho_b(t)) on the shared grid of two trajectories.
std::vector<double> distinguishability_curve(const Trajectory& a, const Trajectory& b);

// d D / dt by central differences (one-sided at the endpoints).
std::vector<double> sigma_curve(const std::vector<double>& times,
                                const std::vector<double>& distinguishability);
double sigma(const Trajectory& a, const Trajectory& b, int index);

struct BlpResult {
    double value = 0.0;                // sum of positive increments of D for the best pair
    InitialStateParam first, second;   // maximizing pair of initial states
    std::vector<double> times;
    std::vector<double> sigma;         // derivative of D for the best pair
};

struct BlpOptions {
    // 0 = derive from the grid rule (>= 40 samples per 2 pi / R oscillation,
    // at least 500 intervals over the horizon).
    int grid_points = 0;
    int threads = 1;
};

// Degree of non-Markovianity over [0, horizon]: maximizes the integral of
// the positive part of dD/dt over unordered pairs of initial states drawn
// from a resolution x resolution (s, phi) grid of the single-excitation
// family, all evolved under the given pulse.
BlpResult blp_measure(const ModelParams& m, const ControlPulse& pulse, int resolution = 21,
                      const BlpOptions& opts = {});

} // namespace qprobe
