#pragma once

#include <map>
#include <vector>

#include "qprobe/model.hpp"

namespace qprobe {

// Piecewise-constant global control field: K equal-width segments over
// [0, horizon]. value_at(t) returns amplitude k for t in [k w, (k+1) w);
// the right endpoint t = horizon belongs to the last segment.
struct ControlPulse {
    std::vector<double> amplitudes;
    double horizon = 0.0;

    static ControlPulse zero(double horizon) { return {{0.0}, horizon}; }

    int segments() const { return static_cast<int>(amplitudes.size()); }
    double segment_width() const { return horizon / segments(); }
    double value_at(double t) const;
    void validate() const;
    bool within_bounds(double eps_max) const;
};

struct IntegratorOptions {
    // Tight enough that accumulated error stays an order below the 1e-8
    // guarantees made for trajectory-level quantities.
    double rel_tol = 1e-10;
    double abs_tol = 1e-13;
    // Consecutive rejected steps before giving up (guards against NaN stalls).
    int max_step_failures = 500;
};

// Solution sampled on a uniform grid, plus optional per-parameter sensitivity
// tracks holding (dC1/dtheta, dC2/dtheta) and their time derivatives.
struct Trajectory {
    ModelParams params;
    std::vector<double> times;
    std::vector<ProbeAmplitudes> states;
    std::map<ParamTag, std::vector<ProbeAmplitudes>> sensitivities;

    int size() const { return static_cast<int>(times.size()); }
    bool has_sensitivity(ParamTag tag) const { return sensitivities.count(tag) > 0; }
};

// Integrates the coupled amplitude equations
//   C1'' + (lambda - i eps(t)) C1' + (a1 R / a_t)^2 C1 + a1 a2 (R/a_t)^2 C2 = 0
// (and the symmetric equation for C2) with C1'(0) = C2'(0) = 0, using an
// embedded Runge-Kutta 4(5) pair integrated segment by segment so no step
// straddles a control discontinuity. Output lands on a uniform grid of
// grid_points + 1 points including both endpoints.
//
// tags may contain ParamTag::rabi and/or ParamTag::width; the corresponding
// variational systems (zero initial conditions) are integrated alongside.
// Phase sensitivity is not a tag here: it follows from linearity, see
// phase_sensitivity_exact.
Trajectory propagate(const ModelParams& m, const ProbeAmplitudes& x0, const ControlPulse& pulse,
                     int grid_points, const std::vector<ParamTag>& tags = {},
                     const IntegratorOptions& opts = {});

// Exact phase-sensitivity track: the dynamics map is linear in the initial
// amplitudes, so dC/dphi is the propagation of the phi-derivative of the
// initial state. This is the default path for phase estimation.
std::vector<ProbeAmplitudes> phase_sensitivity_exact(const ModelParams& m,
                                                     const InitialStateParam& p0,
                                                     const ControlPulse& pulse, int grid_points,
                                                     const IntegratorOptions& opts = {});

// Central-difference phase sensitivity from two propagations with perturbed
// initial phase; agrees with the exact path to O(dphi^2). Kept as the
// independent route for cross-checks.
std::vector<ProbeAmplitudes> phase_sensitivity(const Trajectory& plus, const Trajectory& minus,
                                               double dphi);

// One-call front end: propagates amplitudes_from_param(p0) and attaches every
// requested sensitivity track (rabi/width via the variational system, phase
// via phase_sensitivity_exact; ParamTag::time needs no track).
Trajectory simulate(const ModelParams& m, const InitialStateParam& p0, const ControlPulse& pulse,
                    int grid_points, const std::vector<ParamTag>& tags = {},
                    const IntegratorOptions& opts = {});

// d(rho)/dt at a grid point, assembled by the product rule from (C, Cdot).
DensityMatrix4 time_derivative_rho(const Trajectory& traj, int index);

// d(rho)/dtheta at a grid point from the tagged sensitivity track.
// Throws std::invalid_argument if the track is missing.
DensityMatrix4 parameter_derivative_rho(const Trajectory& traj, ParamTag tag, int index);

} // namespace qprobe
