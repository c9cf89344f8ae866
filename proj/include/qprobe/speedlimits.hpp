#pragma once

#include <optional>
#include <vector>

#include "qprobe/dynamics.hpp"
#include "qprobe/model.hpp"

namespace qprobe {

// Uhlmann-Jozsa root fidelity tr sqrt(sqrt(rho0) rho1 sqrt(rho0)), in [0, 1].
double bures_fidelity(const DensityMatrix4& rho0, const DensityMatrix4& rho1);

// arccos of the Bures fidelity; a metric on density matrices.
double bures_angle(const DensityMatrix4& rho0, const DensityMatrix4& rho1);

// Largest singular value; for Hermitian input the largest |eigenvalue|.
double operator_norm(const DensityMatrix4& a);

// Minimal-time result for one speed-limit bound. `saturated` means the
// accumulated path length never reached the target within the trajectory
// horizon (tau is +inf then). `traveled` is the accumulated length at
// report_horizon, the diagnostic for slow states.
struct QslResult {
    double tau = 0.0;
    bool saturated = false;
    double target_angle = 0.0;
    double traveled = 0.0;
};

// First time the cumulative trapezoid of `integrand` reaches `target`,
// linearly interpolated inside the crossing step; nullopt if never reached.
std::optional<double> first_crossing_time(const std::vector<double>& times,
                                          const std::vector<double>& integrand, double target);

// Fisher-speed bound: smallest t with  int_0^t sqrt(F_t/4) dt' = target_angle.
QslResult qsl_fisher(const Trajectory& traj, double target_angle, double report_horizon);

// Operator-norm bound: smallest t with  int_0^t ||drho/dt||_op dt' = sin^2(target_angle).
QslResult qsl_opnorm(const Trajectory& traj, double target_angle, double report_horizon);

struct QslMapOptions {
    double target_angle = 0.78539816339744830962; // pi/4
    double horizon_factor = 10.0; // search window as a multiple of the model horizon
    int grid_points_per_horizon = 2000;
    int threads = 1;
};

// Operator-norm QSL time per (s, phi) cell, evolved without control over the
// extended search window. Cells are stored row-major: cell(i, j) pairs
// s_values[i] with phi_values[j].
struct QslMap {
    std::vector<double> s_values;
    std::vector<double> phi_values;
    std::vector<QslResult> cells;

    const QslResult& at(int i, int j) const
    {
        return cells[static_cast<std::size_t>(i) * phi_values.size() + j];
    }
};

QslMap qsl_opnorm_map(const ModelParams& m, const std::vector<double>& s_values,
                      const std::vector<double>& phi_values, const QslMapOptions& opts = {});

} // namespace qprobe
