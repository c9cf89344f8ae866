#pragma once

#include <vector>

#include "qprobe/dynamics.hpp"
#include "qprobe/model.hpp"

namespace qprobe {

// Concurrence of a single-excitation state: the density matrix is an X-state
// with empty |11> population, so C = 2 |C1 C2*|.
double concurrence(const ProbeAmplitudes& a);

// General two-qubit concurrence max(0, mu1 - mu2 - mu3 - mu4) from the
// square-rooted spectrum of rho (sy x sy) rho* (sy x sy); the independent
// route used to check the closed form.
double concurrence_wootters(const DensityMatrix4& rho);

std::vector<double> concurrence_curve(const Trajectory& traj);

} // namespace qprobe
