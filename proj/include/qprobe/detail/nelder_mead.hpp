#pragma once

#include <functional>
#include <vector>

namespace qprobe::detail {

struct NelderMeadOptions {
    int max_iterations = 0;   // 0 = 200 * dimension
    double f_tol = 1e-10;     // absolute spread of simplex values
    double x_tol = 1e-10;     // max vertex distance from the best vertex
    double init_step = 0.0;   // 0 = 5% of the box width per coordinate
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    std::vector<double> history; // best value after each iteration
};

// Box-constrained Nelder-Mead simplex maximization: candidate points are
// clipped to [lo, hi] coordinate-wise before evaluation (the bounded variant
// used by common scientific toolkits). Deterministic for a fixed start.
NelderMeadResult nelder_mead_maximize(const std::function<double(const std::vector<double>&)>& f,
                                      const std::vector<double>& start,
                                      const std::vector<double>& lower,
                                      const std::vector<double>& upper,
                                      const NelderMeadOptions& opts = {});

} // namespace qprobe::detail
