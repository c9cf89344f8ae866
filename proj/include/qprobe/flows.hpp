#pragma once

#include <string>
#include <utility>
#include <vector>

namespace qprobe {

// Time intervals on which a monitored scalar increases: disjoint, sorted,
// inside [0, horizon].
struct FlowIntervals {
    std::vector<std::pair<double, double>> intervals;
    std::string source;
    double horizon = 0.0;

    double total_length() const;
};

// Extracts the increasing intervals of a sampled curve. The derivative is a
// central difference (one-sided at the endpoints); consecutive grid points
// with derivative above the threshold merge into one interval, and runs
// shorter than 3 grid steps are discarded as derivative chatter. A negative
// threshold selects the scale-aware default 1e-6 * max|values|, floored at
// 1e-12 so numerically-zero curves stay flowless.
FlowIntervals incoming_flow(const std::vector<double>& times, const std::vector<double>& values,
                            const std::string& source = "", double deriv_threshold = -1.0);

// |union(a) cap union(b)| / |union(a)|; 1 for empty a by convention.
double overlap_fraction(const FlowIntervals& a, const FlowIntervals& b);

} // namespace qprobe
