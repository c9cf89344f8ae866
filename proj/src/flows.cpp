#include "qprobe/flows.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qprobe {

double FlowIntervals::total_length() const
{
    double len = 0.0;
    for (const auto& [lo, hi] : intervals) len += hi - lo;
    return len;
}

FlowIntervals incoming_flow(const std::vector<double>& times, const std::vector<double>& values,
                            const std::string& source, double deriv_threshold)
{
    const std::size_t n = times.size();
    if (values.size() != n || n < 2) throw std::invalid_argument("incoming_flow: bad curve");
    if (deriv_threshold < 0.0) {
        double scale = 0.0;
        for (double v : values) scale = std::max(scale, std::abs(v));
        // Absolute floor so numerically-zero curves report no flow.
        deriv_threshold = std::max(1e-6 * scale, 1e-12);
    }

    std::vector<double> deriv(n);
    deriv[0] = (values[1] - values[0]) / (times[1] - times[0]);
    for (std::size_t i = 1; i + 1 < n; ++i)
        deriv[i] = (values[i + 1] - values[i - 1]) / (times[i + 1] - times[i - 1]);
    deriv[n - 1] = (values[n - 1] - values[n - 2]) / (times[n - 1] - times[n - 2]);

    FlowIntervals out;
    out.source = source;
    out.horizon = times.back();
    const double min_length = 3.0 * (times[1] - times[0]);
    std::size_t i = 0;
    while (i < n) {
        if (deriv[i] > deriv_threshold) {
            std::size_t j = i;
            while (j + 1 < n && deriv[j + 1] > deriv_threshold) ++j;
            if (times[j] - times[i] >= min_length - 1e-12)
                out.intervals.emplace_back(times[i], times[j]);
            i = j + 1;
        } else {
            ++i;
        }
    }
    return out;
}

double overlap_fraction(const FlowIntervals& a, const FlowIntervals& b)
{
    if (std::abs(a.horizon - b.horizon) > 1e-9 * std::max(1.0, a.horizon))
        throw std::invalid_argument("overlap_fraction: horizons differ");
    const double denom = a.total_length();
    if (denom <= 0.0) return 1.0;
    double inter = 0.0;
    for (const auto& [alo, ahi] : a.intervals)
        for (const auto& [blo, bhi] : b.intervals) {
            const double lo = std::max(alo, blo);
            const double hi = std::min(ahi, bhi);
            if (hi > lo) inter += hi - lo;
        }
    return inter / denom;
}

} // namespace qprobe
