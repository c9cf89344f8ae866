#include "qprobe/nonmarkov.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "qprobe/util.hpp"

namespace qprobe {

namespace {
constexpr double kPi = 3.14159265358979323846;

void require_shared_grid(const Trajectory& a, const Trajectory& b)
{
    if (a.times.size() != b.times.size())
        throw std::invalid_argument("trajectories do not share a grid");
    for (std::size_t i = 0; i < a.times.size(); ++i)
        if (std::abs(a.times[i] - b.times[i]) > 1e-12)
            throw std::invalid_argument("trajectories do not share a grid");
}

double positive_increment_sum(const std::vector<double>& d)
{
    double acc = 0.0;
    for (std::size_t i = 1; i < d.size(); ++i) acc += std::max(0.0, d[i] - d[i - 1]);
    return acc;
}

// Packed per-state storage for the pair loop: populations and coherence of
// the central block at every grid point.
struct PackedTrajectory {
    std::vector<double> n1, n2;
    std::vector<complexd> coherence;
};

PackedTrajectory pack(const Trajectory& traj)
{
    PackedTrajectory p;
    const std::size_t n = traj.states.size();
    p.n1.resize(n);
    p.n2.resize(n);
    p.coherence.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const ProbeAmplitudes& a = traj.states[i];
        p.n1[i] = std::norm(a.c1);
        p.n2[i] = std::norm(a.c2);
        p.coherence[i] = a.c1 * std::conj(a.c2);
    }
    return p;
}

double packed_distance(const PackedTrajectory& a, const PackedTrajectory& b, std::size_t i)
{
    const double da = a.n1[i] - b.n1[i];
    const double dc = a.n2[i] - b.n2[i];
    const complexd off = a.coherence[i] - b.coherence[i];
    const double mean = 0.5 * (da + dc);
    const double disc = std::sqrt(0.25 * (da - dc) * (da - dc) + std::norm(off));
    return 0.5 * (std::abs(mean + disc) + std::abs(mean - disc) + std::abs(da + dc));
}

} // namespace

double trace_distance(const DensityMatrix4& rho0, const DensityMatrix4& rho1)
{
    Eigen::SelfAdjointEigenSolver<DensityMatrix4> es(rho0 - rho1, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const ProbeAmplitudes& a, const ProbeAmplitudes& b)
{
    // Difference matrix: central block [[da, off], [off*, dc]] plus the
    // opposite ground-population gap -(da + dc) at (3,3).
    const double da = std::norm(a.c1) - std::norm(b.c1);
    const double dc = std::norm(a.c2) - std::norm(b.c2);
    const complexd off = a.c1 * std::conj(a.c2) - b.c1 * std::conj(b.c2);
    const double mean = 0.5 * (da + dc);
    const double disc = std::sqrt(0.25 * (da - dc) * (da - dc) + std::norm(off));
    return 0.5 * (std::abs(mean + disc) + std::abs(mean - disc) + std::abs(da + dc));
}

std::vector<double> distinguishability_curve(const Trajectory& a, const Trajectory& b)
{
    require_shared_grid(a, b);
    std::vector<double> d(a.times.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = trace_distance(a.states[i], b.states[i]);
    return d;
}

std::vector<double> sigma_curve(const std::vector<double>& times,
                                const std::vector<double>& distinguishability)
{
    const std::size_t n = times.size();
    if (distinguishability.size() != n || n < 2)
        throw std::invalid_argument("sigma_curve: bad curve");
    std::vector<double> s(n);
    s[0] = (distinguishability[1] - distinguishability[0]) / (times[1] - times[0]);
    for (std::size_t i = 1; i + 1 < n; ++i)
        s[i] = (distinguishability[i + 1] - distinguishability[i - 1]) /
               (times[i + 1] - times[i - 1]);
    s[n - 1] = (distinguishability[n - 1] - distinguishability[n - 2]) /
               (times[n - 1] - times[n - 2]);
    return s;
}

double sigma(const Trajectory& a, const Trajectory& b, int index)
{
    require_shared_grid(a, b);
    if (index < 0 || index >= a.size()) throw std::invalid_argument("sigma: index out of range");
    const int lo = std::max(0, index - 1);
    const int hi = std::min(a.size() - 1, index + 1);
    const double dlo = trace_distance(a.states[lo], b.states[lo]);
    const double dhi = trace_distance(a.states[hi], b.states[hi]);
    return (dhi - dlo) / (a.times[hi] - a.times[lo]);
}

BlpResult blp_measure(const ModelParams& m, const ControlPulse& pulse, int resolution,
                      const BlpOptions& opts)
{
    if (resolution < 2) throw std::invalid_argument("blp_measure: resolution must be >= 2");
    int grid_points = opts.grid_points;
    if (grid_points <= 0) {
        const double oscillation = 2.0 * kPi / m.rabi;
        grid_points = std::max(500, static_cast<int>(std::ceil(40.0 * m.horizon / oscillation)));
    }

    const std::vector<double> s_values = linspace(-1.0, 1.0, resolution);
    const std::vector<double> phi_values = linspace(0.0, kPi, resolution);
    std::vector<InitialStateParam> states;
    states.reserve(s_values.size() * phi_values.size());
    for (double s : s_values)
        for (double phi : phi_values) states.push_back({s, phi});

    std::vector<PackedTrajectory> packed(states.size());
    parallel_for(states.size(), opts.threads, [&](std::size_t i) {
        packed[i] = pack(propagate(m, amplitudes_from_param(states[i]), pulse, grid_points));
    });

    const std::size_t n_states = states.size();
    const std::size_t n_pairs = n_states * (n_states - 1) / 2;
    std::vector<double> pair_value(n_pairs, 0.0);
    parallel_for(n_states - 1, opts.threads, [&](std::size_t i) {
        // Pairs (i, j > i) laid out contiguously per row i.
        const std::size_t row_base = i * n_states - i * (i + 1) / 2;
        const std::size_t n_grid = packed[i].n1.size();
        for (std::size_t j = i + 1; j < n_states; ++j) {
            double acc = 0.0;
            double prev = packed_distance(packed[i], packed[j], 0);
            for (std::size_t g = 1; g < n_grid; ++g) {
                const double cur = packed_distance(packed[i], packed[j], g);
                if (cur > prev) acc += cur - prev;
                prev = cur;
            }
            pair_value[row_base + (j - i - 1)] = acc;
        }
    });

    std::size_t best = 0;
    for (std::size_t p = 1; p < n_pairs; ++p)
        if (pair_value[p] > pair_value[best]) best = p;

    // Recover (i, j) from the flattened upper-triangular index.
    std::size_t bi = 0, bj = 0, offset = best;
    for (std::size_t i = 0; i + 1 < n_states; ++i) {
        const std::size_t row = n_states - 1 - i;
        if (offset < row) {
            bi = i;
            bj = i + 1 + offset;
            break;
        }
        offset -= row;
    }

    BlpResult result;
    result.first = states[bi];
    result.second = states[bj];
    const Trajectory ta = propagate(m, amplitudes_from_param(states[bi]), pulse, grid_points);
    const Trajectory tb = propagate(m, amplitudes_from_param(states[bj]), pulse, grid_points);
    const std::vector<double> d = distinguishability_curve(ta, tb);
    result.value = positive_increment_sum(d);
    result.times = ta.times;
    result.sigma = sigma_curve(ta.times, d);
    return result;
}

} // namespace qprobe
