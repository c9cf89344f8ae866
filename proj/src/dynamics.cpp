#include "qprobe/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/numeric/odeint.hpp>

namespace ode = boost::numeric::odeint;

namespace qprobe {

namespace {

constexpr double kExcitationOverflow = 1e-6;

using State = std::vector<complexd>;

// First-order form of the amplitude equations plus the variational systems
// for the tagged parameters. Layout per block of 4: (C1, C1', C2, C2');
// block 0 is the physical state, block b >= 1 the sensitivity for tags[b-1].
struct AmplitudeOde {
    double lam;   // spectral width
    double eps;   // control amplitude on the current segment
    double k1;    // (a1 R / a_t)^2
    double k2;    // (a2 R / a_t)^2
    double g;     // a1 a2 (R / a_t)^2
    double dk1;   // d k1 / dR
    double dk2;   // d k2 / dR
    double dg;    // d g / dR
    std::vector<ParamTag> tags;

    void operator()(const State& y, State& dydt, double /*t*/) const
    {
        const complexd damping(lam, -eps); // lambda - i eps
        dydt[0] = y[1];
        dydt[1] = -damping * y[1] - k1 * y[0] - g * y[2];
        dydt[2] = y[3];
        dydt[3] = -damping * y[3] - k2 * y[2] - g * y[0];
        for (std::size_t b = 0; b < tags.size(); ++b) {
            const std::size_t o = 4 * (b + 1);
            dydt[o] = y[o + 1];
            dydt[o + 2] = y[o + 3];
            complexd f1 = -damping * y[o + 1] - k1 * y[o] - g * y[o + 2];
            complexd f2 = -damping * y[o + 3] - k2 * y[o + 2] - g * y[o];
            if (tags[b] == ParamTag::rabi) {
                f1 += -dk1 * y[0] - dg * y[2];
                f2 += -dk2 * y[2] - dg * y[0];
            } else { // ParamTag::width: d/dlambda of the damping term
                f1 += -y[1];
                f2 += -y[3];
            }
            dydt[o + 1] = f1;
            dydt[o + 3] = f2;
        }
    }
};

AmplitudeOde make_ode(const ModelParams& m, const std::vector<ParamTag>& tags)
{
    const double at2 = m.a1 * m.a1 + m.a2 * m.a2;
    const double r2 = m.rabi * m.rabi;
    AmplitudeOde f;
    f.lam = m.lambda;
    f.eps = 0.0;
    f.k1 = m.a1 * m.a1 * r2 / at2;
    f.k2 = m.a2 * m.a2 * r2 / at2;
    f.g = m.a1 * m.a2 * r2 / at2;
    f.dk1 = 2.0 * m.a1 * m.a1 * m.rabi / at2;
    f.dk2 = 2.0 * m.a2 * m.a2 * m.rabi / at2;
    f.dg = 2.0 * m.a1 * m.a2 * m.rabi / at2;
    f.tags = tags;
    return f;
}

ProbeAmplitudes block_at(const State& y, std::size_t block)
{
    const std::size_t o = 4 * block;
    return {y[o], y[o + 2], y[o + 1], y[o + 3]};
}

// Advances (y, t) to t_target with a controlled dopri5 stepper.
template <typename Stepper>
void advance_to(Stepper& stepper, const AmplitudeOde& rhs, State& y, double& t, double t_target,
                double& dt, int max_failures)
{
    int failures = 0;
    while (t_target - t > 1e-14 * std::max(1.0, std::abs(t_target))) {
        dt = std::min(dt, t_target - t);
        if (dt <= 0.0) break;
        const auto result = stepper.try_step(rhs, y, t, dt);
        if (result == ode::fail) {
            if (++failures > max_failures)
                throw std::runtime_error("propagate: integrator failed to meet tolerances");
        } else {
            failures = 0;
        }
    }
    t = t_target;
}

} // namespace

double ControlPulse::value_at(double t) const
{
    validate();
    const double w = segment_width();
    int k = static_cast<int>(std::floor(t / w));
    k = std::clamp(k, 0, segments() - 1);
    return amplitudes[k];
}

void ControlPulse::validate() const
{
    if (amplitudes.empty())
        throw std::invalid_argument("ControlPulse: needs at least one segment");
    if (!(horizon > 0.0))
        throw std::invalid_argument("ControlPulse: horizon must be positive");
}

bool ControlPulse::within_bounds(double eps_max) const
{
    return std::all_of(amplitudes.begin(), amplitudes.end(),
                       [eps_max](double e) { return std::abs(e) <= eps_max; });
}

Trajectory propagate(const ModelParams& m, const ProbeAmplitudes& x0, const ControlPulse& pulse,
                     int grid_points, const std::vector<ParamTag>& tags,
                     const IntegratorOptions& opts)
{
    m.validate();
    pulse.validate();
    if (grid_points < 1)
        throw std::invalid_argument("propagate: grid_points must be positive");
    if (std::abs(pulse.horizon - m.horizon) > 1e-12 * std::max(1.0, m.horizon))
        throw std::invalid_argument("propagate: pulse horizon differs from model horizon");
    if (x0.excitation() > 1.0 + 1e-9)
        throw std::invalid_argument("propagate: initial state is not normalized");
    for (ParamTag tag : tags)
        if (tag != ParamTag::rabi && tag != ParamTag::width)
            throw std::invalid_argument(
                "propagate: only rabi/width sensitivities are integrated; see simulate()");

    const int n_points = grid_points + 1;
    const double T = m.horizon;

    Trajectory traj;
    traj.params = m;
    traj.times.resize(n_points);
    traj.states.resize(n_points);
    for (int i = 0; i < n_points; ++i) traj.times[i] = T * i / grid_points;
    traj.times.back() = T;
    for (ParamTag tag : tags) traj.sensitivities[tag].resize(n_points);

    AmplitudeOde rhs = make_ode(m, tags);
    State y(4 * (1 + tags.size()), complexd(0.0, 0.0));
    y[0] = x0.c1;
    y[1] = x0.c1dot;
    y[2] = x0.c2;
    y[3] = x0.c2dot;

    auto record = [&](int i) {
        traj.states[i] = block_at(y, 0);
        const double n = traj.states[i].excitation();
        if (n > 1.0 + kExcitationOverflow)
            throw std::runtime_error("propagate: excitation bound violated (integrator fault)");
        for (std::size_t b = 0; b < tags.size(); ++b)
            traj.sensitivities[tags[b]][i] = block_at(y, b + 1);
    };
    record(0);

    auto stepper =
        ode::make_controlled<ode::runge_kutta_dopri5<State>>(opts.abs_tol, opts.rel_tol);

    const int K = pulse.segments();
    double t = 0.0;
    int next_grid = 1;
    const double coincidence = 1e-9 * T / grid_points;
    for (int k = 0; k < K; ++k) {
        const double seg_end = (k + 1 == K) ? T : T * (k + 1) / K;
        rhs.eps = pulse.amplitudes[k];
        double dt = (seg_end - t) / 16.0;
        // Grid targets inside this segment, then the segment boundary.
        while (next_grid < n_points && traj.times[next_grid] <= seg_end + coincidence) {
            advance_to(stepper, rhs, y, t, traj.times[next_grid], dt, opts.max_step_failures);
            record(next_grid);
            ++next_grid;
        }
        if (t < seg_end - coincidence)
            advance_to(stepper, rhs, y, t, seg_end, dt, opts.max_step_failures);
        t = seg_end;
    }
    if (next_grid < n_points) {
        record(n_points - 1); // boundary coincided with the last grid point
        ++next_grid;
    }
    if (next_grid != n_points)
        throw std::runtime_error("propagate: internal grid bookkeeping error");
    return traj;
}

std::vector<ProbeAmplitudes> phase_sensitivity_exact(const ModelParams& m,
                                                     const InitialStateParam& p0,
                                                     const ControlPulse& pulse, int grid_points,
                                                     const IntegratorOptions& opts)
{
    p0.validate();
    // d/dphi of the initial state: C01 is phase-free, C02 picks up i C02.
    const ProbeAmplitudes x0 = amplitudes_from_param(p0);
    ProbeAmplitudes dx0;
    dx0.c1 = 0.0;
    dx0.c2 = complexd(0.0, 1.0) * x0.c2;
    return propagate(m, dx0, pulse, grid_points, {}, opts).states;
}

std::vector<ProbeAmplitudes> phase_sensitivity(const Trajectory& plus, const Trajectory& minus,
                                               double dphi)
{
    if (!(dphi > 0.0)) throw std::invalid_argument("phase_sensitivity: dphi must be positive");
    if (plus.times.size() != minus.times.size())
        throw std::invalid_argument("phase_sensitivity: trajectory grids differ");
    for (std::size_t i = 0; i < plus.times.size(); ++i)
        if (std::abs(plus.times[i] - minus.times[i]) > 1e-12)
            throw std::invalid_argument("phase_sensitivity: trajectory grids differ");

    std::vector<ProbeAmplitudes> track(plus.times.size());
    const double inv = 1.0 / (2.0 * dphi);
    for (std::size_t i = 0; i < track.size(); ++i) {
        const ProbeAmplitudes& p = plus.states[i];
        const ProbeAmplitudes& q = minus.states[i];
        track[i] = {(p.c1 - q.c1) * inv, (p.c2 - q.c2) * inv, (p.c1dot - q.c1dot) * inv,
                    (p.c2dot - q.c2dot) * inv};
    }
    return track;
}

Trajectory simulate(const ModelParams& m, const InitialStateParam& p0, const ControlPulse& pulse,
                    int grid_points, const std::vector<ParamTag>& tags,
                    const IntegratorOptions& opts)
{
    std::vector<ParamTag> ode_tags;
    bool want_phase = false;
    for (ParamTag tag : tags) {
        if (tag == ParamTag::rabi || tag == ParamTag::width) ode_tags.push_back(tag);
        if (tag == ParamTag::phase) want_phase = true;
    }
    Trajectory traj = propagate(m, amplitudes_from_param(p0), pulse, grid_points, ode_tags, opts);
    if (want_phase)
        traj.sensitivities[ParamTag::phase] =
            phase_sensitivity_exact(m, p0, pulse, grid_points, opts);
    return traj;
}

DensityMatrix4 time_derivative_rho(const Trajectory& traj, int index)
{
    if (index < 0 || index >= traj.size())
        throw std::invalid_argument("time_derivative_rho: index out of range");
    const ProbeAmplitudes& a = traj.states[index];
    return density_derivative(a, {a.c1dot, a.c2dot, 0.0, 0.0});
}

DensityMatrix4 parameter_derivative_rho(const Trajectory& traj, ParamTag tag, int index)
{
    if (index < 0 || index >= traj.size())
        throw std::invalid_argument("parameter_derivative_rho: index out of range");
    if (tag == ParamTag::time) return time_derivative_rho(traj, index);
    auto it = traj.sensitivities.find(tag);
    if (it == traj.sensitivities.end())
        throw std::invalid_argument(std::string("parameter_derivative_rho: no ") +
                                    to_string(tag) + " sensitivity track on this trajectory");
    return density_derivative(traj.states[index], it->second[index]);
}

} // namespace qprobe
