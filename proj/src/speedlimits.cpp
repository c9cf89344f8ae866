#include "qprobe/speedlimits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "qprobe/metrology.hpp"
#include "qprobe/util.hpp"

namespace qprobe {

namespace {

// Interpolated value of the cumulative integral at an off-grid time.
double accumulated_at(const std::vector<double>& times, const std::vector<double>& acc, double t)
{
    if (t <= times.front()) return acc.front();
    if (t >= times.back()) return acc.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - times.begin());
    const double f = (t - times[i - 1]) / (times[i] - times[i - 1]);
    return acc[i - 1] + f * (acc[i] - acc[i - 1]);
}

QslResult crossing_result(const Trajectory& traj, const std::vector<double>& integrand,
                          double target_angle, double threshold, double report_horizon)
{
    const std::vector<double> acc = cumulative_trapezoid(traj.times, integrand);
    QslResult out;
    out.target_angle = target_angle;
    out.traveled = accumulated_at(traj.times, acc, report_horizon);
    const auto tau = first_crossing_time(traj.times, integrand, threshold);
    if (tau) {
        out.tau = *tau;
    } else {
        out.tau = std::numeric_limits<double>::infinity();
        out.saturated = true;
    }
    return out;
}

} // namespace

double bures_fidelity(const DensityMatrix4& rho0, const DensityMatrix4& rho1)
{
    validate_density(rho0);
    validate_density(rho1);
    // tr sqrt(sqrt(rho0) rho1 sqrt(rho0)) evaluated on the support of rho0:
    // the product vanishes outside it, and dropping the null space keeps the
    // square root from amplifying eigensolver noise (sqrt(eps) would swamp
    // 1 - F for nearby states).
    Eigen::SelfAdjointEigenSolver<DensityMatrix4> es(rho0);
    std::vector<int> support;
    for (int i = 0; i < 4; ++i)
        if (es.eigenvalues()(i) > 1e-14) support.push_back(i);
    Eigen::MatrixXcd w(4, support.size());
    for (std::size_t k = 0; k < support.size(); ++k)
        w.col(k) = std::sqrt(es.eigenvalues()(support[k])) * es.eigenvectors().col(support[k]);
    Eigen::MatrixXcd inner = w.adjoint() * rho1 * w;
    inner = 0.5 * (inner + inner.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es2(inner);
    double fidelity = 0.0;
    for (int i = 0; i < es2.eigenvalues().size(); ++i)
        fidelity += std::sqrt(std::max(0.0, es2.eigenvalues()(i)));
    return std::min(fidelity, 1.0);
}

double bures_angle(const DensityMatrix4& rho0, const DensityMatrix4& rho1)
{
    return std::acos(bures_fidelity(rho0, rho1));
}

double operator_norm(const DensityMatrix4& a)
{
    Eigen::JacobiSVD<Eigen::Matrix4cd> svd(a);
    return svd.singularValues()(0);
}

std::optional<double> first_crossing_time(const std::vector<double>& times,
                                          const std::vector<double>& integrand, double target)
{
    if (times.size() != integrand.size() || times.empty())
        throw std::invalid_argument("first_crossing_time: bad curve");
    if (!(target > 0.0)) return times.front();
    double acc = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double inc = 0.5 * (integrand[i] + integrand[i - 1]) * (times[i] - times[i - 1]);
        if (acc + inc >= target) {
            if (inc <= 0.0) return times[i];
            const double f = (target - acc) / inc;
            return times[i - 1] + f * (times[i] - times[i - 1]);
        }
        acc += inc;
    }
    return std::nullopt;
}

QslResult qsl_fisher(const Trajectory& traj, double target_angle, double report_horizon)
{
    if (!(target_angle > 0.0) || target_angle > 1.57079632679489661923 + 1e-12)
        throw std::invalid_argument("qsl_fisher: target angle must lie in (0, pi/2]");
    std::vector<double> speed(traj.times.size());
    for (int i = 0; i < traj.size(); ++i)
        speed[i] = std::sqrt(std::max(0.0, qfi_time(traj, i)) / 4.0);
    return crossing_result(traj, speed, target_angle, target_angle, report_horizon);
}

QslResult qsl_opnorm(const Trajectory& traj, double target_angle, double report_horizon)
{
    if (!(target_angle > 0.0) || target_angle > 1.57079632679489661923 + 1e-12)
        throw std::invalid_argument("qsl_opnorm: target angle must lie in (0, pi/2]");
    std::vector<double> speed(traj.times.size());
    for (int i = 0; i < traj.size(); ++i)
        speed[i] = operator_norm(time_derivative_rho(traj, i));
    const double s = std::sin(target_angle);
    return crossing_result(traj, speed, target_angle, s * s, report_horizon);
}

QslMap qsl_opnorm_map(const ModelParams& m, const std::vector<double>& s_values,
                      const std::vector<double>& phi_values, const QslMapOptions& opts)
{
    QslMap map;
    map.s_values = s_values;
    map.phi_values = phi_values;
    map.cells.resize(s_values.size() * phi_values.size());

    ModelParams extended = m;
    extended.horizon = m.horizon * opts.horizon_factor;
    const int grid_points =
        static_cast<int>(opts.grid_points_per_horizon * opts.horizon_factor);

    parallel_for(map.cells.size(), opts.threads, [&](std::size_t idx) {
        const int i = static_cast<int>(idx / phi_values.size());
        const int j = static_cast<int>(idx % phi_values.size());
        const ProbeAmplitudes x0 = amplitudes_from_param({s_values[i], phi_values[j]});
        const Trajectory traj = propagate(extended, x0, ControlPulse::zero(extended.horizon),
                                          grid_points);
        map.cells[idx] = qsl_opnorm(traj, opts.target_angle, m.horizon);
    });
    return map;
}

} // namespace qprobe
