#include "qprobe/entanglement.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace qprobe {

double concurrence(const ProbeAmplitudes& a)
{
    return 2.0 * std::abs(a.c1 * std::conj(a.c2));
}

double concurrence_wootters(const DensityMatrix4& rho)
{
    validate_density(rho);
    // sigma_y x sigma_y in the {|11>,|10>,|01>,|00>} ordering: the
    // antidiagonal with entries (-1, 1, 1, -1).
    Eigen::Matrix4cd flip = Eigen::Matrix4cd::Zero();
    flip(0, 3) = -1.0;
    flip(1, 2) = 1.0;
    flip(2, 1) = 1.0;
    flip(3, 0) = -1.0;
    const Eigen::Matrix4cd spin_flipped = flip * rho.conjugate() * flip;
    const Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(rho * spin_flipped);
    std::array<double, 4> mu;
    for (int i = 0; i < 4; ++i)
        mu[i] = std::sqrt(std::max(0.0, std::real(es.eigenvalues()(i))));
    std::sort(mu.begin(), mu.end(), std::greater<double>());
    return std::max(0.0, mu[0] - mu[1] - mu[2] - mu[3]);
}

std::vector<double> concurrence_curve(const Trajectory& traj)
{
    std::vector<double> c(traj.states.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = concurrence(traj.states[i]);
    return c;
}

} // namespace qprobe
