#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "qprobe/dynamics.hpp"
#include "qprobe/metrology.hpp"
#include "qprobe/speedlimits.hpp"
#include "qprobe/util.hpp"

using namespace qprobe;

namespace {
constexpr double kPi = 3.14159265358979323846;
const ModelParams kStrong{0.4, 0.6, 5.0, 1.0, 0.0, 2.0};

DensityMatrix4 diagonal(double p0, double p1, double p2, double p3)
{
    DensityMatrix4 rho = DensityMatrix4::Zero();
    rho(0, 0) = p0;
    rho(1, 1) = p1;
    rho(2, 2) = p2;
    rho(3, 3) = p3;
    return rho;
}

DensityMatrix4 random_rank2_density(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> mag(0.05, 0.7);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);
    return density_from_amplitudes(
        {std::polar(mag(rng), angle(rng)), std::polar(mag(rng), angle(rng)), 0.0, 0.0});
}
} // namespace

TEST_SUITE_BEGIN("speedlimits");

TEST_CASE("Bures fidelity: identity, orthogonality, commuting closed form")
{
    std::mt19937_64 rng(1);
    const DensityMatrix4 rho = random_rank2_density(rng);
    CHECK(bures_fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-10));

    const DensityMatrix4 e1 = diagonal(0.0, 1.0, 0.0, 0.0);
    const DensityMatrix4 e2 = diagonal(0.0, 0.0, 1.0, 0.0);
    CHECK(bures_fidelity(e1, e2) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(bures_angle(e1, e2) == doctest::Approx(kPi / 2.0).epsilon(1e-8));

    // Commuting pair: F = sum_i sqrt(p_i q_i).
    const DensityMatrix4 p = diagonal(1.0, 0.0, 0.0, 0.0);
    const DensityMatrix4 q = diagonal(0.5, 0.5, 0.0, 0.0);
    CHECK(bures_fidelity(p, q) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));

    DensityMatrix4 invalid = diagonal(1.2, -0.2, 0.0, 0.0);
    CHECK_THROWS_AS(bures_fidelity(invalid, q), std::invalid_argument);
}

TEST_CASE("Bures angle satisfies the triangle inequality")
{
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 40; ++trial) {
        const DensityMatrix4 a = random_rank2_density(rng);
        const DensityMatrix4 b = random_rank2_density(rng);
        const DensityMatrix4 c = random_rank2_density(rng);
        CHECK(bures_angle(a, c) <= bures_angle(a, b) + bures_angle(b, c) + 1e-8);
    }
}

TEST_CASE("first_crossing_time interpolates exactly on synthetic curves")
{
    const std::vector<double> times = linspace(0.0, 2.0, 21);
    const std::vector<double> constant(21, 1.0); // unit speed
    auto hit = first_crossing_time(times, constant, 0.35);
    REQUIRE(hit.has_value());
    CHECK(*hit == doctest::Approx(0.35).epsilon(1e-12));
    CHECK_FALSE(first_crossing_time(times, constant, 2.5).has_value());

    // Linear speed v = t: accumulated t^2/2; target 0.5 crosses at t = 1.
    std::vector<double> ramp(times);
    auto crossing = first_crossing_time(times, ramp, 0.5);
    REQUIRE(crossing.has_value());
    CHECK(*crossing == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("subradiant state saturates both bounds with zero traveled length")
{
    ModelParams lengthy = kStrong;
    lengthy.horizon = 20.0;
    const Trajectory traj = propagate(lengthy, subradiant_state(lengthy),
                                      ControlPulse::zero(lengthy.horizon), 2000);
    const QslResult fisher = qsl_fisher(traj, kPi / 4.0, kStrong.horizon);
    const QslResult opnorm = qsl_opnorm(traj, kPi / 4.0, kStrong.horizon);
    CHECK(fisher.saturated);
    CHECK(opnorm.saturated);
    CHECK(fisher.traveled < 1e-8);
    CHECK(opnorm.traveled < 1e-8);
    CHECK(opnorm.traveled < std::pow(std::sin(kPi / 4.0), 2));
}

TEST_CASE("superradiant state reaches the target; tau grows with the target")
{
    ModelParams lengthy = kStrong;
    lengthy.horizon = 20.0;
    const Trajectory traj = propagate(lengthy, superradiant_state(lengthy),
                                      ControlPulse::zero(lengthy.horizon), 4000);
    double previous = 0.0;
    for (double target : {0.1, 0.3, 0.5, 0.7, kPi / 4.0}) {
        const QslResult r = qsl_fisher(traj, target, kStrong.horizon);
        CHECK_FALSE(r.saturated);
        CHECK(r.tau >= previous);
        previous = r.tau;
    }

    const QslResult tiny = qsl_fisher(traj, 1e-9, kStrong.horizon);
    CHECK_FALSE(tiny.saturated);
    CHECK(tiny.tau < 0.05);

    CHECK_THROWS_AS(qsl_fisher(traj, 0.0, kStrong.horizon), std::invalid_argument);
    CHECK_THROWS_AS(qsl_opnorm(traj, 2.0, kStrong.horizon), std::invalid_argument);
}

TEST_CASE("accumulated lengths dominate their geodesic targets at every grid time")
{
    // A mixed initial state keeps both speeds continuous at t = 0 (a pure
    // start makes the Fisher speed jump there, which the trapezoid rule can
    // only resolve with the step size, not to 1e-6).
    const ProbeAmplitudes x0{0.5, complexd(0.0, 0.35), 0.0, 0.0};
    const Trajectory traj = propagate(kStrong, x0, ControlPulse::zero(kStrong.horizon), 8000);
    std::vector<double> fisher_speed(traj.times.size());
    std::vector<double> op_speed(traj.times.size());
    for (int i = 0; i < traj.size(); ++i) {
        fisher_speed[i] = std::sqrt(std::max(0.0, qfi_time(traj, i)) / 4.0);
        op_speed[i] = operator_norm(time_derivative_rho(traj, i));
    }
    const std::vector<double> fisher_acc = cumulative_trapezoid(traj.times, fisher_speed);
    const std::vector<double> op_acc = cumulative_trapezoid(traj.times, op_speed);

    const DensityMatrix4 rho0 = density_from_amplitudes(traj.states[0]);
    for (int i = 0; i < traj.size(); i += 200) {
        const DensityMatrix4 rho_t = density_from_amplitudes(traj.states[i]);
        const double angle = bures_angle(rho0, rho_t);
        CHECK(fisher_acc[i] >= angle - 1e-6);
        CHECK(op_acc[i] >= std::pow(std::sin(angle), 2) - 1e-6);
    }
}

TEST_CASE("the opnorm map is extremal at the special states and conjugation-symmetric")
{
    QslMapOptions opts;
    opts.horizon_factor = 5.0;
    opts.grid_points_per_horizon = 600;
    const std::vector<double> s_values = linspace(-1.0, 1.0, 9);
    const std::vector<double> phi_values = {0.0, kPi / 2.0, kPi};
    const QslMap map = qsl_opnorm_map(kStrong, s_values, phi_values, opts);

    // The fastest cell sits near the superradiant point (s ~ 0.38, phi = 0).
    double best_tau = std::numeric_limits<double>::infinity();
    int best_cell = -1;
    for (std::size_t i = 0; i < map.cells.size(); ++i) {
        if (!map.cells[i].saturated && map.cells[i].tau < best_tau) {
            best_tau = map.cells[i].tau;
            best_cell = static_cast<int>(i);
        }
    }
    REQUIRE(best_cell >= 0);
    const int best_s = best_cell / static_cast<int>(phi_values.size());
    const int best_phi = best_cell % static_cast<int>(phi_values.size());
    CHECK(std::abs(s_values[best_s] - 0.3846) < 0.2);
    CHECK(best_phi == 0);

    // phi -> -phi with conjugated amplitudes leaves tau unchanged (no control).
    ModelParams extended = kStrong;
    extended.horizon = kStrong.horizon * opts.horizon_factor;
    const ProbeAmplitudes x0 = amplitudes_from_param({0.3, 1.1});
    const ProbeAmplitudes conjugated{std::conj(x0.c1), std::conj(x0.c2), 0.0, 0.0};
    const int long_grid = static_cast<int>(opts.grid_points_per_horizon * opts.horizon_factor);
    const ControlPulse zero = ControlPulse::zero(extended.horizon);
    const QslResult direct = qsl_opnorm(propagate(extended, x0, zero, long_grid),
                                        opts.target_angle, kStrong.horizon);
    const QslResult mirrored = qsl_opnorm(propagate(extended, conjugated, zero, long_grid),
                                          opts.target_angle, kStrong.horizon);
    CHECK(direct.tau == doctest::Approx(mirrored.tau).epsilon(1e-9));
}

TEST_SUITE_END();
