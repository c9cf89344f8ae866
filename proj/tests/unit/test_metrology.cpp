#include <doctest.h>

#include <algorithm>
#include <array>
#include <random>

#include <Eigen/Eigenvalues>

#include "qprobe/dynamics.hpp"
#include "qprobe/metrology.hpp"
#include "qprobe/speedlimits.hpp"

using namespace qprobe;

namespace {

constexpr double kPi = 3.14159265358979323846;
const ModelParams kStrong{0.4, 0.6, 5.0, 1.0, 0.0, 2.0};

// Amplitude family with analytic theta-derivative, mixed for theta > 0.
ProbeAmplitudes family_state(double theta)
{
    return {0.5 * std::exp(-theta) * std::exp(complexd(0.0, 0.4 * theta)),
            (0.4 + 0.1 * theta) * std::exp(complexd(0.0, -theta)), 0.0, 0.0};
}

ProbeAmplitudes family_derivative(double theta)
{
    const complexd i(0.0, 1.0);
    return {(-1.0 + 0.4 * i) * 0.5 * std::exp(-theta) * std::exp(complexd(0.0, 0.4 * theta)),
            (0.1 - i * (0.4 + 0.1 * theta)) * std::exp(complexd(0.0, -theta)), 0.0, 0.0};
}

Eigen::Matrix4cd random_unitary(std::mt19937_64& rng)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::Matrix4cd a;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) a(i, j) = complexd(normal(rng), normal(rng));
    const Eigen::HouseholderQR<Eigen::Matrix4cd> qr(a);
    return qr.householderQ();
}

} // namespace

TEST_SUITE_BEGIN("metrology");

TEST_CASE("spectral decomposition is descending, complete and unitary")
{
    const DensityMatrix4 rho = density_from_amplitudes(amplitudes_from_param({0.3, 0.8}));
    const SpectralDecomposition sd = spectral_decomposition(rho);
    CHECK(sd.eigenvalues.sum() == doctest::Approx(1.0).epsilon(1e-10));
    for (int i = 1; i < 4; ++i) CHECK(sd.eigenvalues(i - 1) >= sd.eigenvalues(i));
    CHECK(sd.eigenvalues.minCoeff() >= -1e-10);
    const Eigen::Matrix4cd gram = sd.eigenvectors.adjoint() * sd.eigenvectors;
    CHECK((gram - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("qfi of a zero derivative vanishes")
{
    const DensityMatrix4 rho = density_from_amplitudes(family_state(0.5));
    CHECK(qfi(rho, DensityMatrix4::Zero()) == 0.0);
}

TEST_CASE("qfi rejects malformed derivatives")
{
    const DensityMatrix4 rho = density_from_amplitudes(family_state(0.5));
    DensityMatrix4 skew = DensityMatrix4::Zero();
    skew(1, 2) = 1.0; // not Hermitian
    CHECK_THROWS_AS(qfi(rho, skew), std::invalid_argument);
    DensityMatrix4 traced = DensityMatrix4::Zero();
    traced(1, 1) = 1.0; // not traceless
    CHECK_THROWS_AS(qfi(rho, traced), std::invalid_argument);
}

TEST_CASE("pure-state limit reproduces 4(<dpsi|dpsi> - |<psi|dpsi>|^2)")
{
    for (double theta : {0.1, 0.7, 1.3}) {
        // Normalized two-amplitude family: (cos t, sin t e^{0.7 i t}).
        const complexd i(0.0, 1.0);
        const complexd c1 = std::cos(theta);
        const complexd c2 = std::sin(theta) * std::exp(0.7 * i * theta);
        const complexd d1 = -std::sin(theta);
        const complexd d2 =
            (std::cos(theta) + 0.7 * i * std::sin(theta)) * std::exp(0.7 * i * theta);

        const DensityMatrix4 rho = density_from_amplitudes({c1, c2, 0.0, 0.0});
        const DensityMatrix4 drho = density_derivative({c1, c2, 0.0, 0.0}, {d1, d2, 0.0, 0.0});

        const double dd = std::norm(d1) + std::norm(d2);
        const complexd overlap = std::conj(c1) * d1 + std::conj(c2) * d2;
        const double expected = 4.0 * (dd - std::norm(overlap));
        CHECK(qfi(rho, drho) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("qfi matches the Bures-fidelity finite-difference oracle")
{
    for (double theta : {0.2, 0.6, 1.1}) {
        const double dtheta = 1e-4;
        const DensityMatrix4 rho = density_from_amplitudes(family_state(theta));
        const DensityMatrix4 drho =
            density_derivative(family_state(theta), family_derivative(theta));
        const DensityMatrix4 rho_shift = density_from_amplitudes(family_state(theta + dtheta));
        const double oracle =
            8.0 * (1.0 - bures_fidelity(rho, rho_shift)) / (dtheta * dtheta);
        const double value = qfi(rho, drho);
        CHECK(std::abs(value - oracle) / std::max(value, 1.0) < 1e-3);
    }
}

TEST_CASE("qfi is invariant under a global unitary rotation")
{
    std::mt19937_64 rng(5);
    const DensityMatrix4 rho = density_from_amplitudes(family_state(0.8));
    const DensityMatrix4 drho =
        density_derivative(family_state(0.8), family_derivative(0.8));
    const double base = qfi(rho, drho);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::Matrix4cd u = random_unitary(rng);
        const DensityMatrix4 rho_rotated = u * rho * u.adjoint();
        const DensityMatrix4 drho_rotated = u * drho * u.adjoint();
        CHECK(qfi(rho_rotated, drho_rotated) == doctest::Approx(base).epsilon(1e-8));
    }
}

TEST_CASE("qfi agrees with the analytic rank-2 eigenbasis route")
{
    const ProbeAmplitudes a = family_state(0.9);
    const DensityMatrix4 rho = density_from_amplitudes(a);
    const DensityMatrix4 drho = density_derivative(a, family_derivative(0.9));

    // Hand-built eigenbasis: the excited ray, the ground state, and two null
    // vectors; eigenvalues (n, 1-n, 0, 0).
    const double n = a.excitation();
    Eigen::Vector4cd psi1{0.0, a.c1 / std::sqrt(n), a.c2 / std::sqrt(n), 0.0};
    Eigen::Vector4cd psi2{0.0, 0.0, 0.0, 1.0};
    Eigen::Vector4cd psi3{0.0, -std::conj(a.c2) / std::sqrt(n), std::conj(a.c1) / std::sqrt(n),
                          0.0};
    Eigen::Vector4cd psi4{1.0, 0.0, 0.0, 0.0};
    const std::array<Eigen::Vector4cd, 4> basis{psi1, psi2, psi3, psi4};
    const std::array<double, 4> omega{n, 1.0 - n, 0.0, 0.0};

    double expected = 0.0;
    for (int p = 0; p < 4; ++p) {
        if (omega[p] > 1e-12) {
            const double diag = std::real((basis[p].adjoint() * drho * basis[p])(0, 0));
            expected += diag * diag / omega[p];
        }
        for (int q = p + 1; q < 4; ++q) {
            const double denom = omega[p] + omega[q];
            if (denom <= 1e-12) continue;
            const complexd off = (basis[p].adjoint() * drho * basis[q])(0, 0);
            expected += 4.0 * std::norm(off) / denom;
        }
    }
    CHECK(qfi(rho, drho) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("qfi_time vanishes where the state is stationary")
{
    const Trajectory sub = propagate(kStrong, subradiant_state(kStrong),
                                     ControlPulse::zero(kStrong.horizon), 200);
    for (int i : {0, 50, 100, 200}) CHECK(qfi_time(sub, i) < 1e-10);

    const Trajectory super = propagate(kStrong, superradiant_state(kStrong),
                                       ControlPulse::zero(kStrong.horizon), 200);
    CHECK(qfi_time(super, 0) < 1e-10); // Cdot(0) = 0
    int positive = 0;
    for (int i = 1; i <= 200; ++i)
        if (qfi_time(super, i) > 1e-6) ++positive;
    CHECK(positive > 150);
}

TEST_CASE("qfi_curve handles tags, missing tracks and trivial limits")
{
    const Trajectory traj = simulate(kStrong, subradiant_param(kStrong),
                                     ControlPulse::zero(kStrong.horizon), 200,
                                     {ParamTag::rabi, ParamTag::width, ParamTag::phase});
    const FisherCurve width_curve = qfi_curve(traj, ParamTag::width);
    for (double v : width_curve.values) CHECK(v < 1e-10);

    const FisherCurve phase_curve = qfi_curve(traj, ParamTag::phase);
    CHECK(*std::max_element(phase_curve.values.begin(), phase_curve.values.end()) > 1e-3);

    const Trajectory bare = propagate(kStrong, superradiant_state(kStrong),
                                      ControlPulse::zero(kStrong.horizon), 50);
    CHECK_THROWS_AS(qfi_curve(bare, ParamTag::rabi), std::invalid_argument);

    ModelParams weak = kStrong;
    weak.rabi = 1e-30;
    const Trajectory frozen = simulate(weak, {0.3, 0.4}, ControlPulse::zero(weak.horizon), 100,
                                       {ParamTag::rabi});
    const FisherCurve rabi_curve = qfi_curve(frozen, ParamTag::rabi);
    for (double v : rabi_curve.values) CHECK(v < 1e-12);
}

TEST_CASE("total_qfi integrates trivially")
{
    FisherCurve zero;
    zero.times = {0.0, 0.5, 1.0};
    zero.values = {0.0, 0.0, 0.0};
    CHECK(total_qfi(zero) == 0.0);

    FisherCurve constant;
    constant.times = {0.0, 0.5, 2.0};
    constant.values = {3.0, 3.0, 3.0};
    CHECK(total_qfi(constant) == doctest::Approx(6.0));
}

TEST_CASE("classical Fisher information: hand value, POVM checks, CR ordering")
{
    // Two-outcome projective measurement on a diagonal state.
    Povm two;
    two.effects.assign(2, Eigen::Matrix4cd::Zero());
    two.effects[0](1, 1) = 1.0;
    two.effects[1](2, 2) = 1.0;
    two.effects[1](0, 0) = 1.0;
    two.effects[0](3, 3) = 1.0;
    DensityMatrix4 rho = DensityMatrix4::Zero();
    rho(1, 1) = 0.25;
    rho(2, 2) = 0.75;
    DensityMatrix4 drho = DensityMatrix4::Zero();
    drho(1, 1) = 0.1;
    drho(2, 2) = -0.1;
    CHECK(classical_fisher(rho, drho, two) ==
          doctest::Approx(0.1 * 0.1 / 0.25 + 0.1 * 0.1 / 0.75).epsilon(1e-12));
    CHECK(classical_fisher(rho, DensityMatrix4::Zero(), two) == 0.0);

    Povm incomplete;
    incomplete.effects.assign(1, Eigen::Matrix4cd::Zero());
    incomplete.effects[0](0, 0) = 1.0;
    CHECK_THROWS_AS(classical_fisher(rho, drho, incomplete), std::invalid_argument);

    // G <= F along a trajectory for the standard POVM.
    ModelParams m = kStrong;
    m.rabi = 10.0;
    const Trajectory traj =
        simulate(m, {0.0, 0.0}, ControlPulse::zero(m.horizon), 300, {ParamTag::width});
    const Povm povm = single_excitation_povm();
    const FisherCurve f = qfi_curve(traj, ParamTag::width);
    const FisherCurve g = classical_fisher_curve(traj, ParamTag::width, povm);
    for (std::size_t i = 0; i < f.values.size(); ++i)
        CHECK(g.values[i] <= f.values[i] + 1e-8);
}

TEST_CASE("degenerate outcomes are dropped with a warning count")
{
    Povm projective;
    projective.effects.assign(2, Eigen::Matrix4cd::Zero());
    projective.effects[0](0, 0) = 1.0; // |11> population: identically zero here
    projective.effects[1] = Eigen::Matrix4cd::Identity() - projective.effects[0];
    const DensityMatrix4 rho = density_from_amplitudes(family_state(0.3));
    DensityMatrix4 drho = DensityMatrix4::Zero();
    drho(0, 0) = 0.5; // forces a diverging term on the zero-probability outcome
    drho(3, 3) = -0.5;
    int degenerate = 0;
    const double value = classical_fisher(rho, drho, projective, &degenerate);
    CHECK(degenerate == 1);
    CHECK(std::isfinite(value));
}

TEST_CASE("the standard three-outcome POVM is complete and positive")
{
    const Povm povm = single_excitation_povm();
    povm.validate();
    Eigen::Matrix4cd sum = Eigen::Matrix4cd::Zero();
    for (const auto& effect : povm.effects) sum += effect;
    CHECK((sum - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff() < 1e-15);

    const double w = std::sqrt(2.0) / (1.0 + std::sqrt(2.0));
    CHECK(w == doctest::Approx(0.58579).epsilon(1e-5));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(povm.effects[2], Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() == doctest::Approx(0.41421).epsilon(1e-5));
    CHECK(es.eigenvalues().maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));

    const DensityMatrix4 rho = density_from_amplitudes(family_state(0.4));
    double total = 0.0;
    for (const auto& effect : povm.effects) total += std::real((effect * rho).trace());
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("random POVMs never beat the quantum bound")
{
    std::mt19937_64 rng(13);
    std::normal_distribution<double> normal(0.0, 1.0);
    const DensityMatrix4 rho = density_from_amplitudes(family_state(0.7));
    const DensityMatrix4 drho =
        density_derivative(family_state(0.7), family_derivative(0.7));
    const double bound = qfi(rho, drho);
    for (int trial = 0; trial < 20; ++trial) {
        // Random PSD effects normalized to a resolution of the identity.
        std::vector<Eigen::Matrix4cd> raw(3);
        Eigen::Matrix4cd total = Eigen::Matrix4cd::Zero();
        for (auto& effect : raw) {
            Eigen::Matrix4cd g;
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) g(i, j) = complexd(normal(rng), normal(rng));
            effect = g * g.adjoint();
            total += effect;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(total);
        const Eigen::Matrix4cd inv_root =
            es.eigenvectors() *
            es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal().toDenseMatrix().cast<complexd>() *
            es.eigenvectors().adjoint();
        Povm povm;
        for (const auto& effect : raw) {
            Eigen::Matrix4cd e = inv_root * effect * inv_root;
            povm.effects.push_back(0.5 * (e + e.adjoint().eval()));
        }
        CHECK(classical_fisher(rho, drho, povm) <= bound + 1e-8);
    }
}

TEST_SUITE_END();
