#include "qprobe/metrology.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "qprobe/util.hpp"

namespace qprobe {

namespace {
constexpr double kDrhoTol = 1e-8;
constexpr double kNegativeEigTol = 1e-10;
constexpr double kCurveClamp = 1e-9;

void require_hermitian_traceless(const DensityMatrix4& drho)
{
    if ((drho - drho.adjoint()).cwiseAbs().maxCoeff() > kDrhoTol)
        throw std::invalid_argument("qfi: drho is not Hermitian");
    if (std::abs(drho.trace()) > kDrhoTol)
        throw std::invalid_argument("qfi: drho is not traceless");
}
} // namespace

SpectralDecomposition spectral_decomposition(const DensityMatrix4& rho)
{
    Eigen::SelfAdjointEigenSolver<DensityMatrix4> es(rho);
    SpectralDecomposition out;
    // Eigen sorts ascending; flip to descending.
    for (int i = 0; i < 4; ++i) {
        out.eigenvalues(i) = es.eigenvalues()(3 - i);
        out.eigenvectors.col(i) = es.eigenvectors().col(3 - i);
    }
    return out;
}

void Povm::validate() const
{
    if (effects.empty()) throw std::invalid_argument("Povm: no effects");
    Eigen::Matrix4cd sum = Eigen::Matrix4cd::Zero();
    for (const auto& effect : effects) {
        if ((effect - effect.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
            throw std::invalid_argument("Povm: effect is not Hermitian");
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(effect, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-10)
            throw std::invalid_argument("Povm: effect is not positive semidefinite");
        sum += effect;
    }
    if ((sum - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("Povm: effects do not sum to the identity");
}

double qfi(const DensityMatrix4& rho, const DensityMatrix4& drho, double eig_cutoff)
{
    require_hermitian_traceless(drho);
    Eigen::SelfAdjointEigenSolver<DensityMatrix4> es(rho);
    const auto& w = es.eigenvalues();
    if (w.minCoeff() < -kNegativeEigTol)
        throw std::runtime_error("qfi: rho has a negative eigenvalue beyond tolerance");
    const Eigen::Matrix4cd m = es.eigenvectors().adjoint() * drho * es.eigenvectors();

    double classical = 0.0;
    double quantum = 0.0;
    for (int n = 0; n < 4; ++n) {
        if (w(n) > eig_cutoff) {
            const double diag = std::real(m(n, n));
            classical += diag * diag / w(n);
        }
        for (int mm = n + 1; mm < 4; ++mm) {
            const double denom = w(n) + w(mm);
            if (denom > eig_cutoff) quantum += 4.0 * std::norm(m(n, mm)) / denom;
        }
    }
    return classical + quantum;
}

double qfi_time(const Trajectory& traj, int index)
{
    const DensityMatrix4 rho = density_from_amplitudes(traj.states[index]);
    return qfi(rho, time_derivative_rho(traj, index));
}

FisherCurve qfi_curve(const Trajectory& traj, ParamTag tag)
{
    if (tag != ParamTag::time && !traj.has_sensitivity(tag))
        throw std::invalid_argument(std::string("qfi_curve: trajectory lacks a ") +
                                    to_string(tag) + " sensitivity track");
    FisherCurve curve;
    curve.tag = tag;
    curve.times = traj.times;
    curve.values.resize(traj.times.size());
    for (int i = 0; i < traj.size(); ++i) {
        const DensityMatrix4 rho = density_from_amplitudes(traj.states[i]);
        double v = qfi(rho, parameter_derivative_rho(traj, tag, i));
        if (v < 0.0) {
            if (v < -kCurveClamp)
                throw std::runtime_error("qfi_curve: negative QFI, sensitivity track is broken");
            v = 0.0;
        }
        curve.values[i] = v;
    }
    return curve;
}

double total_qfi(const FisherCurve& curve)
{
    if (curve.times.empty()) throw std::invalid_argument("total_qfi: empty curve");
    return trapezoid(curve.times, curve.values);
}

double classical_fisher(const DensityMatrix4& rho, const DensityMatrix4& drho, const Povm& povm,
                        int* degenerate_outcomes, double prob_cutoff)
{
    povm.validate();
    require_hermitian_traceless(drho);
    double info = 0.0;
    for (const auto& effect : povm.effects) {
        const double p = std::real((effect * rho).trace());
        const double dp = std::real((effect * drho).trace());
        if (p < prob_cutoff) {
            if (std::abs(dp) >= std::sqrt(prob_cutoff)) {
                // A vanishing outcome with nonvanishing derivative makes the
                // information formally divergent; surface it, don't emit inf.
                if (degenerate_outcomes) ++(*degenerate_outcomes);
                continue;
            }
            info += dp * dp / prob_cutoff;
        } else {
            info += dp * dp / p;
        }
    }
    return info;
}

FisherCurve classical_fisher_curve(const Trajectory& traj, ParamTag tag, const Povm& povm)
{
    povm.validate();
    if (tag != ParamTag::time && !traj.has_sensitivity(tag))
        throw std::invalid_argument(std::string("classical_fisher_curve: trajectory lacks a ") +
                                    to_string(tag) + " sensitivity track");
    FisherCurve curve;
    curve.tag = tag;
    curve.times = traj.times;
    curve.values.resize(traj.times.size());
    for (int i = 0; i < traj.size(); ++i) {
        const DensityMatrix4 rho = density_from_amplitudes(traj.states[i]);
        curve.values[i] = classical_fisher(rho, parameter_derivative_rho(traj, tag, i), povm);
    }
    return curve;
}

Povm single_excitation_povm()
{
    const double w = std::sqrt(2.0) / (1.0 + std::sqrt(2.0));
    Povm povm;
    povm.effects.assign(3, Eigen::Matrix4cd::Zero());
    povm.effects[0](1, 1) = w;
    povm.effects[1](2, 2) = w;
    povm.effects[2] = Eigen::Matrix4cd::Identity() - povm.effects[0] - povm.effects[1];
    return povm;
}

} // namespace qprobe
