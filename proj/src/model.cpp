#include "qprobe/model.hpp"

#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace qprobe {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kHermitianTol = 1e-12;
constexpr double kTraceTol = 1e-10;
constexpr double kEigenvalueTol = 1e-10;
constexpr double kExcitationTol = 1e-9;
} // namespace

const char* to_string(ParamTag tag)
{
    switch (tag) {
    case ParamTag::time: return "t";
    case ParamTag::rabi: return "R";
    case ParamTag::width: return "lambda";
    case ParamTag::phase: return "phi";
    }
    return "?";
}

ParamTag param_tag_from_string(const std::string& name)
{
    if (name == "t") return ParamTag::time;
    if (name == "R") return ParamTag::rabi;
    if (name == "lambda") return ParamTag::width;
    if (name == "phi") return ParamTag::phase;
    throw std::invalid_argument("unknown parameter tag: " + name);
}

void ModelParams::validate() const
{
    if (!(a1 > 0.0) || !(a2 > 0.0))
        throw std::invalid_argument("ModelParams: couplings a1, a2 must be positive");
    if (!(rabi > 0.0))
        throw std::invalid_argument("ModelParams: rabi frequency must be positive");
    if (!(lambda > 0.0))
        throw std::invalid_argument("ModelParams: spectral width must be positive");
    if (!(horizon > 0.0))
        throw std::invalid_argument("ModelParams: horizon must be positive");
}

void InitialStateParam::validate() const
{
    if (!(s >= -1.0 && s <= 1.0))
        throw std::invalid_argument("InitialStateParam: s must lie in [-1, 1]");
    if (!(phi >= 0.0 && phi <= kPi))
        throw std::invalid_argument("InitialStateParam: phi must lie in [0, pi]");
}

ProbeAmplitudes amplitudes_from_param(const InitialStateParam& p)
{
    p.validate();
    ProbeAmplitudes a;
    a.c1 = std::sqrt((1.0 - p.s) / 2.0);
    a.c2 = std::sqrt((1.0 + p.s) / 2.0) * std::polar(1.0, p.phi);
    return a;
}

InitialStateParam param_from_amplitudes(const ProbeAmplitudes& a)
{
    InitialStateParam p;
    p.s = std::norm(a.c2) - std::norm(a.c1);
    p.phi = std::abs(a.c2) > 0.0 ? std::arg(a.c2) : 0.0;
    return p;
}

ProbeAmplitudes subradiant_state(const ModelParams& m)
{
    m.validate();
    const double at = m.total_coupling();
    return {m.a2 / at, -m.a1 / at, 0.0, 0.0};
}

ProbeAmplitudes superradiant_state(const ModelParams& m)
{
    m.validate();
    const double at = m.total_coupling();
    return {m.a1 / at, m.a2 / at, 0.0, 0.0};
}

InitialStateParam subradiant_param(const ModelParams& m)
{
    const double at2 = m.a1 * m.a1 + m.a2 * m.a2;
    return {-(m.a2 * m.a2 - m.a1 * m.a1) / at2, kPi};
}

InitialStateParam superradiant_param(const ModelParams& m)
{
    const double at2 = m.a1 * m.a1 + m.a2 * m.a2;
    return {(m.a2 * m.a2 - m.a1 * m.a1) / at2, 0.0};
}

DensityMatrix4 density_from_amplitudes(const ProbeAmplitudes& a)
{
    const double n = a.excitation();
    if (n > 1.0 + kExcitationTol)
        throw std::invalid_argument("density_from_amplitudes: excitation exceeds 1");
    DensityMatrix4 rho = DensityMatrix4::Zero();
    rho(1, 1) = std::norm(a.c1);
    rho(2, 2) = std::norm(a.c2);
    rho(1, 2) = a.c1 * std::conj(a.c2);
    rho(2, 1) = std::conj(rho(1, 2));
    double ground = 1.0 - n;
    if (ground < 0.0) ground = 0.0; // within kExcitationTol of the boundary
    rho(3, 3) = ground;
    return rho;
}

DensityMatrix4 density_derivative(const ProbeAmplitudes& a, const ProbeAmplitudes& d)
{
    DensityMatrix4 drho = DensityMatrix4::Zero();
    const double dn1 = 2.0 * std::real(std::conj(a.c1) * d.c1);
    const double dn2 = 2.0 * std::real(std::conj(a.c2) * d.c2);
    drho(1, 1) = dn1;
    drho(2, 2) = dn2;
    drho(1, 2) = d.c1 * std::conj(a.c2) + a.c1 * std::conj(d.c2);
    drho(2, 1) = std::conj(drho(1, 2));
    drho(3, 3) = -dn1 - dn2;
    return drho;
}

void validate_density(const DensityMatrix4& rho)
{
    const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kHermitianTol)
        throw std::invalid_argument("density matrix is not Hermitian");
    const double tr = std::abs(rho.trace() - complexd(1.0, 0.0));
    if (tr > kTraceTol)
        throw std::invalid_argument("density matrix trace differs from 1");
    Eigen::SelfAdjointEigenSolver<DensityMatrix4> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kEigenvalueTol)
        throw std::invalid_argument("density matrix has a negative eigenvalue");
}

} // namespace qprobe
