#include "ringjsa/resonator.hpp"

#include <cmath>
#include <stdexcept>

#include "ringjsa/units.hpp"

namespace ringjsa
{

namespace
{
constexpr std::complex<double> kI{0.0, 1.0};
constexpr double kSingularFloor = 1e-30;

// Shared denominator of Eqs. for l_f, l_b and the through model:
// (i*(w-w0) + 1/tau)^2 + mu12*mu21. Guards pathological parameter sets.
std::complex<double> mode_denominator(const SplitResonance& r, double omega)
{
    const std::complex<double> pole = kI * (omega - r.omega0) + r.decay;
    const std::complex<double> den = pole * pole + r.mu12() * r.mu21();
    if (std::abs(den) < kSingularFloor)
    {
        throw std::domain_error("resonator: singular mode denominator (corrupted parameter set?)");
    }
    return den;
}
}  // namespace

double wrap_phase(double phi)
{
    double w = std::fmod(phi, kTwoPi);
    if (w < 0.0)
    {
        w += kTwoPi;
    }
    return w;
}

std::complex<double> SplitResonance::mu12() const
{
    return mu0 * std::polar(1.0, phi1);
}

std::complex<double> SplitResonance::mu21() const
{
    return mu0 * std::polar(1.0, phi2);
}

SplitResonance SplitResonance::unsplit() const
{
    SplitResonance r = *this;
    r.mu0 = 0.0;
    r.gamma = 0.0;
    return r;
}

void SplitResonance::normalize_and_validate()
{
    phi1 = wrap_phase(phi1);
    phi2 = wrap_phase(phi2);
    if (!(decay > 0.0))
    {
        throw std::invalid_argument("SplitResonance '" + label + "': decay must be positive");
    }
    if (kappa < 0.0 || mu0 < 0.0 || gamma < 0.0)
    {
        throw std::invalid_argument("SplitResonance '" + label + "': kappa, mu0, gamma must be non-negative");
    }
    if (!(c_norm > 0.0) || c_norm > 1.05)
    {
        throw std::invalid_argument("SplitResonance '" + label + "': C must lie in (0, 1.05]");
    }
}

std::complex<double> enhancement_forward(const SplitResonance& r, double omega)
{
    const double d = omega - r.omega0;
    const std::complex<double> num = -r.gamma * r.mu12() + std::complex<double>(d, -r.decay);
    return r.kappa * num / mode_denominator(r, omega);
}

std::complex<double> enhancement_backward(const SplitResonance& r, double omega)
{
    const double d = omega - r.omega0;
    const std::complex<double> num = -r.mu21() + r.gamma * std::complex<double>(d, -r.decay);
    return r.kappa * num / mode_denominator(r, omega);
}

std::complex<double> through_transmission(const SplitResonance& r, double omega)
{
    const double d = omega - r.omega0;
    const std::complex<double> pole = kI * d + r.decay;
    const std::complex<double> num =
        kI * r.gamma * r.mu0 * (std::polar(1.0, r.phi1) + std::polar(1.0, r.phi2)) - (1.0 + r.gamma * r.gamma) * pole;
    return r.c_norm + r.kappa * r.kappa * num / mode_denominator(r, omega);
}

TcmtSteadyState solve_tcmt_steady(const SplitResonance& r, double omega, std::complex<double> s_in)
{
    TcmtSteadyState st;
    st.a_forward = enhancement_forward(r, omega) * s_in;
    st.a_backward = enhancement_backward(r, omega) * s_in;
    const double kappa_b = r.gamma * r.kappa;
    st.s_out = s_in - kI * r.kappa * st.a_forward - kI * kappa_b * st.a_backward;
    return st;
}

}  // namespace ringjsa
