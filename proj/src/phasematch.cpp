#include "ringjsa/phasematch.hpp"

#include <cmath>
#include <stdexcept>

#include "ringjsa/units.hpp"

namespace ringjsa
{

void PhaseMatchSpec::validate() const
{
    if (!(length_um > 0.0))
    {
        throw std::invalid_argument("PhaseMatchSpec: length must be positive");
    }
}

double delta_k_linear(const PhaseMatchSpec& spec, double nu_s, double nu_i)
{
    return spec.tau_s * nu_s + spec.tau_i * nu_i - spec.gamma_nl * (spec.peak_power_w - spec.anchor_power_w);
}

std::complex<double> phi_pm(const PhaseMatchSpec& spec, double nu_s, double nu_i)
{
    const double x = 0.5 * spec.length_um * delta_k_linear(spec, nu_s, nu_i);
    const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
    return sinc * std::polar(1.0, x);
}

double orientation_angle_deg(const PhaseMatchSpec& spec)
{
    if (spec.tau_i == 0.0)
    {
        if (spec.tau_s == 0.0)
        {
            return 0.0;
        }
        // tau_i -> 0+ limit of -atan(tau_s/tau_i)
        return spec.tau_s > 0.0 ? -90.0 : 90.0;
    }
    return -std::atan(spec.tau_s / spec.tau_i) * 360.0 / kTwoPi;
}

}  // namespace ringjsa
