#include "ringjsa/pump.hpp"

#include <cmath>
#include <stdexcept>

#include "ringjsa/units.hpp"

namespace ringjsa
{

namespace
{
constexpr std::complex<double> kI{0.0, 1.0};
}

double DifferentiatorSpec::fsr() const
{
    return kTwoPi / t_s_ps;
}

void DifferentiatorSpec::validate() const
{
    if (!(tau_c > 0.0) || !(tau_c < 1.0))
    {
        throw std::invalid_argument("DifferentiatorSpec: tau_c must lie in (0, 1)");
    }
    if (!(alpha_rt > 0.0) || alpha_rt > 1.0)
    {
        throw std::invalid_argument("DifferentiatorSpec: alpha_rt must lie in (0, 1]");
    }
    if (!(t_s_ps > 0.0))
    {
        throw std::invalid_argument("DifferentiatorSpec: t_s_ps must be positive");
    }
}

void IdealDiff::validate() const
{
    if (!(order > 0.0))
    {
        throw std::invalid_argument("IdealDiff: order must be positive");
    }
}

double PumpSpec::fwhm_radps() const
{
    // delta_omega = 2*pi*c * delta_lambda / lambda^2, at the center carrier
    const double lambda = omega_to_wavelength(center);
    return kTwoPi * kSpeedOfLightNmPerPs * (fwhm_pm * 1e-3) / (lambda * lambda);
}

double PumpSpec::sigma() const
{
    return fwhm_radps() / (2.0 * std::sqrt(std::log(2.0)));
}

void PumpSpec::validate() const
{
    if (!(fwhm_pm > 0.0))
    {
        throw std::invalid_argument("PumpSpec: fwhm_pm must be positive");
    }
    if (!(center > 0.0))
    {
        throw std::invalid_argument("PumpSpec: center must be positive");
    }
    if (const auto* d = std::get_if<DifferentiatorSpec>(&transform))
    {
        d->validate();
    }
    else if (const auto* n = std::get_if<IdealDiff>(&transform))
    {
        n->validate();
    }
}

std::complex<double> mrr_diff_transfer(const DifferentiatorSpec& spec, double omega)
{
    // Resonances of the raw transfer sit at w*T_s = 2*pi*k. Shifting omega
    // by (omega_align - nearest resonance) centers one tooth exactly on
    // omega_align; the 2*pi*k part of the phase drops analytically, so the
    // shifted phase is just -(omega - omega_align)*T_s.
    const std::complex<double> e = std::polar(1.0, -(omega - spec.omega_align) * spec.t_s_ps);
    return (spec.tau_c - spec.alpha_rt * e) / (1.0 - spec.tau_c * spec.alpha_rt * e);
}

std::complex<double> ideal_diff_transfer(const IdealDiff& spec, double omega)
{
    return std::pow(kI * (omega - spec.omega0), std::complex<double>(spec.order, 0.0));
}

std::complex<double> transform_transfer(const PumpTransform& t, double omega)
{
    if (const auto* d = std::get_if<DifferentiatorSpec>(&t))
    {
        return mrr_diff_transfer(*d, omega);
    }
    if (const auto* n = std::get_if<IdealDiff>(&t))
    {
        return ideal_diff_transfer(*n, omega);
    }
    return {1.0, 0.0};
}

std::complex<double> pump_envelope(const PumpSpec& spec, double omega)
{
    const double s = spec.sigma();
    const double d = omega - spec.center;
    const std::complex<double> base = std::exp(-d * d / (2.0 * s * s));
    return base * transform_transfer(spec.transform, omega);
}

double estimate_diff_order(const std::function<std::complex<double>(double)>& transfer,
                           double omega_res, double band_half_width)
{
    if (!(band_half_width > 0.0))
    {
        throw std::invalid_argument("estimate_diff_order: band_half_width must be positive");
    }
    constexpr int kSamples = 64;
    const double lo = std::log(band_half_width / 100.0);
    const double hi = std::log(band_half_width);
    double slope_sum = 0.0;
    for (const double side : {+1.0, -1.0})
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (int i = 0; i < kSamples; ++i)
        {
            const double x = lo + (hi - lo) * i / (kSamples - 1);
            const double d = std::exp(x);
            const double y = std::log(std::abs(transfer(omega_res + side * d)));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        slope_sum += (kSamples * sxy - sx * sy) / (kSamples * sxx - sx * sx);
    }
    return 0.5 * slope_sum;
}

double estimate_diff_order(const DifferentiatorSpec& spec, double band_half_width)
{
    if (band_half_width > spec.fsr() / 4.0)
    {
        throw std::invalid_argument("estimate_diff_order: band wider than FSR/4");
    }
    // the aligned resonance is exactly at omega_align by construction
    return estimate_diff_order([&spec](double w) { return mrr_diff_transfer(spec, w); },
                               spec.omega_align, band_half_width);
}

std::vector<std::complex<double>> pump_waveform(const PumpSpec& spec, const std::vector<double>& time_grid_ps)
{
    const int n = static_cast<int>(time_grid_ps.size());
    if (n < 2)
    {
        throw std::invalid_argument("pump_waveform: need at least 2 time samples");
    }
    const double dt = time_grid_ps[1] - time_grid_ps[0];
    for (int i = 1; i < n; ++i)
    {
        if (std::abs((time_grid_ps[i] - time_grid_ps[i - 1]) - dt) > 1e-9 * std::abs(dt))
        {
            throw std::invalid_argument("pump_waveform: time grid must be uniform");
        }
    }
    // conjugate frequency grid about the carrier
    std::vector<std::complex<double>> amp(static_cast<std::size_t>(n));
    std::vector<double> nu(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
    {
        nu[k] = kTwoPi * (k - n / 2) / (n * dt);
        amp[k] = pump_envelope(spec, spec.center + nu[k]);
    }
    std::vector<std::complex<double>> out(static_cast<std::size_t>(n));
    double peak = 0.0;
    for (int j = 0; j < n; ++j)
    {
        std::complex<double> acc{0.0, 0.0};
        for (int k = 0; k < n; ++k)
        {
            acc += amp[k] * std::polar(1.0, -nu[k] * time_grid_ps[j]);
        }
        out[j] = acc;
        peak = std::max(peak, std::abs(acc));
    }
    if (peak > 0.0)
    {
        for (auto& v : out)
        {
            v /= peak;
        }
    }
    return out;
}

}  // namespace ringjsa
