#include "ringjsa/units.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ringjsa
{

double wavelength_to_omega(double lambda_nm)
{
    if (!(lambda_nm > 0.0))
    {
        throw std::domain_error("wavelength_to_omega: non-positive wavelength " + std::to_string(lambda_nm));
    }
    return kTwoPi * kSpeedOfLightNmPerPs / lambda_nm;
}

double omega_to_wavelength(double omega_radps)
{
    if (!(omega_radps > 0.0))
    {
        throw std::domain_error("omega_to_wavelength: non-positive angular frequency " + std::to_string(omega_radps));
    }
    return kTwoPi * kSpeedOfLightNmPerPs / omega_radps;
}

double detuning_to_dlambda(double center_radps, double nu_radps)
{
    return omega_to_wavelength(center_radps + nu_radps) - omega_to_wavelength(center_radps);
}

DetuningGrid1D make_grid(double center_radps, double half_width_radps, int count)
{
    if (count < 2)
    {
        throw std::invalid_argument("make_grid: count must be >= 2, got " + std::to_string(count));
    }
    if (!(half_width_radps > 0.0))
    {
        throw std::invalid_argument("make_grid: half_width must be positive");
    }
    DetuningGrid1D grid;
    grid.center_radps = center_radps;
    grid.points.resize(static_cast<std::size_t>(count));
    const double step = 2.0 * half_width_radps / static_cast<double>(count - 1);
    const int mid = (count - 1) / 2;
    for (int i = 0; i < count; ++i)
    {
        // build symmetric pairs exactly: points[i] = -points[count-1-i]
        grid.points[static_cast<std::size_t>(i)] = (i - 0.5 * (count - 1)) * step;
    }
    if (count % 2 == 1)
    {
        grid.points[static_cast<std::size_t>(mid)] = 0.0;
    }
    return grid;
}

std::vector<double> trapezoid_weights(int count, double spacing)
{
    std::vector<double> w(static_cast<std::size_t>(count), spacing);
    if (count > 0)
    {
        w.front() *= 0.5;
        w.back() *= 0.5;
    }
    return w;
}

}  // namespace ringjsa
