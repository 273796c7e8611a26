#ifndef RINGJSA_UNITS_HPP
#define RINGJSA_UNITS_HPP

#include <vector>

#include <Eigen/Dense>

namespace ringjsa
{

// All internal frequencies are angular, in rad/ps (numerically the "THz"
// convention of the resonance tables: 1546.70 nm <-> 1217.85 rad/ps).
// Wavelengths (nm) appear only at IO boundaries.
inline constexpr double kSpeedOfLightNmPerPs = 299792.458;
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// omega [rad/ps] = 2*pi*c / lambda [nm]. Throws std::domain_error for
// non-positive wavelengths.
double wavelength_to_omega(double lambda_nm);
double omega_to_wavelength(double omega_radps);

// Wavelength detuning of (center + nu) relative to the center carrier,
// converted exactly (not linearized).
double detuning_to_dlambda(double center_radps, double nu_radps);

// Uniform grid of angular-frequency detunings about an absolute carrier.
struct DetuningGrid1D
{
    double center_radps = 0.0;
    std::vector<double> points;  // detunings, strictly increasing, uniform

    int count() const { return static_cast<int>(points.size()); }
    double spacing() const { return points.size() > 1 ? points[1] - points[0] : 0.0; }
    double absolute(int i) const { return center_radps + points[static_cast<std::size_t>(i)]; }
    double half_width() const { return points.empty() ? 0.0 : 0.5 * (points.back() - points.front()); }
};

// count points from -half_width to +half_width inclusive, symmetric about
// zero detuning. count < 2 or half_width <= 0 -> std::invalid_argument.
DetuningGrid1D make_grid(double center_radps, double half_width_radps, int count);

// Trapezoid quadrature weights for a uniform grid: h at interior points,
// h/2 at the two ends.
std::vector<double> trapezoid_weights(int count, double spacing);

// 2-D field over a signal x idler detuning grid. Rows index the signal
// axis, columns the idler axis (row-major at IO).
struct Grid2D
{
    DetuningGrid1D signal_axis;
    DetuningGrid1D idler_axis;
    Eigen::MatrixXcd values;
};

}  // namespace ringjsa

#endif
