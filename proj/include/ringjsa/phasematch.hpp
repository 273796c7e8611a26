#ifndef RINGJSA_PHASEMATCH_HPP
#define RINGJSA_PHASEMATCH_HPP

#include <complex>

namespace ringjsa
{

// Linearized phase matching over one pass of the ring waveguide.
// tau_s = k1(pump) - k1(signal), tau_i = k1(pump) - k1(idler) are the
// group-velocity mismatches [ps/um]; detunings enter in rad/ps so
// tau * nu has units 1/um.
struct PhaseMatchSpec
{
    double length_um = 94.24777960769379;  // 2*pi * 15 um ring circumference
    double tau_s = 0.0;
    double tau_i = 0.0;
    double gamma_nl = 0.0;       // nonlinear parameter [(W*um)^-1]
    double peak_power_w = 0.0;   // P
    double anchor_power_w = 0.0; // P0 at which delta_k^(0) vanishes
    double omega_s0 = 0.0;       // phase-matching anchors [rad/ps]
    double omega_i0 = 0.0;

    void validate() const;
};

// delta_k_lin = tau_s*nu_s + tau_i*nu_i - gamma*(P - P0). The power term
// shifts the anchor when operating away from the calibration power.
double delta_k_linear(const PhaseMatchSpec& spec, double nu_s, double nu_i);

// sinc(L*dk/2) * exp(i*L*dk/2), sinc(x) = sin(x)/x with sinc(0) = 1.
std::complex<double> phi_pm(const PhaseMatchSpec& spec, double nu_s, double nu_i);

// theta_si = -atan(tau_s/tau_i) in degrees, in (-90, 90); returns +-90 by
// the sign of tau_s when tau_i = 0.
double orientation_angle_deg(const PhaseMatchSpec& spec);

}  // namespace ringjsa

#endif
