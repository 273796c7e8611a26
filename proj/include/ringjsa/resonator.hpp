#ifndef RINGJSA_RESONATOR_HPP
#define RINGJSA_RESONATOR_HPP

#include <complex>
#include <string>

namespace ringjsa
{

// One split resonance of the photon-pair-generation ring, in the
// eight-parameter form extracted by the transmission fit. The complex
// mutual coupling coefficients are reconstructed at evaluation time as
// mu12 = mu0*exp(i*phi1), mu21 = mu0*exp(i*phi2); the backward coupler
// coefficient is never stored, kappa' = gamma*kappa.
struct SplitResonance
{
    std::string label;
    double c_norm = 1.0;   // C, dimensionless amplitude factor of the fit model
    double decay = 1.0;    // 1/tau, total amplitude decay rate [rad/ps]
    double gamma = 0.0;    // kappa'/kappa, backward/forward coupler ratio
    double mu0 = 0.0;      // |mu12| = |mu21| [rad/ps]
    double kappa = 0.0;    // forward field coupling [sqrt(rad/ps)]
    double phi1 = 0.0;     // arg(mu12), stored in [0, 2pi)
    double phi2 = 0.0;     // arg(mu21), stored in [0, 2pi)
    double omega0 = 0.0;   // resonance center [rad/ps]

    std::complex<double> mu12() const;
    std::complex<double> mu21() const;

    // Same resonance with the backscattering channel removed (mu0 = 0,
    // gamma = 0): the unsplit single-Lorentzian reduction.
    SplitResonance unsplit() const;

    // Wraps phases into [0, 2pi); throws std::invalid_argument when an
    // invariant (decay > 0, kappa >= 0, mu0 >= 0, gamma >= 0,
    // 0 < C <= 1.05) is violated.
    void normalize_and_validate();
};

double wrap_phase(double phi);  // into [0, 2pi)

// Intra-cavity forward field enhancement l_f(omega):
//   kappa * [-gamma*mu12 + (w - w0) - i/tau] / [(i(w - w0) + 1/tau)^2 + mu12*mu21]
std::complex<double> enhancement_forward(const SplitResonance& res, double omega);

// Backward field enhancement l_b(omega):
//   kappa * [-mu21 + gamma*(w - w0) - i*gamma/tau] / (same denominator)
std::complex<double> enhancement_backward(const SplitResonance& res, double omega);

// Through-port amplitude ratio S_o/S_i of the fit model; C replaces the
// unit leading term of the ideal ring.
std::complex<double> through_transmission(const SplitResonance& res, double omega);

struct TcmtSteadyState
{
    std::complex<double> a_forward;
    std::complex<double> a_backward;
    std::complex<double> s_out;
};

// Frequency-domain steady state for input amplitude s_in:
// a_f = l_f*s_in, a_b = l_b*s_in, s_out = s_in - i*kappa*a_f - i*kappa'*a_b.
// Equals through_transmission when C = 1.
TcmtSteadyState solve_tcmt_steady(const SplitResonance& res, double omega, std::complex<double> s_in);

}  // namespace ringjsa

#endif
