#ifndef RINGJSA_PUMP_HPP
#define RINGJSA_PUMP_HPP

#include <complex>
#include <functional>
#include <variant>
#include <vector>

namespace ringjsa
{

// All-pass ring used as a temporal differentiator in front of the pair
// source. omega_align picks which of the periodic resonances is centered
// on the pump: evaluation shifts omega so the resonance nearest
// omega_align lands exactly on it.
struct DifferentiatorSpec
{
    double tau_c = 0.9;       // self-coupling coefficient, in (0, 1)
    double alpha_rt = 0.98;   // round-trip amplitude loss, in (0, 1]
    double t_s_ps = 2.6407647276591191;  // round trip delay (30 um radius, n_g = 4.2)
    double omega_align = 0.0;            // rad/ps

    double fsr() const;  // 2*pi / T_s [rad/ps]
    void validate() const;
};

// Ideal Nth-order differentiator H(w) = [i(w - w0)]^N, principal branch.
struct IdealDiff
{
    double order = 1.0;  // > 0, may be fractional
    double omega0 = 0.0;
    void validate() const;
};

using PumpTransform = std::variant<std::monostate, DifferentiatorSpec, IdealDiff>;

// Gaussian pump spectral envelope. fwhm_pm is the FWHM of the POWER
// spectrum |alpha|^2, measured in wavelength at the center (OSA
// convention); the amplitude sigma follows as
// sigma = delta_omega_fwhm / (2*sqrt(ln 2)).
struct PumpSpec
{
    double center = 0.0;    // rad/ps
    double fwhm_pm = 100.0;
    PumpTransform transform{};

    double fwhm_radps() const;  // angular power FWHM
    double sigma() const;       // amplitude sigma [rad/ps]
    void validate() const;
};

std::complex<double> mrr_diff_transfer(const DifferentiatorSpec& spec, double omega);
std::complex<double> ideal_diff_transfer(const IdealDiff& spec, double omega);

// Transfer of whichever transform is present; 1 for none.
std::complex<double> transform_transfer(const PumpTransform& t, double omega);

// Envelope including the optional transform. Not normalized (the JSA
// normalization absorbs scale); peaks at 1 for the bare Gaussian.
std::complex<double> pump_envelope(const PumpSpec& spec, double omega);

// Differentiation order estimated from the transfer magnitude: slope of
// the linear regression of log|H| on log|w - w_res|, sampled log-spaced
// on 64 points per side over (band/100, band], sides averaged.
double estimate_diff_order(const std::function<std::complex<double>(double)>& transfer,
                           double omega_res, double band_half_width);

// Same, on the aligned resonance of an MRR differentiator. Bands wider
// than FSR/4 reach into the periodic structure -> std::invalid_argument.
double estimate_diff_order(const DifferentiatorSpec& spec, double band_half_width);

// Inverse DFT of the sampled spectral envelope (with transform) on the
// conjugate frequency grid of the given uniform time grid, normalized to
// unit peak magnitude. Baseband convention: the carrier is removed.
std::vector<std::complex<double>> pump_waveform(const PumpSpec& spec, const std::vector<double>& time_grid_ps);

}  // namespace ringjsa

#endif
