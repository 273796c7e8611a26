#ifndef RINGJSA_SPECFIT_HPP
#define RINGJSA_SPECFIT_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "ringjsa/resonator.hpp"
#include "ringjsa/units.hpp"

namespace ringjsa
{

struct SpectrumSample
{
    double wavelength_nm = 0.0;
    double transmission = 0.0;  // power ratio, >= 0
};

struct FitOptions
{
    int multistart = 8;            // perturbed restarts on top of the base start
    int max_iterations = 500;      // refinement iterations per start
    int simplex_max_evals = 1600;  // budget of the derivative-free stage
    double tolerance = 1e-10;      // relative residual-change convergence
    double perturbation = 0.3;     // +-30% log-space multi-start spread
    std::uint64_t seed = 20240617; // fixed: fits are reproducible by default
};

struct FitResult
{
    SplitResonance params;
    double r_squared = 0.0;     // on amplitude data, 1 - SS_res/SS_tot
    double residual_rms = 0.0;  // rms of amplitude residuals
    int iterations = 0;
    bool converged = false;
};

// Least-squares fit of |S_o/S_i| to the square root of the measured
// transmission over the eight resonance parameters. Positivity is
// enforced by log transforms, C by a logistic onto (0, 1.05], phases wrap.
// Derivative-free simplex locates the basin, damped Gauss-Newton with a
// numerically differenced Jacobian polishes it; the best of the
// multi-start candidates wins.
//
// Fewer than 20 samples or non-monotone wavelengths -> std::invalid_argument.
// Optimizer stagnation is reported via converged = false, not an exception.
FitResult fit_resonance(const std::vector<SpectrumSample>& samples,
                        const std::optional<SplitResonance>& init = std::nullopt,
                        const FitOptions& options = FitOptions{});

// Transmission = (|S_o/S_i| + eps)^2 with amplitude noise eps ~ N(0, sigma),
// clamped at zero amplitude. Deterministic for a given seed.
std::vector<SpectrumSample> synthesize_spectrum(const SplitResonance& params, const DetuningGrid1D& grid,
                                                double noise_sigma, std::uint64_t seed = 0);

// Heuristic starting point: dip centroid for omega0, half-depth width for
// the decay rate, dip separation (when a double dip is resolved) for mu0,
// off-resonance median for C, over-coupled dip depth for kappa. Never
// throws; a flat spectrum yields a broad centered guess.
SplitResonance initial_guess(const std::vector<SpectrumSample>& samples);

}  // namespace ringjsa

#endif
