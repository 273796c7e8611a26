#ifndef RINGJSA_JSA_HPP
#define RINGJSA_JSA_HPP

#include <complex>
#include <vector>

#include "ringjsa/phasematch.hpp"
#include "ringjsa/pump.hpp"
#include "ringjsa/resonator.hpp"
#include "ringjsa/units.hpp"

namespace ringjsa
{

// Full description of one photon-pair simulation: the resonance triple,
// the pump envelope, phase matching, and the output discretization.
struct SourceConfig
{
    SplitResonance pump_res;
    SplitResonance signal_res;
    SplitResonance idler_res;
    PumpSpec pump;
    PhaseMatchSpec pm;
    DetuningGrid1D signal_grid;
    DetuningGrid1D idler_grid;
    int pump_quadrature_points = 257;
    double pump_window_half_width = 0.0;  // rad/ps; 0 = automatic
    int threads = 0;                      // 0 = hardware concurrency
};

struct EnergyMatch
{
    double detuning;   // |2*w_p0 - w_s0 - w_i0| [rad/ps]
    double linewidth;  // max of the three decay rates
    bool warn = false; // detuning >= 3 linewidths
    bool fail = false; // detuning >= 10x the warn limit
};

EnergyMatch check_energy_matching(const SourceConfig& cfg);

// Throws std::invalid_argument when the triple violates energy matching
// beyond the hard limit; returns the soft-warning state otherwise.
EnergyMatch validate_source_config(const SourceConfig& cfg);

// Convenience constructor: grids centered on the signal/idler resonances,
// half-width in units of each resonance's decay rate 1/tau.
SourceConfig make_source_config(const SplitResonance& pump_res, const SplitResonance& signal_res,
                                const SplitResonance& idler_res, const PumpSpec& pump,
                                const PhaseMatchSpec& pm, int signal_points = 128, int idler_points = 128,
                                double half_width_linewidths = 3.0);

struct JsaGrid
{
    Grid2D grid;            // complex F, rows signal x cols idler
    double norm = 1.0;      // sqrt(N) prefactor applied to reach unit L2 norm
    bool window_warning = false;
    SourceConfig meta;
};

// Two-dimensional signal-idler filter:
// TDSI = l_sf(w_s)*l_if(w_i) + gamma_s*gamma_i*l_sb(w_s)*l_ib(w_i).
Grid2D compute_tdsi(const SourceConfig& cfg);

// Antidiagonal pump function evaluated at sum detunings nu_sum about
// (w_s0 + w_i0): the weighted sum of the discrete auto-convolutions of
// alpha_p*l_pf and alpha_p*l_pb, the pump sampled at half the nu_sum
// spacing so convolution samples land on the requested points.
std::vector<std::complex<double>> compute_adp(const SourceConfig& cfg, const DetuningGrid1D& nu_sum_grid);

// Trapezoid quadrature of the joint amplitude over the pump frequency,
// per pixel; normalized to unit L2 norm on the grid.
JsaGrid compute_jsa_quadrature(const SourceConfig& cfg);

// Fast path F = phi_pm * TDSI * ADP(nu_s + nu_i); exact whenever phi_pm
// does not vary inside the pump integral (it never does in the linear
// model, which drops the pump detuning from delta_k).
JsaGrid compute_jsa_factorized(const SourceConfig& cfg);

// L2 norm of |F|^2 over the grid with trapezoid weights; 1 after
// normalization.
double grid_l2_norm_sq(const Grid2D& grid);

}  // namespace ringjsa

#endif
