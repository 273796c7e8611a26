#ifndef RINGJSA_ANALYSIS_HPP
#define RINGJSA_ANALYSIS_HPP

#include <vector>

#include <Eigen/Dense>

#include "ringjsa/jsa.hpp"
#include "ringjsa/units.hpp"

namespace ringjsa
{

struct SchmidtResult
{
    std::vector<double> weights;   // descending, sum to 1
    double purity = 0.0;           // sum of squared weights
    double effective_modes = 0.0;  // 1 / purity
};

// Schmidt decomposition of the grid-step-weighted amplitude matrix
// (sqrt(d_nu_s * d_nu_i) absorbed symmetrically so the result tracks the
// continuum decomposition). flat_phase decomposes |F| instead of F, the
// convention for measured intensity data.
SchmidtResult schmidt_decompose(const Grid2D& grid, bool flat_phase);
SchmidtResult schmidt_decompose(const JsaGrid& jsa, bool flat_phase);

// P = g_u2(0) - 1 in the low-squeezing regime.
double purity_to_g2(double purity);

struct GridPeak
{
    int i = 0;  // signal index
    int j = 0;  // idler index
    double value = 0.0;
};

// Strict 8-neighborhood local maxima with value >= rel_threshold * global
// max, interior pixels only, sorted by value descending.
std::vector<GridPeak> find_peaks(const Eigen::MatrixXd& grid, double rel_threshold);

struct LossBudget
{
    double alpha_gc_db = 0.0;  // grating coupler, dB per facet
    double alpha_de_db = 0.0;  // demultiplexer, dB per stage
    double eta_d = 1.0;        // detector efficiency
    int de_stages = 0;
};

struct OnChipRates
{
    double singles_hz = 0.0;
    double pairs_hz = 0.0;
};

// Removes the single-channel chain loss and detector efficiency:
// alpha_tot = 1 - 10^((-a_gc - stages*a_de)/10),
// singles = raw/eta/(1-alpha_tot), pairs = raw/eta^2/(1-alpha_tot)^2.
OnChipRates loss_corrected_rates(const LossBudget& budget, double raw_single_hz, double raw_coincidence_hz);

struct Marginals
{
    std::vector<double> signal;
    std::vector<double> idler;
};

// Trapezoid-integrated 1-D marginals of a real grid (rows signal).
Marginals marginals(const Eigen::MatrixXd& grid, double signal_spacing, double idler_spacing);

struct ReportPeak
{
    double d_lambda_s_nm = 0.0;
    double d_lambda_i_nm = 0.0;
    double height = 0.0;  // relative to the JSI maximum
};

struct AnalysisReport
{
    SchmidtResult schmidt;
    double g2_unheralded_zero = 0.0;
    std::vector<ReportPeak> peaks;
    Marginals jsi_marginals;
};

// Standard post-processing of a simulated JSA: Schmidt purity (complex
// amplitude by default), g2, JSI peak inventory at the relative
// threshold, marginals.
AnalysisReport analyze_jsa(const JsaGrid& jsa, double peak_rel_threshold = 0.10, bool flat_phase = false);

}  // namespace ringjsa

#endif
