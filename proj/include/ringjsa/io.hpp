#ifndef RINGJSA_IO_HPP
#define RINGJSA_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "ringjsa/analysis.hpp"
#include "ringjsa/jsa.hpp"
#include "ringjsa/specfit.hpp"

namespace ringjsa
{

// Thrown on malformed input files; message carries the 1-based line
// number where parsing stopped.
class ParseError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// --- resonance JSON (keys fixed by the wire format) -----------------------
nlohmann::json resonance_to_json(const SplitResonance& res);
SplitResonance resonance_from_json(const nlohmann::json& j);

nlohmann::json fit_result_to_json(const FitResult& result);
nlohmann::json report_to_json(const AnalysisReport& report);

// --- CSV -------------------------------------------------------------------
// header: wavelength_nm,transmission
std::vector<SpectrumSample> read_spectrum_csv(const std::filesystem::path& path);
void write_spectrum_csv(const std::filesystem::path& path, const std::vector<SpectrumSample>& samples);

// header: time_ps,re,im,abs
void write_waveform_csv(const std::filesystem::path& path, const std::vector<double>& times_ps,
                        const std::vector<std::complex<double>>& values);

// header: wavelength_nm,re,im,abs2
void write_optical_spectrum_csv(const std::filesystem::path& path, const std::vector<double>& wavelengths_nm,
                                const std::vector<std::complex<double>>& values);

// header: d_lambda_s_nm,d_lambda_i_nm,re,im,abs2 ; row-major (signal outer)
// with detunings converted at the respective axis carriers. When
// intensity_only is set, re carries |F|^2 and im is zero.
void write_grid_csv(const std::filesystem::path& path, const Grid2D& grid, bool intensity_only = false);

// header: nu_sum_radps,re,im,abs2
void write_adp_csv(const std::filesystem::path& path, const DetuningGrid1D& nu_sum,
                   const std::vector<std::complex<double>>& values);

// Re-ingests a grid CSV (amplitude or intensity). Axes are reconstructed
// from the row-major layout; values land in a complex matrix (re + i*im).
struct ImportedGrid
{
    std::vector<double> d_lambda_s_nm;
    std::vector<double> d_lambda_i_nm;
    Eigen::MatrixXcd values;
    Eigen::MatrixXd abs2;
};
ImportedGrid read_grid_csv(const std::filesystem::path& path);

// header: lambda_nm,k1_ps_per_um
struct DispersionSample
{
    double lambda_nm = 0.0;
    double k1_ps_per_um = 0.0;
};
std::vector<DispersionSample> read_dispersion_csv(const std::filesystem::path& path);

// Linear interpolation of k1 at a wavelength; throws std::invalid_argument
// outside the tabulated range.
double interpolate_k1(const std::vector<DispersionSample>& table, double lambda_nm);

// --- simulation configuration ----------------------------------------------
struct SimulationSettings
{
    SourceConfig source;
    std::string method = "quadrature";  // or "factorized"
    double peak_threshold = 0.10;
    bool flat_phase = false;
    int signal_points = 128;
    int idler_points = 128;
    double half_width_linewidths = 3.0;
};

// Loads a simulate/sweep configuration. Resonance entries may be inline
// objects or paths to resonance JSON files, resolved relative to the
// config file. All referenced files are read and validated before any
// computation starts.
SimulationSettings load_simulation_config(const std::filesystem::path& path);

// Applies "key=value" overrides onto a loaded configuration; unknown keys
// throw std::invalid_argument listing the valid ones.
void apply_override(SimulationSettings& settings, const std::string& key, const std::string& value);
std::vector<std::string> override_keys();

// Rebuilds the detuning grids after overrides touched sizes or widths.
void rebuild_grids(SimulationSettings& settings);

std::string format_double(double v);  // shortest round-trip decimal

}  // namespace ringjsa

#endif
