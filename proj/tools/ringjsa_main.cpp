// Command-line front end: fit, simulate, sweep, tdsi, adp, pump,
// phasematch, analyze. Exit codes: 0 success, 1 input error,
// 2 non-convergence, 3 physics-consistency error.

#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ringjsa/analysis.hpp"
#include "ringjsa/io.hpp"
#include "ringjsa/jsa.hpp"
#include "ringjsa/pump.hpp"
#include "ringjsa/specfit.hpp"
#include "ringjsa/units.hpp"

namespace fs = std::filesystem;
using namespace ringjsa;

namespace
{

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNonConverged = 2;
constexpr int kExitPhysics = 3;

struct GlobalOpts
{
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    int threads = 0;
    bool quiet = false;
};

void write_json_file(const fs::path& path, const nlohmann::json& j)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out)
    {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << j.dump(2) << '\n';
}

SimulationSettings load_settings(const std::string& config, const std::vector<std::string>& overrides,
                                 const GlobalOpts& g)
{
    SimulationSettings s = load_simulation_config(config);
    for (const auto& kv : overrides)
    {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
        {
            throw std::invalid_argument("override must look like key=value: " + kv);
        }
        apply_override(s, kv.substr(0, eq), kv.substr(eq + 1));
    }
    s.source.threads = g.threads;
    return s;
}

JsaGrid run_jsa(const SimulationSettings& s)
{
    return s.method == "factorized" ? compute_jsa_factorized(s.source) : compute_jsa_quadrature(s.source);
}

int cmd_fit(const std::string& spectrum_csv, const std::string& init_json, const GlobalOpts& g)
{
    std::vector<SpectrumSample> samples;
    std::optional<SplitResonance> init;
    try
    {
        samples = read_spectrum_csv(spectrum_csv);
        if (!init_json.empty())
        {
            std::ifstream in(init_json);
            if (!in)
            {
                throw ParseError("cannot open " + init_json);
            }
            nlohmann::json j;
            in >> j;
            init = resonance_from_json(j);
        }
    }
    catch (const std::exception& e)
    {
        std::cerr << "fit: " << e.what() << "\n";
        return kExitInput;
    }

    FitOptions opts;
    if (g.seed != 0)
    {
        opts.seed = g.seed;
    }
    FitResult result;
    try
    {
        result = fit_resonance(samples, init, opts);
    }
    catch (const std::exception& e)
    {
        std::cerr << "fit: " << e.what() << "\n";
        return kExitInput;
    }

    fs::create_directories(g.out_dir);
    write_json_file(fs::path(g.out_dir) / "fit.json", fit_result_to_json(result));
    if (!g.quiet)
    {
        std::printf("%s R2=%.6f\n", result.params.label.c_str(), result.r_squared);
    }
    return result.converged ? kExitOk : kExitNonConverged;
}

int cmd_simulate(const std::string& config, const std::vector<std::string>& overrides, const GlobalOpts& g)
{
    SimulationSettings s;
    try
    {
        s = load_settings(config, overrides, g);
        validate_source_config(s.source);
    }
    catch (const ParseError& e)
    {
        std::cerr << "simulate: " << e.what() << "\n";
        return kExitInput;
    }
    catch (const std::exception& e)
    {
        std::cerr << "simulate: " << e.what() << "\n";
        return kExitPhysics;
    }

    const EnergyMatch match = check_energy_matching(s.source);
    if (match.warn && !g.quiet)
    {
        std::cerr << "simulate: energy-matching detuning " << match.detuning << " rad/ps exceeds 3 linewidths\n";
    }

    // compute everything first; the output directory appears only on success
    const JsaGrid jsa = run_jsa(s);
    const Grid2D tdsi = compute_tdsi(s.source);
    const double sum_half = s.source.signal_grid.half_width() + s.source.idler_grid.half_width();
    const DetuningGrid1D nu_sum = make_grid(s.source.signal_grid.center_radps + s.source.idler_grid.center_radps,
                                            sum_half, 4 * std::max(s.signal_points, s.idler_points));
    const auto adp = compute_adp(s.source, nu_sum);
    const AnalysisReport report = analyze_jsa(jsa, s.peak_threshold, s.flat_phase);

    fs::create_directories(g.out_dir);
    const fs::path dir(g.out_dir);
    write_grid_csv(dir / "jsa.csv", jsa.grid, false);
    write_grid_csv(dir / "jsi.csv", jsa.grid, true);
    write_grid_csv(dir / "tdsi.csv", tdsi, false);
    write_adp_csv(dir / "adp.csv", nu_sum, adp);
    write_json_file(dir / "report.json", report_to_json(report));
    if (!g.quiet)
    {
        std::printf("purity=%.4f g2=%.4f peaks=%zu\n", report.schmidt.purity, report.g2_unheralded_zero,
                    report.peaks.size());
    }
    return kExitOk;
}

int cmd_sweep(const std::string& config, const std::string& parameter, const std::vector<double>& values,
              const std::vector<std::string>& overrides, const std::string& out_csv, const GlobalOpts& g)
{
    std::vector<std::string> rows;
    try
    {
        for (const double v : values)
        {
            SimulationSettings s = load_settings(config, overrides, g);
            apply_override(s, parameter, format_double(v));
            validate_source_config(s.source);
            const JsaGrid jsa = run_jsa(s);
            const AnalysisReport report = analyze_jsa(jsa, s.peak_threshold, s.flat_phase);
            rows.push_back(format_double(v) + ',' + format_double(report.schmidt.purity) + ',' +
                           format_double(report.g2_unheralded_zero) + ',' + std::to_string(report.peaks.size()));
        }
    }
    catch (const std::invalid_argument& e)
    {
        std::cerr << "sweep: " << e.what() << "\n";
        return kExitInput;
    }
    catch (const ParseError& e)
    {
        std::cerr << "sweep: " << e.what() << "\n";
        return kExitInput;
    }

    fs::create_directories(fs::path(out_csv).parent_path().empty() ? "." : fs::path(out_csv).parent_path().string());
    std::ofstream out(out_csv, std::ios::trunc);
    if (!out)
    {
        std::cerr << "sweep: cannot write " << out_csv << "\n";
        return kExitInput;
    }
    out << "value,purity,g2,n_peaks\n";
    for (const auto& r : rows)
    {
        out << r << '\n';
        if (!g.quiet)
        {
            std::cout << r << '\n';
        }
    }
    return kExitOk;
}

int cmd_tdsi(const std::string& config, const std::vector<std::string>& overrides, const GlobalOpts& g)
{
    SimulationSettings s;
    try
    {
        s = load_settings(config, overrides, g);
        validate_source_config(s.source);
    }
    catch (const std::exception& e)
    {
        std::cerr << "tdsi: " << e.what() << "\n";
        return kExitInput;
    }
    const Grid2D tdsi = compute_tdsi(s.source);
    fs::create_directories(g.out_dir);
    write_grid_csv(fs::path(g.out_dir) / "tdsi.csv", tdsi, false);
    const auto peaks = find_peaks(tdsi.values.cwiseAbs2().eval(), s.peak_threshold);
    if (!g.quiet)
    {
        std::printf("tdsi peaks=%zu at threshold %.2f\n", peaks.size(), s.peak_threshold);
    }
    return kExitOk;
}

int cmd_adp(const std::string& config, const std::vector<std::string>& overrides, const GlobalOpts& g)
{
    SimulationSettings s;
    try
    {
        s = load_settings(config, overrides, g);
        validate_source_config(s.source);
    }
    catch (const std::exception& e)
    {
        std::cerr << "adp: " << e.what() << "\n";
        return kExitInput;
    }
    const double sum_half = s.source.signal_grid.half_width() + s.source.idler_grid.half_width();
    const DetuningGrid1D nu_sum = make_grid(s.source.signal_grid.center_radps + s.source.idler_grid.center_radps,
                                            sum_half, 4 * std::max(s.signal_points, s.idler_points));
    const auto adp = compute_adp(s.source, nu_sum);
    fs::create_directories(g.out_dir);
    write_adp_csv(fs::path(g.out_dir) / "adp.csv", nu_sum, adp);
    return kExitOk;
}

int cmd_pump(const std::string& config, const std::vector<std::string>& overrides, double time_span_ps,
             int time_points, const GlobalOpts& g)
{
    SimulationSettings s;
    try
    {
        s = load_settings(config, overrides, g);
    }
    catch (const std::exception& e)
    {
        std::cerr << "pump: " << e.what() << "\n";
        return kExitInput;
    }
    const PumpSpec& pump = s.source.pump;

    // spectrum over +-4 power FWHM about the carrier
    const int n_spec = 1001;
    const double half = 4.0 * pump.fwhm_radps();
    std::vector<double> lambdas(n_spec);
    std::vector<std::complex<double>> spec(n_spec);
    for (int i = 0; i < n_spec; ++i)
    {
        const double w = pump.center - half + 2.0 * half * i / (n_spec - 1);
        lambdas[i] = omega_to_wavelength(w);
        spec[i] = pump_envelope(pump, w);
    }

    std::vector<double> times(static_cast<std::size_t>(time_points));
    const double dt = time_span_ps / (time_points - 1);
    for (int i = 0; i < time_points; ++i)
    {
        times[i] = -0.5 * time_span_ps + i * dt;
    }
    const auto waveform = pump_waveform(pump, times);

    fs::create_directories(g.out_dir);
    write_optical_spectrum_csv(fs::path(g.out_dir) / "pump_spectrum.csv", lambdas, spec);
    write_waveform_csv(fs::path(g.out_dir) / "pump_waveform.csv", times, waveform);
    return kExitOk;
}

int cmd_phasematch(const std::string& config, const std::vector<std::string>& overrides, const GlobalOpts& g)
{
    SimulationSettings s;
    try
    {
        s = load_settings(config, overrides, g);
    }
    catch (const std::exception& e)
    {
        std::cerr << "phasematch: " << e.what() << "\n";
        return kExitInput;
    }
    Grid2D grid;
    grid.signal_axis = s.source.signal_grid;
    grid.idler_axis = s.source.idler_grid;
    grid.values.resize(grid.signal_axis.count(), grid.idler_axis.count());
    for (int i = 0; i < grid.signal_axis.count(); ++i)
    {
        for (int j = 0; j < grid.idler_axis.count(); ++j)
        {
            grid.values(i, j) = phi_pm(s.source.pm, grid.signal_axis.points[i], grid.idler_axis.points[j]);
        }
    }
    fs::create_directories(g.out_dir);
    write_grid_csv(fs::path(g.out_dir) / "phasematch.csv", grid, false);
    if (!g.quiet)
    {
        std::printf("theta_si=%.3f deg\n", orientation_angle_deg(s.source.pm));
    }
    return kExitOk;
}

int cmd_analyze(const std::string& grid_csv, bool complex_amplitude, double peak_threshold, const GlobalOpts& g)
{
    ImportedGrid imported;
    try
    {
        imported = read_grid_csv(grid_csv);
    }
    catch (const std::exception& e)
    {
        std::cerr << "analyze: " << e.what() << "\n";
        return kExitInput;
    }

    // Schmidt purity is scale invariant, so wavelength-step weighting
    // stands in for the angular-frequency steps of the original grid.
    Grid2D grid;
    grid.signal_axis.center_radps = 0.0;
    grid.signal_axis.points = imported.d_lambda_s_nm;
    grid.idler_axis.center_radps = 0.0;
    grid.idler_axis.points = imported.d_lambda_i_nm;
    grid.values = complex_amplitude ? imported.values : imported.abs2.cwiseSqrt().cast<std::complex<double>>();

    SchmidtResult schmidt;
    try
    {
        // imported measured grids default to the flat-phase convention
        schmidt = schmidt_decompose(grid, !complex_amplitude);
    }
    catch (const std::exception& e)
    {
        std::cerr << "analyze: " << e.what() << "\n";
        return kExitInput;
    }

    AnalysisReport report;
    report.schmidt = schmidt;
    report.g2_unheralded_zero = purity_to_g2(schmidt.purity);
    const Eigen::MatrixXd jsi = complex_amplitude ? grid.values.cwiseAbs2().eval() : imported.abs2;
    const double gmax = jsi.maxCoeff();
    for (const GridPeak& p : find_peaks(jsi, peak_threshold))
    {
        report.peaks.push_back({imported.d_lambda_s_nm[static_cast<std::size_t>(p.i)],
                                imported.d_lambda_i_nm[static_cast<std::size_t>(p.j)],
                                gmax > 0.0 ? p.value / gmax : 0.0});
    }

    fs::create_directories(g.out_dir);
    write_json_file(fs::path(g.out_dir) / "report.json", report_to_json(report));
    if (!g.quiet)
    {
        std::printf("purity=%.4f g2=%.4f peaks=%zu\n", schmidt.purity, report.g2_unheralded_zero,
                    report.peaks.size());
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Split-resonance photon-pair source toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalOpts g;
    app.add_option("--out", g.out_dir, "Output directory")->capture_default_str();
    app.add_option("--seed", g.seed, "Random seed (0 = module defaults)");
    app.add_option("--threads", g.threads, "Worker threads (0 = auto)");
    app.add_flag("--quiet", g.quiet, "Suppress progress output");

    std::string spectrum_csv, init_json, config, parameter, out_csv = "sweep.csv", grid_csv;
    std::vector<std::string> overrides;
    std::vector<double> values;
    bool complex_amplitude = false;
    double peak_threshold = 0.10;
    double time_span_ps = 400.0;
    int time_points = 512;

    CLI::App* fit = app.add_subcommand("fit", "Fit a split resonance to a transmission spectrum");
    fit->add_option("spectrum", spectrum_csv, "Spectrum CSV (wavelength_nm,transmission)")->required();
    fit->add_option("--init", init_json, "Initial resonance JSON (default: automatic)");

    const auto add_config = [&](CLI::App* cmd) {
        cmd->add_option("config", config, "Simulation config JSON")->required();
        cmd->add_option("--set", overrides, "Override key=value (repeatable)");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "Compute the JSA and analysis report");
    add_config(simulate);
    CLI::App* sweep = app.add_subcommand("sweep", "Sweep one override key across values");
    add_config(sweep);
    sweep->add_option("--param", parameter, "Override key to sweep")->required();
    sweep->add_option("--values", values, "Values, comma separated")->required()->delimiter(',');
    sweep->add_option("--out-csv", out_csv, "Output CSV")->capture_default_str();
    CLI::App* tdsi = app.add_subcommand("tdsi", "Signal-idler filter map");
    add_config(tdsi);
    CLI::App* adp = app.add_subcommand("adp", "Antidiagonal pump function");
    add_config(adp);
    CLI::App* pump = app.add_subcommand("pump", "Pump spectrum and waveform");
    add_config(pump);
    pump->add_option("--time-span", time_span_ps, "Waveform span in ps")->capture_default_str();
    pump->add_option("--time-points", time_points, "Waveform samples")->capture_default_str();
    CLI::App* phasematch = app.add_subcommand("phasematch", "Phase-matching map and orientation angle");
    add_config(phasematch);
    CLI::App* analyze = app.add_subcommand("analyze", "Schmidt analysis of a grid CSV");
    analyze->add_option("grid", grid_csv, "JSA/JSI grid CSV")->required();
    analyze->add_flag("--complex", complex_amplitude, "Use the complex amplitude columns (default: flat phase)");
    analyze->add_option("--peak-threshold", peak_threshold, "Relative peak threshold")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (fit->parsed())
        {
            return cmd_fit(spectrum_csv, init_json, g);
        }
        if (simulate->parsed())
        {
            return cmd_simulate(config, overrides, g);
        }
        if (sweep->parsed())
        {
            return cmd_sweep(config, parameter, values, overrides, out_csv, g);
        }
        if (tdsi->parsed())
        {
            return cmd_tdsi(config, overrides, g);
        }
        if (adp->parsed())
        {
            return cmd_adp(config, overrides, g);
        }
        if (pump->parsed())
        {
            return cmd_pump(config, overrides, time_span_ps, time_points, g);
        }
        if (phasematch->parsed())
        {
            return cmd_phasematch(config, overrides, g);
        }
        if (analyze->parsed())
        {
            return cmd_analyze(grid_csv, complex_amplitude, peak_threshold, g);
        }
    }
    catch (const ParseError& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}
