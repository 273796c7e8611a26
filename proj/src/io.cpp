#include "ringjsa/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ringjsa
{

namespace
{

std::ifstream open_or_throw(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw ParseError("cannot open " + path.string());
    }
    return in;
}

std::ofstream create_or_throw(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out)
    {
        throw std::runtime_error("cannot write " + path.string());
    }
    return out;
}

std::vector<double> split_numeric(const std::string& line, const std::filesystem::path& path, int line_no,
                                  std::size_t expected)
{
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= line.size())
    {
        std::size_t comma = line.find(',', pos);
        if (comma == std::string::npos)
        {
            comma = line.size();
        }
        const std::string tok = line.substr(pos, comma - pos);
        double v = 0.0;
        const auto* begin = tok.data();
        const auto* end = tok.data() + tok.size();
        const auto res = std::from_chars(begin, end, v);
        if (res.ec != std::errc{} || res.ptr != end)
        {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad numeric field '" + tok + "'");
        }
        out.push_back(v);
        pos = comma + 1;
        if (comma == line.size())
        {
            break;
        }
    }
    if (out.size() != expected)
    {
        throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(expected) +
                         " fields, got " + std::to_string(out.size()));
    }
    return out;
}

std::string strip_cr(std::string s)
{
    if (!s.empty() && s.back() == '\r')
    {
        s.pop_back();
    }
    return s;
}

double require_number(const nlohmann::json& j, const std::string& key)
{
    if (!j.contains(key) || !j[key].is_number())
    {
        throw ParseError("missing numeric key '" + key + "'");
    }
    return j[key].get<double>();
}

}  // namespace

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

nlohmann::json resonance_to_json(const SplitResonance& res)
{
    return nlohmann::json{
        {"label", res.label},
        {"C", res.c_norm},
        {"inv_tau_THz", res.decay},
        {"gamma", res.gamma},
        {"mu0_THz", res.mu0},
        {"kappa_sqrtTHz", res.kappa},
        {"phi1_rad", res.phi1},
        {"phi2_rad", res.phi2},
        {"omega0_THz", res.omega0},
    };
}

SplitResonance resonance_from_json(const nlohmann::json& j)
{
    SplitResonance res;
    res.label = j.value("label", "");
    res.c_norm = require_number(j, "C");
    res.decay = require_number(j, "inv_tau_THz");
    res.gamma = require_number(j, "gamma");
    res.mu0 = require_number(j, "mu0_THz");
    res.kappa = require_number(j, "kappa_sqrtTHz");
    res.phi1 = require_number(j, "phi1_rad");
    res.phi2 = require_number(j, "phi2_rad");
    res.omega0 = require_number(j, "omega0_THz");
    res.normalize_and_validate();
    return res;
}

nlohmann::json fit_result_to_json(const FitResult& result)
{
    nlohmann::json j = resonance_to_json(result.params);
    j["r_squared"] = result.r_squared;
    j["residual_rms"] = result.residual_rms;
    return j;
}

nlohmann::json report_to_json(const AnalysisReport& report)
{
    nlohmann::json weights = nlohmann::json::array();
    const std::size_t n = std::min<std::size_t>(report.schmidt.weights.size(), 16);
    for (std::size_t i = 0; i < n; ++i)
    {
        weights.push_back(report.schmidt.weights[i]);
    }
    nlohmann::json peaks = nlohmann::json::array();
    for (const auto& p : report.peaks)
    {
        peaks.push_back({{"d_lambda_s_nm", p.d_lambda_s_nm}, {"d_lambda_i_nm", p.d_lambda_i_nm}, {"height", p.height}});
    }
    return nlohmann::json{
        {"weights", weights},
        {"purity", report.schmidt.purity},
        {"g2", report.g2_unheralded_zero},
        {"effective_modes", report.schmidt.effective_modes},
        {"peaks", peaks},
    };
}

std::vector<SpectrumSample> read_spectrum_csv(const std::filesystem::path& path)
{
    std::ifstream in = open_or_throw(path);
    std::string line;
    int line_no = 0;
    std::vector<SpectrumSample> samples;
    while (std::getline(in, line))
    {
        ++line_no;
        line = strip_cr(line);
        if (line.empty())
        {
            continue;
        }
        if (line_no == 1)
        {
            if (line != "wavelength_nm,transmission")
            {
                throw ParseError(path.string() + ":1: expected header 'wavelength_nm,transmission'");
            }
            continue;
        }
        const auto f = split_numeric(line, path, line_no, 2);
        if (f[1] < 0.0)
        {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": negative transmission");
        }
        samples.push_back({f[0], f[1]});
    }
    if (samples.empty())
    {
        throw ParseError(path.string() + ": no samples");
    }
    return samples;
}

void write_spectrum_csv(const std::filesystem::path& path, const std::vector<SpectrumSample>& samples)
{
    std::ofstream out = create_or_throw(path);
    out << "wavelength_nm,transmission\n";
    for (const auto& s : samples)
    {
        out << format_double(s.wavelength_nm) << ',' << format_double(s.transmission) << '\n';
    }
}

void write_waveform_csv(const std::filesystem::path& path, const std::vector<double>& times_ps,
                        const std::vector<std::complex<double>>& values)
{
    std::ofstream out = create_or_throw(path);
    out << "time_ps,re,im,abs\n";
    for (std::size_t i = 0; i < times_ps.size(); ++i)
    {
        out << format_double(times_ps[i]) << ',' << format_double(values[i].real()) << ','
            << format_double(values[i].imag()) << ',' << format_double(std::abs(values[i])) << '\n';
    }
}

void write_optical_spectrum_csv(const std::filesystem::path& path, const std::vector<double>& wavelengths_nm,
                                const std::vector<std::complex<double>>& values)
{
    std::ofstream out = create_or_throw(path);
    out << "wavelength_nm,re,im,abs2\n";
    for (std::size_t i = 0; i < wavelengths_nm.size(); ++i)
    {
        out << format_double(wavelengths_nm[i]) << ',' << format_double(values[i].real()) << ','
            << format_double(values[i].imag()) << ',' << format_double(std::norm(values[i])) << '\n';
    }
}

void write_grid_csv(const std::filesystem::path& path, const Grid2D& grid, bool intensity_only)
{
    std::ofstream out = create_or_throw(path);
    out << "d_lambda_s_nm,d_lambda_i_nm,re,im,abs2\n";
    for (int i = 0; i < grid.signal_axis.count(); ++i)
    {
        const double dls = detuning_to_dlambda(grid.signal_axis.center_radps, grid.signal_axis.points[i]);
        for (int j = 0; j < grid.idler_axis.count(); ++j)
        {
            const double dli = detuning_to_dlambda(grid.idler_axis.center_radps, grid.idler_axis.points[j]);
            const std::complex<double> v = grid.values(i, j);
            const double abs2 = std::norm(v);
            out << format_double(dls) << ',' << format_double(dli) << ',';
            if (intensity_only)
            {
                out << format_double(abs2) << ",0," << format_double(abs2) << '\n';
            }
            else
            {
                out << format_double(v.real()) << ',' << format_double(v.imag()) << ',' << format_double(abs2) << '\n';
            }
        }
    }
}

void write_adp_csv(const std::filesystem::path& path, const DetuningGrid1D& nu_sum,
                   const std::vector<std::complex<double>>& values)
{
    std::ofstream out = create_or_throw(path);
    out << "nu_sum_radps,re,im,abs2\n";
    for (int i = 0; i < nu_sum.count(); ++i)
    {
        out << format_double(nu_sum.points[i]) << ',' << format_double(values[i].real()) << ','
            << format_double(values[i].imag()) << ',' << format_double(std::norm(values[i])) << '\n';
    }
}

ImportedGrid read_grid_csv(const std::filesystem::path& path)
{
    std::ifstream in = open_or_throw(path);
    std::string line;
    int line_no = 0;
    std::vector<std::array<double, 5>> rows;
    while (std::getline(in, line))
    {
        ++line_no;
        line = strip_cr(line);
        if (line.empty())
        {
            continue;
        }
        if (line_no == 1)
        {
            if (line != "d_lambda_s_nm,d_lambda_i_nm,re,im,abs2")
            {
                throw ParseError(path.string() + ":1: expected header 'd_lambda_s_nm,d_lambda_i_nm,re,im,abs2'");
            }
            continue;
        }
        const auto f = split_numeric(line, path, line_no, 5);
        rows.push_back({f[0], f[1], f[2], f[3], f[4]});
    }
    if (rows.empty())
    {
        throw ParseError(path.string() + ": no grid rows");
    }

    // row-major: the idler detuning cycles fastest
    ImportedGrid grid;
    std::size_t ni = 1;
    while (ni < rows.size() && rows[ni][0] == rows[0][0])
    {
        ++ni;
    }
    const std::size_t ns = rows.size() / ni;
    if (ns * ni != rows.size() || ns < 1)
    {
        throw ParseError(path.string() + ": ragged grid (" + std::to_string(rows.size()) + " rows, " +
                         std::to_string(ni) + " idler columns)");
    }
    grid.d_lambda_i_nm.resize(ni);
    for (std::size_t j = 0; j < ni; ++j)
    {
        grid.d_lambda_i_nm[j] = rows[j][1];
    }
    grid.d_lambda_s_nm.resize(ns);
    grid.values.resize(static_cast<Eigen::Index>(ns), static_cast<Eigen::Index>(ni));
    grid.abs2.resize(static_cast<Eigen::Index>(ns), static_cast<Eigen::Index>(ni));
    for (std::size_t i = 0; i < ns; ++i)
    {
        grid.d_lambda_s_nm[i] = rows[i * ni][0];
        for (std::size_t j = 0; j < ni; ++j)
        {
            const auto& r = rows[i * ni + j];
            grid.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = {r[2], r[3]};
            grid.abs2(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = r[4];
        }
    }
    return grid;
}

std::vector<DispersionSample> read_dispersion_csv(const std::filesystem::path& path)
{
    std::ifstream in = open_or_throw(path);
    std::string line;
    int line_no = 0;
    std::vector<DispersionSample> table;
    while (std::getline(in, line))
    {
        ++line_no;
        line = strip_cr(line);
        if (line.empty())
        {
            continue;
        }
        if (line_no == 1)
        {
            if (line != "lambda_nm,k1_ps_per_um")
            {
                throw ParseError(path.string() + ":1: expected header 'lambda_nm,k1_ps_per_um'");
            }
            continue;
        }
        const auto f = split_numeric(line, path, line_no, 2);
        table.push_back({f[0], f[1]});
    }
    if (table.size() < 2)
    {
        throw ParseError(path.string() + ": need at least two dispersion samples");
    }
    return table;
}

double interpolate_k1(const std::vector<DispersionSample>& table, double lambda_nm)
{
    if (lambda_nm < table.front().lambda_nm || lambda_nm > table.back().lambda_nm)
    {
        throw std::invalid_argument("interpolate_k1: wavelength outside tabulated range");
    }
    for (std::size_t i = 1; i < table.size(); ++i)
    {
        if (lambda_nm <= table[i].lambda_nm)
        {
            const double t = (lambda_nm - table[i - 1].lambda_nm) / (table[i].lambda_nm - table[i - 1].lambda_nm);
            return (1.0 - t) * table[i - 1].k1_ps_per_um + t * table[i].k1_ps_per_um;
        }
    }
    return table.back().k1_ps_per_um;
}

namespace
{

SplitResonance load_resonance_entry(const nlohmann::json& entry, const std::filesystem::path& base_dir)
{
    if (entry.is_string())
    {
        const std::filesystem::path p = base_dir / entry.get<std::string>();
        std::ifstream in = open_or_throw(p);
        nlohmann::json j;
        try
        {
            in >> j;
        }
        catch (const nlohmann::json::exception& e)
        {
            throw ParseError(p.string() + ": " + e.what());
        }
        return resonance_from_json(j);
    }
    if (entry.is_object())
    {
        return resonance_from_json(entry);
    }
    throw ParseError("resonance entry must be an object or a file path");
}

PumpTransform load_transform(const nlohmann::json& j, double pump_center)
{
    if (j.is_null())
    {
        return {};
    }
    const std::string type = j.value("type", "");
    if (type == "mrr")
    {
        DifferentiatorSpec d;
        d.tau_c = require_number(j, "tau_c");
        d.alpha_rt = require_number(j, "alpha_rt");
        d.t_s_ps = require_number(j, "t_s_ps");
        d.omega_align = j.contains("align_nm") ? wavelength_to_omega(require_number(j, "align_nm")) : pump_center;
        d.validate();
        return d;
    }
    if (type == "ideal")
    {
        IdealDiff n;
        n.order = require_number(j, "order");
        n.omega0 = j.contains("center_nm") ? wavelength_to_omega(require_number(j, "center_nm")) : pump_center;
        n.validate();
        return n;
    }
    throw ParseError("differentiator type must be 'mrr' or 'ideal'");
}

}  // namespace

SimulationSettings load_simulation_config(const std::filesystem::path& path)
{
    std::ifstream in = open_or_throw(path);
    nlohmann::json j;
    try
    {
        in >> j;
    }
    catch (const nlohmann::json::exception& e)
    {
        throw ParseError(path.string() + ": " + e.what());
    }
    const std::filesystem::path base = path.parent_path();

    SimulationSettings s;
    try
    {
        s.source.pump_res = load_resonance_entry(j.at("pump_resonance"), base);
        s.source.signal_res = load_resonance_entry(j.at("signal_resonance"), base);
        s.source.idler_res = load_resonance_entry(j.at("idler_resonance"), base);

        const nlohmann::json& jp = j.at("pump");
        s.source.pump.center = wavelength_to_omega(require_number(jp, "center_nm"));
        s.source.pump.fwhm_pm = require_number(jp, "fwhm_pm");
        if (jp.value("shape", "gaussian") != "gaussian")
        {
            throw ParseError("pump shape must be 'gaussian'");
        }
        s.source.pump.transform = load_transform(jp.value("differentiator", nlohmann::json()), s.source.pump.center);

        if (j.contains("phase_match"))
        {
            const nlohmann::json& jm = j["phase_match"];
            s.source.pm.length_um = jm.value("length_um", s.source.pm.length_um);
            s.source.pm.tau_s = jm.value("tau_s_ps_per_um", 0.0);
            s.source.pm.tau_i = jm.value("tau_i_ps_per_um", 0.0);
            s.source.pm.gamma_nl = jm.value("gamma_nl_per_w_um", 0.0);
            s.source.pm.peak_power_w = jm.value("peak_power_w", 0.0);
            s.source.pm.anchor_power_w = jm.value("anchor_power_w", 0.0);
        }

        if (j.contains("grid"))
        {
            const nlohmann::json& jg = j["grid"];
            s.signal_points = jg.value("signal_points", s.signal_points);
            s.idler_points = jg.value("idler_points", s.idler_points);
            s.half_width_linewidths = jg.value("half_width_linewidths", s.half_width_linewidths);
        }
        s.source.pump_quadrature_points = j.value("pump_quadrature_points", s.source.pump_quadrature_points);
        s.method = j.value("method", s.method);
        if (s.method != "quadrature" && s.method != "factorized")
        {
            throw ParseError("method must be 'quadrature' or 'factorized'");
        }
        if (j.contains("analysis"))
        {
            s.peak_threshold = j["analysis"].value("peak_threshold", s.peak_threshold);
            s.flat_phase = j["analysis"].value("flat_phase", s.flat_phase);
        }
    }
    catch (const nlohmann::json::exception& e)
    {
        throw ParseError(path.string() + ": " + e.what());
    }

    rebuild_grids(s);
    return s;
}

void rebuild_grids(SimulationSettings& s)
{
    s.source.pm.omega_s0 = s.source.signal_res.omega0;
    s.source.pm.omega_i0 = s.source.idler_res.omega0;
    s.source.signal_grid =
        make_grid(s.source.signal_res.omega0, s.half_width_linewidths * s.source.signal_res.decay, s.signal_points);
    s.source.idler_grid =
        make_grid(s.source.idler_res.omega0, s.half_width_linewidths * s.source.idler_res.decay, s.idler_points);
}

std::vector<std::string> override_keys()
{
    return {
        "pump.fwhm_pm",
        "pump.center_nm",
        "pump.differentiator.none",
        "pump_resonance.unsplit",
        "pump_resonance.mu0_THz",
        "pump_resonance.gamma",
        "pump_quadrature_points",
        "grid.signal_points",
        "grid.idler_points",
        "grid.half_width_linewidths",
        "pm.length_um",
        "pm.tau_s_ps_per_um",
        "pm.tau_i_ps_per_um",
        "pm.peak_power_w",
        "analysis.peak_threshold",
        "analysis.flat_phase",
        "method",
    };
}

void apply_override(SimulationSettings& s, const std::string& key, const std::string& value)
{
    const auto as_double = [&]() {
        try
        {
            return std::stod(value);
        }
        catch (const std::exception&)
        {
            throw std::invalid_argument("override " + key + ": bad numeric value '" + value + "'");
        }
    };
    const auto as_bool = [&]() { return value == "1" || value == "true" || value == "yes"; };

    if (key == "pump.fwhm_pm")
    {
        s.source.pump.fwhm_pm = as_double();
    }
    else if (key == "pump.center_nm")
    {
        s.source.pump.center = wavelength_to_omega(as_double());
    }
    else if (key == "pump.differentiator.none")
    {
        if (as_bool())
        {
            s.source.pump.transform = {};
        }
    }
    else if (key == "pump_resonance.unsplit")
    {
        if (as_bool())
        {
            s.source.pump_res = s.source.pump_res.unsplit();
        }
    }
    else if (key == "pump_resonance.mu0_THz")
    {
        s.source.pump_res.mu0 = as_double();
    }
    else if (key == "pump_resonance.gamma")
    {
        s.source.pump_res.gamma = as_double();
    }
    else if (key == "pump_quadrature_points")
    {
        s.source.pump_quadrature_points = static_cast<int>(as_double());
    }
    else if (key == "grid.signal_points")
    {
        s.signal_points = static_cast<int>(as_double());
        rebuild_grids(s);
    }
    else if (key == "grid.idler_points")
    {
        s.idler_points = static_cast<int>(as_double());
        rebuild_grids(s);
    }
    else if (key == "grid.half_width_linewidths")
    {
        s.half_width_linewidths = as_double();
        rebuild_grids(s);
    }
    else if (key == "pm.length_um")
    {
        s.source.pm.length_um = as_double();
    }
    else if (key == "pm.tau_s_ps_per_um")
    {
        s.source.pm.tau_s = as_double();
    }
    else if (key == "pm.tau_i_ps_per_um")
    {
        s.source.pm.tau_i = as_double();
    }
    else if (key == "pm.peak_power_w")
    {
        s.source.pm.peak_power_w = as_double();
    }
    else if (key == "analysis.peak_threshold")
    {
        s.peak_threshold = as_double();
    }
    else if (key == "analysis.flat_phase")
    {
        s.flat_phase = as_bool();
    }
    else if (key == "method")
    {
        if (value != "quadrature" && value != "factorized")
        {
            throw std::invalid_argument("override method: must be 'quadrature' or 'factorized'");
        }
        s.method = value;
    }
    else
    {
        std::string msg = "unknown override key '" + key + "'; valid keys:";
        for (const auto& k : override_keys())
        {
            msg += "\n  " + k;
        }
        throw std::invalid_argument(msg);
    }
}

}  // namespace ringjsa
