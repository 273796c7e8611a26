#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "ringjsa/io.hpp"

using namespace ringjsa;
namespace fs = std::filesystem;

#ifndef RINGJSA_DATA_DIR
#define RINGJSA_DATA_DIR "data"
#endif

namespace
{

struct TempDir
{
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path() / ("ringjsa_io_" + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

SplitResonance table_r3()
{
    return {"R3", 0.976, 0.0190, 0.572, 0.0245, 0.167, 1.461, 4.842, 1213.23};
}

}  // namespace

TEST_CASE("resonance json round trip preserves every field")
{
    const SplitResonance r3 = table_r3();
    const nlohmann::json j = resonance_to_json(r3);
    for (const char* key :
         {"label", "C", "inv_tau_THz", "gamma", "mu0_THz", "kappa_sqrtTHz", "phi1_rad", "phi2_rad", "omega0_THz"})
    {
        CHECK(j.contains(key));
    }
    CHECK(j.size() == 9);
    const SplitResonance back = resonance_from_json(j);
    CHECK(back.label == r3.label);
    CHECK(back.c_norm == r3.c_norm);
    CHECK(back.decay == r3.decay);
    CHECK(back.gamma == r3.gamma);
    CHECK(back.mu0 == r3.mu0);
    CHECK(back.kappa == r3.kappa);
    CHECK(back.phi1 == r3.phi1);
    CHECK(back.phi2 == r3.phi2);
    CHECK(back.omega0 == r3.omega0);
}

TEST_CASE("resonance json validates invariants on load")
{
    nlohmann::json j = resonance_to_json(table_r3());
    j["inv_tau_THz"] = -1.0;
    CHECK_THROWS_AS(resonance_from_json(j), std::invalid_argument);
    j = resonance_to_json(table_r3());
    j.erase("kappa_sqrtTHz");
    CHECK_THROWS_AS(resonance_from_json(j), ParseError);
}

TEST_CASE("fit result json is the resonance schema plus the two fit metrics")
{
    FitResult r;
    r.params = table_r3();
    r.r_squared = 0.9991;
    r.residual_rms = 3.2e-4;
    const nlohmann::json j = fit_result_to_json(r);
    CHECK(j.size() == 11);
    CHECK(j["r_squared"] == 0.9991);
    CHECK(j["residual_rms"] == 3.2e-4);
    CHECK(j["omega0_THz"] == 1213.23);
}

TEST_CASE("spectrum csv round trip and line-numbered errors")
{
    TempDir tmp;
    const fs::path p = tmp.path / "spec.csv";
    std::vector<SpectrumSample> samples;
    for (int i = 0; i < 30; ++i)
    {
        samples.push_back({1552.0 + 0.001 * i, 0.5 + 0.01 * i});
    }
    write_spectrum_csv(p, samples);
    const auto back = read_spectrum_csv(p);
    REQUIRE(back.size() == samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
    {
        CHECK(back[i].wavelength_nm == samples[i].wavelength_nm);
        CHECK(back[i].transmission == samples[i].transmission);
    }

    std::ofstream bad(tmp.path / "bad.csv");
    bad << "wavelength_nm,transmission\n1552.0,0.5\n1552.1,oops\n";
    bad.close();
    try
    {
        read_spectrum_csv(tmp.path / "bad.csv");
        FAIL("expected ParseError");
    }
    catch (const ParseError& e)
    {
        CHECK(std::string(e.what()).find(":3:") != std::string::npos);
    }
}

TEST_CASE("grid csv round trips through the reader")
{
    TempDir tmp;
    Grid2D g;
    g.signal_axis = make_grid(wavelength_to_omega(1546.70), 0.05, 5);
    g.idler_axis = make_grid(wavelength_to_omega(1558.52), 0.06, 7);
    g.values.resize(5, 7);
    for (int i = 0; i < 5; ++i)
    {
        for (int j = 0; j < 7; ++j)
        {
            g.values(i, j) = std::complex<double>(0.1 * i - 0.2, 0.05 * j);
        }
    }
    const fs::path p = tmp.path / "grid.csv";
    write_grid_csv(p, g, false);
    const ImportedGrid back = read_grid_csv(p);
    REQUIRE(back.values.rows() == 5);
    REQUIRE(back.values.cols() == 7);
    for (int i = 0; i < 5; ++i)
    {
        for (int j = 0; j < 7; ++j)
        {
            CHECK(std::abs(back.values(i, j) - g.values(i, j)) < 1e-15);
            CHECK(back.abs2(i, j) == doctest::Approx(std::norm(g.values(i, j))).epsilon(1e-15));
        }
    }
    // detunings reflect the exact wavelength conversion at each carrier
    CHECK(back.d_lambda_s_nm[0] ==
          doctest::Approx(detuning_to_dlambda(g.signal_axis.center_radps, -0.05)).epsilon(1e-12));
}

TEST_CASE("dispersion table reads and interpolates")
{
    const auto table = read_dispersion_csv(fs::path(RINGJSA_DATA_DIR) / "dispersion_sample.csv");
    CHECK(table.size() > 10);
    const double mid = interpolate_k1(table, 1550.125);
    CHECK(mid > 0.013);
    CHECK(mid < 0.015);
    CHECK_THROWS_AS(interpolate_k1(table, 1500.0), std::invalid_argument);
}

TEST_CASE("simulation config loads file references and applies overrides")
{
    SimulationSettings s = load_simulation_config(fs::path(RINGJSA_DATA_DIR) / "separable.json");
    CHECK(s.source.pump_res.label == "R3");
    CHECK(s.source.signal_res.label == "R2");
    CHECK(s.source.idler_res.label == "R4");
    CHECK(s.source.pump.fwhm_pm == 226.0);
    CHECK(s.method == "quadrature");
    CHECK(s.source.signal_grid.count() == 128);

    apply_override(s, "pump.fwhm_pm", "148");
    CHECK(s.source.pump.fwhm_pm == 148.0);
    apply_override(s, "grid.signal_points", "64");
    CHECK(s.source.signal_grid.count() == 64);
    apply_override(s, "pump_resonance.unsplit", "true");
    CHECK(s.source.pump_res.mu0 == 0.0);
    CHECK(s.source.pump_res.gamma == 0.0);
    CHECK_THROWS_AS(apply_override(s, "nonsense.key", "1"), std::invalid_argument);
}

TEST_CASE("differentiator config entries parse into the transform")
{
    SimulationSettings s = load_simulation_config(fs::path(RINGJSA_DATA_DIR) / "entangled_diff.json");
    const auto* d = std::get_if<DifferentiatorSpec>(&s.source.pump.transform);
    REQUIRE(d != nullptr);
    CHECK(d->tau_c == 0.990);
    CHECK(d->alpha_rt == 0.995);
    CHECK(d->omega_align == doctest::Approx(s.source.pump.center));
}

TEST_CASE("report json carries exactly the published keys")
{
    AnalysisReport r;
    r.schmidt.weights = {0.9, 0.1};
    r.schmidt.purity = 0.82;
    r.schmidt.effective_modes = 1.0 / 0.82;
    r.g2_unheralded_zero = 1.82;
    r.peaks.push_back({0.01, -0.02, 1.0});
    const nlohmann::json j = report_to_json(r);
    CHECK(j.size() == 5);
    CHECK(j.contains("weights"));
    CHECK(j.contains("purity"));
    CHECK(j.contains("g2"));
    CHECK(j.contains("effective_modes"));
    CHECK(j.contains("peaks"));
    CHECK(j["peaks"][0].size() == 3);
}
