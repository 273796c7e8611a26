#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ringjsa/io.hpp"
#include "ringjsa/specfit.hpp"

using namespace ringjsa;
namespace fs = std::filesystem;

#ifndef RINGJSA_BIN
#define RINGJSA_BIN "ringjsa"
#endif
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
        path = fs::temp_directory_path() / ("ringjsa_cli_" + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args)
{
    const std::string cmd = std::string(RINGJSA_BIN) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SplitResonance table_r4()
{
    return {"R4", 0.982, 0.0200, 0.382, 0.0161, 0.164, 1.740, 4.688, 1208.61};
}

// small, fast configuration written into the temp dir
fs::path write_small_config(const TempDir& tmp)
{
    nlohmann::json cfg;
    const fs::path data(RINGJSA_DATA_DIR);
    cfg["pump_resonance"] = (data / "resonance_r3.json").string();
    cfg["signal_resonance"] = (data / "resonance_r2.json").string();
    cfg["idler_resonance"] = (data / "resonance_r4.json").string();
    cfg["pump"] = {{"center_nm", 1552.61}, {"fwhm_pm", 226.0}, {"shape", "gaussian"}};
    cfg["grid"] = {{"signal_points", 32}, {"idler_points", 32}, {"half_width_linewidths", 3.0}};
    cfg["pump_quadrature_points"] = 65;
    cfg["method"] = "factorized";
    const fs::path p = tmp.path / "small.json";
    std::ofstream out(p);
    out << cfg.dump(2);
    return p;
}

}  // namespace

TEST_CASE("cli fit achieves the table-grade fit on a synthetic spectrum")
{
    TempDir tmp;
    const auto samples = synthesize_spectrum(table_r4(), make_grid(1208.61, 8.0 * 0.02, 400), 0.0);
    write_spectrum_csv(tmp.path / "r4.csv", samples);
    const int status = run("fit " + (tmp.path / "r4.csv").string() + " --out " + (tmp.path / "o").string());
    CHECK(status == 0);
    nlohmann::json j = nlohmann::json::parse(slurp(tmp.path / "o" / "fit.json"));
    CHECK(j["r_squared"].get<double>() >= 0.999);
}

TEST_CASE("cli fit reports parse failures with exit 1")
{
    TempDir tmp;
    std::ofstream(tmp.path / "empty.csv").close();
    CHECK(run("fit " + (tmp.path / "empty.csv").string() + " --out " + (tmp.path / "o").string()) == 1);
    CHECK(run("fit " + (tmp.path / "missing.csv").string()) == 1);
}

TEST_CASE("cli fit handles a flat spectrum as the degenerate contract")
{
    TempDir tmp;
    std::ofstream out(tmp.path / "flat.csv");
    out << "wavelength_nm,transmission\n";
    for (int i = 0; i < 50; ++i)
    {
        out << (1550.0 + 0.002 * i) << ",0.88\n";
    }
    out.close();
    const int status = run("fit " + (tmp.path / "flat.csv").string() + " --out " + (tmp.path / "o").string());
    CHECK(status == 0);
    nlohmann::json j = nlohmann::json::parse(slurp(tmp.path / "o" / "fit.json"));
    CHECK(j["kappa_sqrtTHz"].get<double>() < 1e-2);
}

TEST_CASE("cli simulate writes the full product set deterministically")
{
    TempDir tmp;
    const fs::path cfg = write_small_config(tmp);
    const std::string out1 = (tmp.path / "a").string();
    const std::string out2 = (tmp.path / "b").string();
    REQUIRE(run("simulate " + cfg.string() + " --out " + out1) == 0);
    REQUIRE(run("simulate " + cfg.string() + " --out " + out2) == 0);
    for (const char* name : {"jsa.csv", "jsi.csv", "tdsi.csv", "adp.csv", "report.json"})
    {
        CHECK(fs::exists(fs::path(out1) / name));
        CHECK(slurp(fs::path(out1) / name) == slurp(fs::path(out2) / name));
    }
    nlohmann::json report = nlohmann::json::parse(slurp(fs::path(out1) / "report.json"));
    CHECK(report["purity"].get<double>() > 0.5);
}

TEST_CASE("cli simulate fails fast with exit 3 on energy mismatch")
{
    TempDir tmp;
    const fs::path data(RINGJSA_DATA_DIR);
    nlohmann::json cfg;
    cfg["pump_resonance"] = (data / "resonance_r3.json").string();
    cfg["signal_resonance"] = (data / "resonance_r2.json").string();
    cfg["idler_resonance"] = (data / "resonance_r2.json").string();  // wrong triple
    cfg["pump"] = {{"center_nm", 1552.61}, {"fwhm_pm", 226.0}};
    cfg["grid"] = {{"signal_points", 16}, {"idler_points", 16}};
    const fs::path p = tmp.path / "bad.json";
    std::ofstream(p) << cfg.dump();
    const std::string out = (tmp.path / "o").string();
    CHECK(run("simulate " + p.string() + " --out " + out) == 3);
    CHECK_FALSE(fs::exists(fs::path(out) / "report.json"));
}

TEST_CASE("cli sweep emits one row per value consistent with simulate")
{
    TempDir tmp;
    const fs::path cfg = write_small_config(tmp);
    const std::string out = (tmp.path / "o").string();
    const fs::path sweep_csv = tmp.path / "sweep.csv";
    REQUIRE(run("simulate " + cfg.string() + " --out " + out) == 0);
    REQUIRE(run("sweep " + cfg.string() + " --param pump.fwhm_pm --values 226 --out-csv " + sweep_csv.string()) == 0);
    nlohmann::json report = nlohmann::json::parse(slurp(fs::path(out) / "report.json"));

    std::ifstream in(sweep_csv);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "value,purity,g2,n_peaks");
    std::stringstream ss(row);
    std::string field;
    std::getline(ss, field, ',');
    CHECK(std::stod(field) == 226.0);
    std::getline(ss, field, ',');
    CHECK(std::stod(field) == doctest::Approx(report["purity"].get<double>()).epsilon(1e-12));
    std::getline(ss, field, ',');
    CHECK(std::stod(field) == doctest::Approx(report["g2"].get<double>()).epsilon(1e-12));
    std::getline(ss, field, ',');
    CHECK(std::stoi(field) == static_cast<int>(report["peaks"].size()));
}

TEST_CASE("cli sweep rejects unknown keys with exit 1")
{
    TempDir tmp;
    const fs::path cfg = write_small_config(tmp);
    CHECK(run("sweep " + cfg.string() + " --param pump.bogus --values 1,2 --out-csv " +
              (tmp.path / "s.csv").string()) == 1);
}

TEST_CASE("cli analyze re-ingests emitted grids")
{
    TempDir tmp;
    const fs::path cfg = write_small_config(tmp);
    const std::string out = (tmp.path / "o").string();
    REQUIRE(run("simulate " + cfg.string() + " --out " + out) == 0);
    nlohmann::json report = nlohmann::json::parse(slurp(fs::path(out) / "report.json"));

    // complex amplitude path: purity should reproduce the report
    const std::string out2 = (tmp.path / "o2").string();
    REQUIRE(run("analyze " + (fs::path(out) / "jsa.csv").string() + " --complex --out " + out2) == 0);
    nlohmann::json re = nlohmann::json::parse(slurp(fs::path(out2) / "report.json"));
    CHECK(re["purity"].get<double>() == doctest::Approx(report["purity"].get<double>()).epsilon(1e-4));

    // intensity path with the flat-phase default
    const std::string out3 = (tmp.path / "o3").string();
    REQUIRE(run("analyze " + (fs::path(out) / "jsi.csv").string() + " --out " + out3) == 0);
    nlohmann::json rf = nlohmann::json::parse(slurp(fs::path(out3) / "report.json"));
    CHECK(rf["purity"].get<double>() > 0.5);
    CHECK(rf["purity"].get<double>() <= 1.0);
}

TEST_CASE("cli pump and phasematch emit their series")
{
    TempDir tmp;
    const fs::path cfg = write_small_config(tmp);
    const std::string out = (tmp.path / "o").string();
    REQUIRE(run("pump " + cfg.string() + " --time-points 128 --time-span 200 --out " + out) == 0);
    CHECK(fs::exists(fs::path(out) / "pump_spectrum.csv"));
    CHECK(fs::exists(fs::path(out) / "pump_waveform.csv"));
    REQUIRE(run("phasematch " + cfg.string() + " --out " + out) == 0);
    CHECK(fs::exists(fs::path(out) / "phasematch.csv"));
    REQUIRE(run("tdsi " + cfg.string() + " --out " + out) == 0);
    CHECK(fs::exists(fs::path(out) / "tdsi.csv"));
    REQUIRE(run("adp " + cfg.string() + " --out " + out) == 0);
    CHECK(fs::exists(fs::path(out) / "adp.csv"));
}
