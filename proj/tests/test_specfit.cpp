#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "ringjsa/specfit.hpp"
#include "ringjsa/units.hpp"

using namespace ringjsa;

namespace
{

SplitResonance table_r1()
{
    return {"R1", 0.920, 0.0167, 0.389, 0.0152, 0.145, 1.990, 4.614, 1222.47};
}

SplitResonance table_r2()
{
    return {"R2", 0.930, 0.0183, 0.291, 0.0114, 0.159, 0.793, 5.262, 1217.85};
}

SplitResonance table_r3()
{
    return {"R3", 0.976, 0.0190, 0.572, 0.0245, 0.167, 1.461, 4.842, 1213.23};
}

std::vector<SpectrumSample> synth(const SplitResonance& r, int points, double half_linewidths,
                                  double sigma = 0.0, std::uint64_t seed = 1)
{
    return synthesize_spectrum(r, make_grid(r.omega0, half_linewidths * r.decay, points), sigma, seed);
}

double model_rms_against(const SplitResonance& truth, const SplitResonance& fitted, double half_linewidths)
{
    double acc = 0.0;
    const int n = 400;
    for (int i = 0; i < n; ++i)
    {
        const double w = truth.omega0 + (2.0 * i / (n - 1.0) - 1.0) * half_linewidths * truth.decay;
        const double d = std::abs(through_transmission(truth, w)) - std::abs(through_transmission(fitted, w));
        acc += d * d;
    }
    return std::sqrt(acc / n);
}

}  // namespace

TEST_CASE("synthesized spectrum of an uncoupled ring is the constant baseline")
{
    SplitResonance r = table_r2();
    r.kappa = 0.0;
    const auto samples = synth(r, 50, 5.0);
    for (const auto& s : samples)
    {
        CHECK(s.transmission == doctest::Approx(r.c_norm * r.c_norm).epsilon(1e-12));
    }
}

TEST_CASE("synthesized minima sit at the dense-scan dip locations")
{
    const SplitResonance r1 = table_r1();
    const auto samples = synth(r1, 400, 8.0);

    // dense argmin oracle over the same span
    const double hw = 8.0 * r1.decay;
    std::vector<double> dip_omegas;
    const int dense = 200001;
    std::vector<double> t(dense);
    for (int i = 0; i < dense; ++i)
    {
        t[i] = std::norm(through_transmission(r1, r1.omega0 - hw + 2.0 * hw * i / (dense - 1.0)));
    }
    for (int i = 1; i + 1 < dense; ++i)
    {
        if (t[i] < t[i - 1] && t[i] < t[i + 1])
        {
            dip_omegas.push_back(r1.omega0 - hw + 2.0 * hw * i / (dense - 1.0));
        }
    }
    REQUIRE(dip_omegas.size() == 2);

    // locate the two lowest samples on each side of the center
    const double grid_step = 2.0 * hw / 399.0;
    auto nearest_sample_omega = [&](double target) {
        double best_w = 0.0, best_t = 1e300;
        for (const auto& s : samples)
        {
            const double w = wavelength_to_omega(s.wavelength_nm);
            if (std::abs(w - target) < 3.0 * grid_step && s.transmission < best_t)
            {
                best_t = s.transmission;
                best_w = w;
            }
        }
        return best_w;
    };
    for (const double dip : dip_omegas)
    {
        CHECK(std::abs(nearest_sample_omega(dip) - dip) <= grid_step * (1.0 + 1e-9));
    }
}

TEST_CASE("synthesis is deterministic per seed")
{
    const auto a = synth(table_r3(), 100, 6.0, 0.01, 42);
    const auto b = synth(table_r3(), 100, 6.0, 0.01, 42);
    const auto c = synth(table_r3(), 100, 6.0, 0.01, 43);
    REQUIRE(a.size() == b.size());
    bool all_equal = true, any_diff = false;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        all_equal &= a[i].transmission == b[i].transmission;
        any_diff |= a[i].transmission != c[i].transmission;
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("initial guess finds the center of an unsplit resonance")
{
    SplitResonance r = table_r2().unsplit();
    const auto samples = synth(r, 220, 8.0);
    const SplitResonance guess = initial_guess(samples);
    CHECK(std::abs(guess.omega0 - r.omega0) < 0.1 * r.decay);
}

TEST_CASE("initial guess estimates the splitting of R3 within half")
{
    const auto samples = synth(table_r3(), 400, 8.0);
    const SplitResonance guess = initial_guess(samples);
    CHECK(guess.mu0 > 0.5 * table_r3().mu0);
    CHECK(guess.mu0 < 1.5 * table_r3().mu0);
}

TEST_CASE("initial guess survives a flat spectrum")
{
    std::vector<SpectrumSample> flat;
    for (int i = 0; i < 60; ++i)
    {
        flat.push_back({1546.0 + 0.002 * i, 0.9});
    }
    const SplitResonance guess = initial_guess(flat);
    CHECK(guess.decay > 0.0);
}

TEST_CASE("noiseless R2 round trip reaches machine-level residuals")
{
    const auto samples = synth(table_r2(), 400, 8.0);
    const FitResult fit = fit_resonance(samples);
    CHECK(fit.converged);
    CHECK(fit.residual_rms < 1e-6);
    CHECK(fit.r_squared > 0.9999);
    // model-output equivalence, not raw parameter equality
    CHECK(model_rms_against(table_r2(), fit.params, 8.0) < 1e-5);
}

TEST_CASE("noisy R3 fit keeps a high R-squared")
{
    const auto samples = synth(table_r3(), 400, 8.0, 0.005, 7);
    const FitResult fit = fit_resonance(samples);
    CHECK(fit.r_squared >= 0.998);
}

TEST_CASE("flat spectrum converges to a dark resonance instead of crashing")
{
    std::vector<SpectrumSample> flat;
    for (int i = 0; i < 80; ++i)
    {
        flat.push_back({1552.0 + 0.003 * i, 0.95 * 0.95});
    }
    const FitResult fit = fit_resonance(flat);
    CHECK(fit.converged);
    CHECK(fit.residual_rms < 1e-9);
    CHECK(fit.params.kappa < 1e-2);
}

TEST_CASE("fitting is deterministic")
{
    const auto samples = synth(table_r1(), 200, 8.0, 0.002, 5);
    const FitResult a = fit_resonance(samples);
    const FitResult b = fit_resonance(samples);
    CHECK(a.residual_rms == b.residual_rms);
    CHECK(a.params.omega0 == b.params.omega0);
    CHECK(a.params.kappa == b.params.kappa);
    CHECK(a.r_squared == b.r_squared);
}

TEST_CASE("multi-start never loses to the plain start")
{
    const auto samples = synth(table_r1(), 240, 8.0, 0.004, 11);
    FitOptions plain;
    plain.multistart = 0;
    const FitResult single = fit_resonance(samples, std::nullopt, plain);
    const FitResult multi = fit_resonance(samples);
    CHECK(multi.residual_rms <= single.residual_rms * (1.0 + 1e-12));
}

TEST_CASE("R-squared decreases with noise, statistically over 20 seeds")
{
    double mean_low = 0.0, mean_high = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed)
    {
        FitOptions fast;
        fast.multistart = 2;
        mean_low += fit_resonance(synth(table_r2(), 150, 6.0, 0.002, seed), std::nullopt, fast).r_squared;
        mean_high += fit_resonance(synth(table_r2(), 150, 6.0, 0.02, seed), std::nullopt, fast).r_squared;
    }
    CHECK(mean_low / 20.0 > mean_high / 20.0);
}

TEST_CASE("too few samples is an argument error")
{
    std::vector<SpectrumSample> tiny(10, SpectrumSample{1550.0, 1.0});
    for (int i = 0; i < 10; ++i)
    {
        tiny[i].wavelength_nm += 0.01 * i;
    }
    CHECK_THROWS_AS(fit_resonance(tiny), std::invalid_argument);
    CHECK_THROWS_AS(initial_guess(tiny), std::invalid_argument);
}

TEST_CASE("non-monotone wavelengths are rejected")
{
    auto samples = synth(table_r2(), 50, 6.0);
    std::swap(samples[10], samples[11]);
    CHECK_THROWS_AS(fit_resonance(samples), std::invalid_argument);
}
