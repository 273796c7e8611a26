#include "ringjsa/specfit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

namespace ringjsa
{

namespace
{

constexpr int kNumParams = 8;

// Deterministic standard normal via Box-Muller on mt19937_64, independent
// of the standard library's distribution implementation.
class NormalSampler
{
public:
    explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

    double operator()()
    {
        if (have_spare_)
        {
            have_spare_ = false;
            return spare_;
        }
        double u = 0.0;
        do
        {
            u = uniform();
        } while (u <= 1e-300);
        const double v = uniform();
        const double r = std::sqrt(-2.0 * std::log(u));
        spare_ = r * std::sin(kTwoPi * v);
        have_spare_ = true;
        return r * std::cos(kTwoPi * v);
    }

    double uniform()  // [0, 1)
    {
        return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    }

private:
    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Bounded parameters ride through unconstrained coordinates:
// C logistic onto (0, 1.05], positive rates through log, phases free.
// omega0 is measured from a reference in units of the width scale so the
// Jacobian columns stay comparably sized.
struct Transform
{
    double omega_ref = 0.0;
    double omega_scale = 1.0;

    Eigen::VectorXd to_u(const SplitResonance& p) const
    {
        Eigen::VectorXd u(kNumParams);
        const double c = std::clamp(p.c_norm / 1.05, 1e-9, 1.0 - 1e-9);
        u(0) = std::log(c / (1.0 - c));
        u(1) = std::log(std::max(p.decay, 1e-12));
        u(2) = std::log(std::max(p.gamma, 1e-8));
        u(3) = std::log(std::max(p.mu0, 1e-10));
        u(4) = std::log(std::max(p.kappa, 1e-10));
        u(5) = p.phi1;
        u(6) = p.phi2;
        u(7) = (p.omega0 - omega_ref) / omega_scale;
        return u;
    }

    SplitResonance to_p(const Eigen::VectorXd& u) const
    {
        SplitResonance p;
        p.c_norm = 1.05 / (1.0 + std::exp(-u(0)));
        p.decay = std::exp(u(1));
        p.gamma = std::exp(u(2));
        p.mu0 = std::exp(u(3));
        p.kappa = std::exp(u(4));
        p.phi1 = u(5);
        p.phi2 = u(6);
        p.omega0 = omega_ref + u(7) * omega_scale;
        return p;
    }
};

struct FitData
{
    std::vector<double> omega;
    std::vector<double> amplitude;  // sqrt of transmission
};

void residuals(const FitData& data, const Transform& tf, const Eigen::VectorXd& u, Eigen::VectorXd& r)
{
    const SplitResonance p = tf.to_p(u);
    const int n = static_cast<int>(data.omega.size());
    r.resize(n);
    for (int i = 0; i < n; ++i)
    {
        r(i) = std::abs(through_transmission(p, data.omega[i])) - data.amplitude[i];
    }
}

double sse(const FitData& data, const Transform& tf, const Eigen::VectorXd& u)
{
    Eigen::VectorXd r;
    residuals(data, tf, u, r);
    return r.squaredNorm();
}

// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2,
// shrink 1/2) on the transformed coordinates.
Eigen::VectorXd nelder_mead(const FitData& data, const Transform& tf, const Eigen::VectorXd& u0,
                            double step, int max_evals)
{
    const int n = kNumParams;
    std::vector<Eigen::VectorXd> pts;
    std::vector<double> vals;
    pts.push_back(u0);
    vals.push_back(sse(data, tf, u0));
    for (int i = 0; i < n; ++i)
    {
        Eigen::VectorXd q = u0;
        q(i) += step;
        pts.push_back(q);
        vals.push_back(sse(data, tf, q));
    }
    int evals = n + 1;
    std::vector<int> order(pts.size());
    while (evals < max_evals)
    {
        for (std::size_t k = 0; k < order.size(); ++k)
        {
            order[k] = static_cast<int>(k);
        }
        std::sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });
        if (vals[order.back()] - vals[order.front()] <= 1e-14 * (std::abs(vals[order.front()]) + 1e-30))
        {
            break;
        }
        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (int k = 0; k < n; ++k)
        {
            centroid += pts[order[k]];
        }
        centroid /= n;
        const int worst = order.back();
        const Eigen::VectorXd xr = centroid + (centroid - pts[worst]);
        const double fr = sse(data, tf, xr);
        ++evals;
        if (fr < vals[order.front()])
        {
            const Eigen::VectorXd xe = centroid + 2.0 * (centroid - pts[worst]);
            const double fe = sse(data, tf, xe);
            ++evals;
            if (fe < fr)
            {
                pts[worst] = xe;
                vals[worst] = fe;
            }
            else
            {
                pts[worst] = xr;
                vals[worst] = fr;
            }
        }
        else if (fr < vals[order[n - 1]])
        {
            pts[worst] = xr;
            vals[worst] = fr;
        }
        else
        {
            const Eigen::VectorXd xc = centroid + 0.5 * (pts[worst] - centroid);
            const double fc = sse(data, tf, xc);
            ++evals;
            if (fc < vals[worst])
            {
                pts[worst] = xc;
                vals[worst] = fc;
            }
            else
            {
                const Eigen::VectorXd& best = pts[order.front()];
                for (std::size_t k = 0; k < pts.size(); ++k)
                {
                    if (static_cast<int>(k) == order.front())
                    {
                        continue;
                    }
                    pts[k] = best + 0.5 * (pts[k] - best);
                    vals[k] = sse(data, tf, pts[k]);
                    ++evals;
                }
            }
        }
    }
    const auto best = std::min_element(vals.begin(), vals.end());
    return pts[static_cast<std::size_t>(best - vals.begin())];
}

struct RefineOutcome
{
    Eigen::VectorXd u;
    double sse = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Gauss-Newton with Levenberg damping; central-difference Jacobian in the
// transformed coordinates.
RefineOutcome levenberg_refine(const FitData& data, const Transform& tf, const Eigen::VectorXd& u0,
                               int max_iterations, double tolerance)
{
    RefineOutcome out;
    out.u = u0;
    Eigen::VectorXd r;
    residuals(data, tf, out.u, r);
    out.sse = r.squaredNorm();
    const int n = static_cast<int>(data.omega.size());
    double lambda = 1e-3;
    Eigen::MatrixXd jac(n, kNumParams);
    Eigen::VectorXd rp, rm;
    for (int it = 0; it < max_iterations; ++it)
    {
        out.iterations = it + 1;
        for (int k = 0; k < kNumParams; ++k)
        {
            const double h = 1e-7 * (1.0 + std::abs(out.u(k)));
            Eigen::VectorXd up = out.u;
            up(k) += h;
            Eigen::VectorXd um = out.u;
            um(k) -= h;
            residuals(data, tf, up, rp);
            residuals(data, tf, um, rm);
            jac.col(k) = (rp - rm) / (2.0 * h);
        }
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd g = jac.transpose() * r;
        bool improved = false;
        for (int attempt = 0; attempt < 25; ++attempt)
        {
            Eigen::MatrixXd a = jtj;
            for (int k = 0; k < kNumParams; ++k)
            {
                a(k, k) += lambda * std::max(jtj(k, k), 1e-12);
            }
            const Eigen::VectorXd delta = a.ldlt().solve(-g);
            const Eigen::VectorXd un = out.u + delta;
            residuals(data, tf, un, rp);
            const double fn = rp.squaredNorm();
            if (fn < out.sse && std::isfinite(fn))
            {
                const double rel = (out.sse - fn) / std::max(out.sse, 1e-300);
                out.u = un;
                r = rp;
                out.sse = fn;
                lambda = std::max(lambda * 0.3, 1e-12);
                improved = true;
                if (rel < tolerance)
                {
                    out.converged = true;
                    return out;
                }
                break;
            }
            lambda *= 10.0;
        }
        if (!improved)
        {
            // stationary to within the damping search
            out.converged = true;
            return out;
        }
    }
    return out;
}

FitData make_fit_data(const std::vector<SpectrumSample>& samples)
{
    FitData data;
    data.omega.reserve(samples.size());
    data.amplitude.reserve(samples.size());
    for (const auto& s : samples)
    {
        if (s.transmission < 0.0)
        {
            throw std::invalid_argument("fit_resonance: negative transmission sample");
        }
        data.omega.push_back(wavelength_to_omega(s.wavelength_nm));
        data.amplitude.push_back(std::sqrt(s.transmission));
    }
    // ascending omega simplifies the guess heuristics; wavelengths
    // monotone in either direction map to monotone omega
    bool increasing = true, decreasing = true;
    for (std::size_t i = 1; i < data.omega.size(); ++i)
    {
        increasing &= data.omega[i] > data.omega[i - 1];
        decreasing &= data.omega[i] < data.omega[i - 1];
    }
    if (!increasing && !decreasing)
    {
        throw std::invalid_argument("fit_resonance: wavelengths must be strictly monotone");
    }
    if (decreasing)
    {
        std::reverse(data.omega.begin(), data.omega.end());
        std::reverse(data.amplitude.begin(), data.amplitude.end());
    }
    return data;
}

SplitResonance guess_from_data(const FitData& data)
{
    const int n = static_cast<int>(data.omega.size());
    const std::vector<double>& y = data.amplitude;
    const std::vector<double>& w = data.omega;
    const double span = w.back() - w.front();

    // off-resonance baseline from the outer tenth on both sides
    const int edge = std::max(1, n / 10);
    std::vector<double> edges;
    edges.insert(edges.end(), y.begin(), y.begin() + edge);
    edges.insert(edges.end(), y.end() - edge, y.end());
    std::nth_element(edges.begin(), edges.begin() + edges.size() / 2, edges.end());
    const double baseline = edges[edges.size() / 2];

    SplitResonance g;
    g.label = "guess";
    const double ymin = *std::min_element(y.begin(), y.end());
    const double depth = baseline - ymin;
    if (!(depth > 0.02 * std::max(baseline, 1e-6)))
    {
        // no resolvable dip: broad centered fallback
        g.c_norm = std::clamp(baseline, 0.05, 1.05);
        g.decay = span / 8.0;
        g.mu0 = span / 16.0;
        g.gamma = 0.4;
        g.kappa = 1e-3;
        g.phi1 = kTwoPi / 4.0;
        g.phi2 = 3.0 * kTwoPi / 4.0;
        g.omega0 = w[static_cast<std::size_t>((n - 1) / 2)];
        return g;
    }

    // transmission-weighted centroid of the dip
    double wsum = 0.0, wmom = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const double d = std::max(0.0, baseline - y[i]);
        wsum += d * d;
        wmom += d * d * w[i];
    }
    g.omega0 = wmom / wsum;

    // width at half depth
    const double half_level = baseline - 0.5 * depth;
    int lo = n, hi = -1;
    for (int i = 0; i < n; ++i)
    {
        if (y[i] <= half_level)
        {
            lo = std::min(lo, i);
            hi = std::max(hi, i);
        }
    }
    const double width = hi > lo ? w[hi] - w[lo] : span / 10.0;
    g.decay = std::max(width / 2.0, span * 1e-3);

    // double-dip separation, when resolved, estimates the splitting
    std::vector<int> minima;
    for (int i = 1; i + 1 < n; ++i)
    {
        if (y[i] < y[i - 1] && y[i] < y[i + 1] && y[i] <= half_level)
        {
            minima.push_back(i);
        }
    }
    g.mu0 = minima.size() >= 2 ? 0.5 * (w[minima.back()] - w[minima.front()]) : 0.5 * g.decay;

    g.c_norm = std::clamp(baseline, 0.05, 1.05);
    // over-coupled branch of the unsplit dip depth (both rings in the
    // source operate over-coupled)
    g.kappa = std::sqrt(std::max((baseline + ymin) * g.decay, 1e-12));
    g.gamma = 0.4;
    g.phi1 = kTwoPi / 4.0;
    g.phi2 = 3.0 * kTwoPi / 4.0;
    return g;
}

}  // namespace

SplitResonance initial_guess(const std::vector<SpectrumSample>& samples)
{
    if (samples.size() < 20)
    {
        throw std::invalid_argument("initial_guess: need at least 20 samples");
    }
    return guess_from_data(make_fit_data(samples));
}

FitResult fit_resonance(const std::vector<SpectrumSample>& samples, const std::optional<SplitResonance>& init,
                        const FitOptions& options)
{
    if (samples.size() < 20)
    {
        throw std::invalid_argument("fit_resonance: need at least 20 samples");
    }
    const FitData data = make_fit_data(samples);
    const SplitResonance start = init ? *init : guess_from_data(data);

    Transform tf;
    tf.omega_ref = start.omega0;
    tf.omega_scale = std::max(start.decay, (data.omega.back() - data.omega.front()) / 100.0);

    const Eigen::VectorXd u0 = tf.to_u(start);
    NormalSampler rng(options.seed);

    std::vector<Eigen::VectorXd> starts{u0};
    for (int s = 0; s < options.multistart; ++s)
    {
        Eigen::VectorXd u = u0;
        for (int k = 0; k < kNumParams; ++k)
        {
            u(k) += options.perturbation * (2.0 * rng.uniform() - 1.0);
        }
        starts.push_back(u);
    }

    RefineOutcome best;
    best.sse = std::numeric_limits<double>::infinity();
    int total_iterations = 0;
    bool any_converged = false;
    for (const auto& s : starts)
    {
        const Eigen::VectorXd coarse = nelder_mead(data, tf, s, 0.15, options.simplex_max_evals);
        RefineOutcome fine = levenberg_refine(data, tf, coarse, options.max_iterations, options.tolerance);
        total_iterations += fine.iterations;
        any_converged |= fine.converged;
        if (fine.sse < best.sse)
        {
            best = fine;
        }
    }

    FitResult result;
    result.params = tf.to_p(best.u);
    result.params.label = start.label.empty() ? "fit" : start.label;
    result.params.normalize_and_validate();
    result.iterations = total_iterations;
    result.converged = best.converged;
    result.residual_rms = std::sqrt(best.sse / static_cast<double>(data.omega.size()));

    double mean = 0.0;
    for (double a : data.amplitude)
    {
        mean += a;
    }
    mean /= static_cast<double>(data.amplitude.size());
    double sstot = 0.0;
    for (double a : data.amplitude)
    {
        sstot += (a - mean) * (a - mean);
    }
    result.r_squared = sstot > 0.0 ? 1.0 - best.sse / sstot : (best.sse <= 1e-18 ? 1.0 : -1.0);
    return result;
}

std::vector<SpectrumSample> synthesize_spectrum(const SplitResonance& params, const DetuningGrid1D& grid,
                                                double noise_sigma, std::uint64_t seed)
{
    if (noise_sigma < 0.0)
    {
        throw std::invalid_argument("synthesize_spectrum: noise_sigma must be non-negative");
    }
    NormalSampler rng(seed);
    std::vector<SpectrumSample> out;
    out.reserve(grid.points.size());
    for (int i = 0; i < grid.count(); ++i)
    {
        const double omega = grid.absolute(i);
        double amp = std::abs(through_transmission(params, omega));
        if (noise_sigma > 0.0)
        {
            amp += noise_sigma * rng();
        }
        amp = std::max(amp, 0.0);
        out.push_back({omega_to_wavelength(omega), amp * amp});
    }
    return out;
}

}  // namespace ringjsa
