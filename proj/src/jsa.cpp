#include "ringjsa/jsa.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace ringjsa
{

namespace
{

// Row-partitioned parallel loop. Each index is processed by exactly one
// thread and writes disjoint state, so results are identical to the
// serial order regardless of the thread count.
void parallel_rows(int rows, int threads, const std::function<void(int)>& body)
{
    int n = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    n = std::max(1, std::min(n, rows));
    if (n == 1)
    {
        for (int i = 0; i < rows; ++i)
        {
            body(i);
        }
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t)
    {
        pool.emplace_back([&, t]() {
            for (int i = t; i < rows; i += n)
            {
                body(i);
            }
        });
    }
    for (auto& th : pool)
    {
        th.join();
    }
}

// Window for sampling the enhanced pump spectrum: wide enough for the
// envelope, the resonance tails, and any offset between the two centers.
struct PumpWindow
{
    double center;
    double half;
    bool narrow_warning = false;
};

PumpWindow pump_window(const SourceConfig& cfg)
{
    PumpWindow w;
    const double offset = std::abs(cfg.pump.center - cfg.pump_res.omega0);
    w.center = 0.5 * (cfg.pump.center + cfg.pump_res.omega0);
    const double auto_half = std::max(6.0 * cfg.pump_res.decay, 3.0 * cfg.pump.fwhm_radps()) + 0.5 * offset;
    if (cfg.pump_window_half_width > 0.0)
    {
        w.half = cfg.pump_window_half_width;
        w.narrow_warning = cfg.pump_window_half_width < 6.0 * cfg.pump_res.decay;
    }
    else
    {
        w.half = auto_half;
    }
    return w;
}

void normalize_jsa(JsaGrid& jsa)
{
    const double l2 = grid_l2_norm_sq(jsa.grid);
    if (!(l2 > 0.0))
    {
        throw std::domain_error("jsa: grid has zero norm");
    }
    jsa.norm = 1.0 / std::sqrt(l2);
    jsa.grid.values *= jsa.norm;
}

}  // namespace

EnergyMatch check_energy_matching(const SourceConfig& cfg)
{
    EnergyMatch m;
    m.detuning = std::abs(2.0 * cfg.pump_res.omega0 - cfg.signal_res.omega0 - cfg.idler_res.omega0);
    m.linewidth = std::max({cfg.pump_res.decay, cfg.signal_res.decay, cfg.idler_res.decay});
    m.warn = m.detuning >= 3.0 * m.linewidth;
    m.fail = m.detuning >= 30.0 * m.linewidth;
    return m;
}

EnergyMatch validate_source_config(const SourceConfig& cfg)
{
    cfg.pump.validate();
    cfg.pm.validate();
    if (cfg.signal_grid.count() < 2 || cfg.idler_grid.count() < 2)
    {
        throw std::invalid_argument("SourceConfig: signal/idler grids need at least 2 points");
    }
    const EnergyMatch m = check_energy_matching(cfg);
    if (m.fail)
    {
        throw std::invalid_argument("SourceConfig: resonance triple violates energy matching: |2 w_p - w_s - w_i| = " +
                                    std::to_string(m.detuning) + " rad/ps");
    }
    return m;
}

SourceConfig make_source_config(const SplitResonance& pump_res, const SplitResonance& signal_res,
                                const SplitResonance& idler_res, const PumpSpec& pump,
                                const PhaseMatchSpec& pm, int signal_points, int idler_points,
                                double half_width_linewidths)
{
    SourceConfig cfg;
    cfg.pump_res = pump_res;
    cfg.signal_res = signal_res;
    cfg.idler_res = idler_res;
    cfg.pump = pump;
    cfg.pm = pm;
    cfg.pm.omega_s0 = signal_res.omega0;
    cfg.pm.omega_i0 = idler_res.omega0;
    cfg.signal_grid = make_grid(signal_res.omega0, half_width_linewidths * signal_res.decay, signal_points);
    cfg.idler_grid = make_grid(idler_res.omega0, half_width_linewidths * idler_res.decay, idler_points);
    return cfg;
}

Grid2D compute_tdsi(const SourceConfig& cfg)
{
    const int ns = cfg.signal_grid.count();
    const int ni = cfg.idler_grid.count();
    Eigen::VectorXcd lsf(ns), lsb(ns), lif(ni), lib(ni);
    for (int i = 0; i < ns; ++i)
    {
        const double w = cfg.signal_grid.absolute(i);
        lsf(i) = enhancement_forward(cfg.signal_res, w);
        lsb(i) = enhancement_backward(cfg.signal_res, w);
    }
    for (int j = 0; j < ni; ++j)
    {
        const double w = cfg.idler_grid.absolute(j);
        lif(j) = enhancement_forward(cfg.idler_res, w);
        lib(j) = enhancement_backward(cfg.idler_res, w);
    }
    Grid2D out;
    out.signal_axis = cfg.signal_grid;
    out.idler_axis = cfg.idler_grid;
    const double gg = cfg.signal_res.gamma * cfg.idler_res.gamma;
    out.values = lsf * lif.transpose() + gg * (lsb * lib.transpose());
    return out;
}

std::vector<std::complex<double>> compute_adp(const SourceConfig& cfg, const DetuningGrid1D& nu_sum_grid)
{
    const int nq = nu_sum_grid.count();
    if (nq < 2)
    {
        throw std::invalid_argument("compute_adp: nu_sum grid needs at least 2 points");
    }
    const double h = 0.5 * nu_sum_grid.spacing();
    if (!(h > 0.0))
    {
        throw std::invalid_argument("compute_adp: nu_sum grid spacing must be positive");
    }

    PumpWindow win = pump_window(cfg);
    // the auto-convolution lives on [2*w_min, 2*w_max]; make sure it covers
    // every requested sum frequency
    const double sum_lo = nu_sum_grid.center_radps + nu_sum_grid.points.front();
    const double sum_hi = nu_sum_grid.center_radps + nu_sum_grid.points.back();
    win.half = std::max({win.half, std::abs(sum_lo / 2.0 - win.center) + 4.0 * h,
                         std::abs(sum_hi / 2.0 - win.center) + 4.0 * h});

    const int half_n = static_cast<int>(std::ceil(win.half / h));
    const int n = 2 * half_n + 1;
    std::vector<std::complex<double>> f(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
    {
        const double w = win.center + (j - half_n) * h;
        const std::complex<double> a = pump_envelope(cfg.pump, w);
        f[j] = a * enhancement_forward(cfg.pump_res, w);
        b[j] = a * enhancement_backward(cfg.pump_res, w);
    }

    // direct discrete auto-convolutions, scaled by the sample spacing
    const int nc = 2 * n - 1;
    const double g2 = cfg.pump_res.gamma * cfg.pump_res.gamma;
    std::vector<std::complex<double>> conv(static_cast<std::size_t>(nc), {0.0, 0.0});
    for (int k = 0; k < nc; ++k)
    {
        const int j_lo = std::max(0, k - (n - 1));
        const int j_hi = std::min(n - 1, k);
        std::complex<double> acc_f{0.0, 0.0}, acc_b{0.0, 0.0};
        for (int j = j_lo; j <= j_hi; ++j)
        {
            acc_f += f[j] * f[k - j];
            acc_b += b[j] * b[k - j];
        }
        conv[k] = (acc_f + g2 * acc_b) * h;
    }

    // linear interpolation onto the requested sum frequencies
    const double conv_w0 = 2.0 * (win.center - half_n * h);
    std::vector<std::complex<double>> out(static_cast<std::size_t>(nq));
    for (int q = 0; q < nq; ++q)
    {
        const double ws = nu_sum_grid.center_radps + nu_sum_grid.points[q];
        const double x = (ws - conv_w0) / h;
        const int i0 = static_cast<int>(std::floor(x));
        if (i0 < 0 || i0 + 1 >= nc)
        {
            out[q] = {0.0, 0.0};
            continue;
        }
        const double t = x - i0;
        out[q] = (1.0 - t) * conv[i0] + t * conv[i0 + 1];
    }
    return out;
}

JsaGrid compute_jsa_quadrature(const SourceConfig& cfg)
{
    const EnergyMatch match = validate_source_config(cfg);
    (void)match;
    if (cfg.pump_quadrature_points < 64)
    {
        throw std::invalid_argument("compute_jsa_quadrature: pump_quadrature_points must be >= 64");
    }
    const int ns = cfg.signal_grid.count();
    const int ni = cfg.idler_grid.count();
    const int np = cfg.pump_quadrature_points;
    const PumpWindow win = pump_window(cfg);

    // fixed pump nodes; the energy-conservation partner w_s + w_i - w_p is
    // evaluated per pixel
    std::vector<double> wp(static_cast<std::size_t>(np));
    std::vector<std::complex<double>> alpha_p(static_cast<std::size_t>(np)), lpf(static_cast<std::size_t>(np)),
        lpb(static_cast<std::size_t>(np));
    const double hq = 2.0 * win.half / (np - 1);
    for (int k = 0; k < np; ++k)
    {
        wp[k] = win.center - win.half + k * hq;
        alpha_p[k] = pump_envelope(cfg.pump, wp[k]);
        lpf[k] = enhancement_forward(cfg.pump_res, wp[k]);
        lpb[k] = enhancement_backward(cfg.pump_res, wp[k]);
    }

    Eigen::VectorXcd lsf(ns), lsb(ns), lif(ni), lib(ni);
    for (int i = 0; i < ns; ++i)
    {
        lsf(i) = enhancement_forward(cfg.signal_res, cfg.signal_grid.absolute(i));
        lsb(i) = enhancement_backward(cfg.signal_res, cfg.signal_grid.absolute(i));
    }
    for (int j = 0; j < ni; ++j)
    {
        lif(j) = enhancement_forward(cfg.idler_res, cfg.idler_grid.absolute(j));
        lib(j) = enhancement_backward(cfg.idler_res, cfg.idler_grid.absolute(j));
    }

    JsaGrid jsa;
    jsa.grid.signal_axis = cfg.signal_grid;
    jsa.grid.idler_axis = cfg.idler_grid;
    jsa.grid.values.resize(ns, ni);
    jsa.window_warning = win.narrow_warning;
    jsa.meta = cfg;

    const double gg_si = cfg.signal_res.gamma * cfg.idler_res.gamma;
    const double g2p = cfg.pump_res.gamma * cfg.pump_res.gamma;

    parallel_rows(ns, cfg.threads, [&](int i) {
        const double ws = cfg.signal_grid.absolute(i);
        const double nu_s = cfg.signal_grid.points[i];
        for (int j = 0; j < ni; ++j)
        {
            const double wsum = ws + cfg.idler_grid.absolute(j);
            // trapezoid over the pump frequency, deterministic in-order sum
            std::complex<double> acc{0.0, 0.0};
            for (int k = 0; k < np; ++k)
            {
                const double wec = wsum - wp[k];
                const std::complex<double> pair =
                    lpf[k] * enhancement_forward(cfg.pump_res, wec) + g2p * lpb[k] * enhancement_backward(cfg.pump_res, wec);
                std::complex<double> term = alpha_p[k] * pump_envelope(cfg.pump, wec) * pair;
                if (k == 0 || k == np - 1)
                {
                    term *= 0.5;
                }
                acc += term;
            }
            acc *= hq;
            const std::complex<double> tdsi = lsf(i) * lif(j) + gg_si * lsb(i) * lib(j);
            jsa.grid.values(i, j) = acc * tdsi * phi_pm(cfg.pm, nu_s, cfg.idler_grid.points[j]);
        }
    });

    normalize_jsa(jsa);
    return jsa;
}

JsaGrid compute_jsa_factorized(const SourceConfig& cfg)
{
    validate_source_config(cfg);
    const int ns = cfg.signal_grid.count();
    const int ni = cfg.idler_grid.count();

    Grid2D tdsi = compute_tdsi(cfg);

    // ADP on a 4x-oversampled sum grid, then linear interpolation per pixel
    const double sum_center = cfg.signal_grid.center_radps + cfg.idler_grid.center_radps;
    const double sum_half = cfg.signal_grid.half_width() + cfg.idler_grid.half_width();
    const int n_fine = 4 * std::max(ns, ni);
    const DetuningGrid1D fine = make_grid(sum_center, sum_half, n_fine);
    const std::vector<std::complex<double>> adp = compute_adp(cfg, fine);

    JsaGrid jsa;
    jsa.grid.signal_axis = cfg.signal_grid;
    jsa.grid.idler_axis = cfg.idler_grid;
    jsa.grid.values.resize(ns, ni);
    jsa.meta = cfg;

    const double fine_lo = fine.points.front();
    const double fine_h = fine.spacing();
    parallel_rows(ns, cfg.threads, [&](int i) {
        const double nu_s = cfg.signal_grid.points[i];
        for (int j = 0; j < ni; ++j)
        {
            const double nu_i = cfg.idler_grid.points[j];
            const double x = (nu_s + nu_i - fine_lo) / fine_h;
            const int i0 = std::clamp(static_cast<int>(std::floor(x)), 0, n_fine - 2);
            const double t = std::clamp(x - i0, 0.0, 1.0);
            const std::complex<double> a = (1.0 - t) * adp[i0] + t * adp[i0 + 1];
            jsa.grid.values(i, j) = tdsi.values(i, j) * a * phi_pm(cfg.pm, nu_s, nu_i);
        }
    });

    normalize_jsa(jsa);
    return jsa;
}

double grid_l2_norm_sq(const Grid2D& grid)
{
    const std::vector<double> ws = trapezoid_weights(grid.signal_axis.count(), grid.signal_axis.spacing());
    const std::vector<double> wi = trapezoid_weights(grid.idler_axis.count(), grid.idler_axis.spacing());
    double acc = 0.0;
    for (int i = 0; i < grid.signal_axis.count(); ++i)
    {
        double row = 0.0;
        for (int j = 0; j < grid.idler_axis.count(); ++j)
        {
            row += std::norm(grid.values(i, j)) * wi[j];
        }
        acc += row * ws[i];
    }
    return acc;
}

}  // namespace ringjsa
