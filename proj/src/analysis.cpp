#include "ringjsa/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

namespace ringjsa
{

SchmidtResult schmidt_decompose(const Grid2D& grid, bool flat_phase)
{
    const int ns = static_cast<int>(grid.values.rows());
    const int ni = static_cast<int>(grid.values.cols());
    if (ns < 2 || ni < 2)
    {
        throw std::invalid_argument("schmidt_decompose: grid must be at least 2x2");
    }
    if (!grid.values.allFinite())
    {
        throw std::domain_error("schmidt_decompose: grid contains non-finite values");
    }

    const std::vector<double> ws = trapezoid_weights(ns, grid.signal_axis.spacing());
    const std::vector<double> wi = trapezoid_weights(ni, grid.idler_axis.spacing());
    Eigen::MatrixXcd m(ns, ni);
    for (int i = 0; i < ns; ++i)
    {
        for (int j = 0; j < ni; ++j)
        {
            const double w = std::sqrt(ws[i] * wi[j]);
            m(i, j) = flat_phase ? std::complex<double>(std::abs(grid.values(i, j)) * w, 0.0)
                                 : grid.values(i, j) * w;
        }
    }
    if (m.norm() == 0.0)
    {
        throw std::domain_error("schmidt_decompose: all-zero grid");
    }

    Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
    const Eigen::VectorXd sv = svd.singularValues();
    SchmidtResult out;
    out.weights.resize(static_cast<std::size_t>(sv.size()));
    double total = 0.0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
    {
        out.weights[static_cast<std::size_t>(k)] = sv(k) * sv(k);
        total += out.weights[static_cast<std::size_t>(k)];
    }
    double purity = 0.0;
    for (auto& w : out.weights)
    {
        w /= total;
        purity += w * w;
    }
    out.purity = purity;
    out.effective_modes = 1.0 / purity;
    return out;
}

SchmidtResult schmidt_decompose(const JsaGrid& jsa, bool flat_phase)
{
    return schmidt_decompose(jsa.grid, flat_phase);
}

double purity_to_g2(double purity)
{
    if (!(purity > 0.0) || purity > 1.0)
    {
        throw std::invalid_argument("purity_to_g2: purity must lie in (0, 1]");
    }
    return 1.0 + purity;
}

std::vector<GridPeak> find_peaks(const Eigen::MatrixXd& grid, double rel_threshold)
{
    if (!grid.allFinite())
    {
        throw std::domain_error("find_peaks: grid contains non-finite values");
    }
    std::vector<GridPeak> peaks;
    if (grid.rows() < 3 || grid.cols() < 3)
    {
        return peaks;
    }
    const double cutoff = rel_threshold * grid.maxCoeff();
    for (int i = 1; i + 1 < grid.rows(); ++i)
    {
        for (int j = 1; j + 1 < grid.cols(); ++j)
        {
            const double v = grid(i, j);
            if (v < cutoff)
            {
                continue;
            }
            bool is_max = true;
            for (int di = -1; di <= 1 && is_max; ++di)
            {
                for (int dj = -1; dj <= 1; ++dj)
                {
                    if (di == 0 && dj == 0)
                    {
                        continue;
                    }
                    if (grid(i + di, j + dj) >= v)
                    {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max)
            {
                peaks.push_back({i, j, v});
            }
        }
    }
    std::sort(peaks.begin(), peaks.end(), [](const GridPeak& a, const GridPeak& b) { return a.value > b.value; });
    return peaks;
}

OnChipRates loss_corrected_rates(const LossBudget& budget, double raw_single_hz, double raw_coincidence_hz)
{
    if (!(budget.eta_d > 0.0))
    {
        throw std::invalid_argument("loss_corrected_rates: eta_d must be positive");
    }
    if (budget.alpha_gc_db < 0.0 || budget.alpha_de_db < 0.0 || budget.de_stages < 0)
    {
        throw std::invalid_argument("loss_corrected_rates: losses must be non-negative");
    }
    if (raw_single_hz < 0.0 || raw_coincidence_hz < 0.0)
    {
        throw std::invalid_argument("loss_corrected_rates: rates must be non-negative");
    }
    const double alpha_tot = 1.0 - std::pow(10.0, (-budget.alpha_gc_db - budget.de_stages * budget.alpha_de_db) / 10.0);
    const double transmit = 1.0 - alpha_tot;
    OnChipRates out;
    out.singles_hz = raw_single_hz / budget.eta_d / transmit;
    out.pairs_hz = raw_coincidence_hz / (budget.eta_d * budget.eta_d) / (transmit * transmit);
    return out;
}

Marginals marginals(const Eigen::MatrixXd& grid, double signal_spacing, double idler_spacing)
{
    if (!grid.allFinite())
    {
        throw std::domain_error("marginals: grid contains non-finite values");
    }
    const int ns = static_cast<int>(grid.rows());
    const int ni = static_cast<int>(grid.cols());
    const std::vector<double> ws = trapezoid_weights(ns, signal_spacing);
    const std::vector<double> wi = trapezoid_weights(ni, idler_spacing);
    Marginals m;
    m.signal.assign(static_cast<std::size_t>(ns), 0.0);
    m.idler.assign(static_cast<std::size_t>(ni), 0.0);
    for (int i = 0; i < ns; ++i)
    {
        for (int j = 0; j < ni; ++j)
        {
            m.signal[static_cast<std::size_t>(i)] += grid(i, j) * wi[j];
            m.idler[static_cast<std::size_t>(j)] += grid(i, j) * ws[i];
        }
    }
    return m;
}

AnalysisReport analyze_jsa(const JsaGrid& jsa, double peak_rel_threshold, bool flat_phase)
{
    AnalysisReport report;
    report.schmidt = schmidt_decompose(jsa, flat_phase);
    report.g2_unheralded_zero = purity_to_g2(report.schmidt.purity);

    const Eigen::MatrixXd jsi = jsa.grid.values.cwiseAbs2();
    const double peak_max = jsi.maxCoeff();
    for (const GridPeak& p : find_peaks(jsi, peak_rel_threshold))
    {
        ReportPeak rp;
        rp.d_lambda_s_nm = detuning_to_dlambda(jsa.grid.signal_axis.center_radps, jsa.grid.signal_axis.points[p.i]);
        rp.d_lambda_i_nm = detuning_to_dlambda(jsa.grid.idler_axis.center_radps, jsa.grid.idler_axis.points[p.j]);
        rp.height = peak_max > 0.0 ? p.value / peak_max : 0.0;
        report.peaks.push_back(rp);
    }
    report.jsi_marginals = marginals(jsi, jsa.grid.signal_axis.spacing(), jsa.grid.idler_axis.spacing());
    return report;
}

}  // namespace ringjsa
