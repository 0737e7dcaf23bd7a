#include "rts/fixed_point.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "rts/rts.hpp"

namespace rts {
namespace {

double check_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw std::invalid_argument("alpha must be in [0, 1); got " + std::to_string(alpha));
    return alpha;
}

// Geometric partial sum alpha*(1-alpha^n)/(1-alpha).
double geom_factor(double alpha, int n) {
    if (n < 0) throw std::invalid_argument("stage count must be non-negative");
    if (alpha == 0.0) return 0.0;
    return alpha * (1.0 - std::pow(alpha, n)) / (1.0 - alpha);
}

// Sum of squared residuals of dr against C*(1-alpha^n) with the optimal C.
double fit_objective(const std::vector<double>& dr, double alpha, double* c_out) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < dr.size(); ++i) {
        const double g = 1.0 - std::pow(alpha, static_cast<double>(i + 1));
        num += dr[i] * g;
        den += g * g;
    }
    const double c = den > 0.0 ? num / den : 0.0;
    if (c_out) *c_out = c;
    double sse = 0.0;
    for (std::size_t i = 0; i < dr.size(); ++i) {
        const double g = 1.0 - std::pow(alpha, static_cast<double>(i + 1));
        const double d = dr[i] - c * g;
        sse += d * d;
    }
    return sse;
}

}  // namespace

double predict_hr_n(double y, double y_bar, double alpha, int n) {
    check_alpha(alpha);
    return y + geom_factor(alpha, n) * (y - y_bar);
}

double fixed_point_limit(double y, double y_bar, double alpha) {
    if (alpha >= 1.0)
        throw std::invalid_argument("fixed_point_limit: alpha >= 1 diverges");
    check_alpha(alpha);
    return y + alpha / (1.0 - alpha) * (y - y_bar);
}

ImageF predict_hr_n(const ImageF& y, const ImageF& y_bar, double alpha, int n) {
    check_alpha(alpha);
    if (y.width != y_bar.width || y.height != y_bar.height || y.channels != y_bar.channels)
        throw std::invalid_argument("predict_hr_n: shape mismatch between y and y_bar");
    const double f = geom_factor(alpha, n);
    ImageF out(y.width, y.height, y.channels);
    for (std::size_t i = 0; i < y.data.size(); ++i)
        out.data[i] = static_cast<float>(y.data[i] + f * (static_cast<double>(y.data[i]) - y_bar.data[i]));
    return out;
}

ImageF fixed_point_limit(const ImageF& y, const ImageF& y_bar, double alpha) {
    if (alpha >= 1.0)
        throw std::invalid_argument("fixed_point_limit: alpha >= 1 diverges");
    check_alpha(alpha);
    if (y.width != y_bar.width || y.height != y_bar.height || y.channels != y_bar.channels)
        throw std::invalid_argument("fixed_point_limit: shape mismatch between y and y_bar");
    const double f = alpha / (1.0 - alpha);
    ImageF out(y.width, y.height, y.channels);
    for (std::size_t i = 0; i < y.data.size(); ++i)
        out.data[i] = static_cast<float>(y.data[i] + f * (static_cast<double>(y.data[i]) - y_bar.data[i]));
    return out;
}

AlphaFit fit_geometric_dr(const std::vector<double>& dr) {
    if (dr.size() < 3)
        throw std::invalid_argument("fit_geometric_dr: need at least 3 stages");
    bool all_equal = true;
    for (double v : dr)
        if (v != dr.front()) { all_equal = false; break; }
    if (all_equal) throw std::invalid_argument("fit_geometric_dr: degenerate constant sequence");

    // coarse grid then ternary refinement around the best cell
    double best_alpha = 0.5, best_sse = std::numeric_limits<double>::infinity();
    const int grid = 2000;
    for (int i = 1; i < grid; ++i) {
        const double a = static_cast<double>(i) / grid;
        const double sse = fit_objective(dr, a, nullptr);
        if (sse < best_sse) { best_sse = sse; best_alpha = a; }
    }
    double lo = std::max(1e-9, best_alpha - 1.0 / grid);
    double hi = std::min(1.0 - 1e-9, best_alpha + 1.0 / grid);
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (fit_objective(dr, m1, nullptr) < fit_objective(dr, m2, nullptr)) hi = m2;
        else lo = m1;
    }
    AlphaFit fit;
    fit.alpha = 0.5 * (lo + hi);
    fit_objective(dr, fit.alpha, &fit.scale);
    double sse = 0.0;
    for (std::size_t i = 0; i < dr.size(); ++i) {
        const double p = fit.scale * (1.0 - std::pow(fit.alpha, static_cast<double>(i + 1)));
        fit.predicted.push_back(p);
        fit.residuals.push_back(dr[i] - p);
        sse += (dr[i] - p) * (dr[i] - p);
    }
    fit.rms_residual = std::sqrt(sse / static_cast<double>(dr.size()));
    return fit;
}

void write_theory_comparison(const std::vector<StageRecord>& records, const std::string& path) {
    std::vector<double> dr;
    for (const StageRecord& r : records) dr.push_back(r.diff_ratio_pct);
    const AlphaFit fit = fit_geometric_dr(dr);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp);
        if (!os) throw std::runtime_error("cannot open " + tmp);
        os << "stage,measured_dr,predicted_dr,residual\n";
        for (std::size_t i = 0; i < records.size(); ++i)
            os << records[i].stage << ',' << dr[i] << ',' << fit.predicted[i] << ','
               << fit.residuals[i] << '\n';
        if (!os) throw std::runtime_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("rename failed: " + path);
}

}  // namespace rts
