#pragma once

#include <string>
#include <vector>

#include "rts/image.hpp"

namespace rts {

/// Geometric enhancement model: iterate toward y + alpha/(1-alpha)*(y - y_bar)
/// where y_bar is the blurred round trip of y through the down/up scalers.
double predict_hr_n(double y, double y_bar, double alpha, int n);
double fixed_point_limit(double y, double y_bar, double alpha);

ImageF predict_hr_n(const ImageF& y, const ImageF& y_bar, double alpha, int n);
ImageF fixed_point_limit(const ImageF& y, const ImageF& y_bar, double alpha);

struct AlphaFit {
    double alpha = 0.0;
    double scale = 0.0;  // C in DR_n ~= C * (1 - alpha^n)
    std::vector<double> predicted;
    std::vector<double> residuals;
    double rms_residual = 0.0;
};

/// Least-squares fit of the single-alpha geometric model to a measured
/// difference-ratio sequence (dr[k] is the value at stage k+1).
AlphaFit fit_geometric_dr(const std::vector<double>& dr);

struct StageRecord;

/// Theory-vs-measurement comparison for a completed run, written as CSV with
/// header stage,measured_dr,predicted_dr,residual.
void write_theory_comparison(const std::vector<StageRecord>& records, const std::string& path);

}  // namespace rts
