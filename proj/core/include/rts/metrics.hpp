#pragma once

#include <optional>

#include "rts/image.hpp"

namespace rts {

struct AlphaEstimate {
    double alpha_hat = 0.0;
    double residual_energy = 0.0;  // ||r_x||^2
    double fit_residual = 0.0;     // ||r_y_down - alpha_hat * r_x||
};

/// 100 * mean(|img - ref|) / mean(ref); brightness- and resolution-normalized.
double image_difference_ratio(const ImageF& img, const ImageF& ref);

/// Least-squares scalar contraction fit between two signed residual fields:
/// alpha_hat = <r_y_down, r_x> / <r_x, r_x>.
AlphaEstimate estimate_alpha(const ImageF& r_y_down, const ImageF& r_x);

double mse(const ImageF& img, const ImageF& ref);

/// 10*log10(1/MSE) for [0,1] images; nullopt when the images are identical.
std::optional<double> psnr(const ImageF& img, const ImageF& ref);

/// Mean squared 3x3 Laplacian response of the Rec.601 luminance, interior
/// pixels only.
double sharpness_proxy(const ImageF& img);

}  // namespace rts
