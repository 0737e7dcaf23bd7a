#include "rts/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace rts {
namespace {

void check_same_shape(const ImageF& a, const ImageF& b, const char* what) {
    if (a.width != b.width || a.height != b.height || a.channels != b.channels)
        throw std::invalid_argument(std::string(what) + ": shape mismatch");
    if (a.empty()) throw std::invalid_argument(std::string(what) + ": empty image");
}

}  // namespace

double image_difference_ratio(const ImageF& img, const ImageF& ref) {
    check_same_shape(img, ref, "image_difference_ratio");
    double abs_diff = 0.0, ref_sum = 0.0;
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        abs_diff += std::fabs(static_cast<double>(img.data[i]) - ref.data[i]);
        ref_sum += ref.data[i];
    }
    if (ref_sum == 0.0) throw std::invalid_argument("image_difference_ratio: zero-brightness reference");
    return 100.0 * abs_diff / ref_sum;
}

AlphaEstimate estimate_alpha(const ImageF& r_y_down, const ImageF& r_x) {
    check_same_shape(r_y_down, r_x, "estimate_alpha");
    double dot = 0.0, energy = 0.0;
    for (std::size_t i = 0; i < r_x.data.size(); ++i) {
        dot += static_cast<double>(r_y_down.data[i]) * r_x.data[i];
        energy += static_cast<double>(r_x.data[i]) * r_x.data[i];
    }
    if (energy == 0.0) throw std::invalid_argument("estimate_alpha: zero-energy residual field");
    AlphaEstimate est;
    est.alpha_hat = dot / energy;
    est.residual_energy = energy;
    double fit = 0.0;
    for (std::size_t i = 0; i < r_x.data.size(); ++i) {
        const double d = r_y_down.data[i] - est.alpha_hat * r_x.data[i];
        fit += d * d;
    }
    est.fit_residual = std::sqrt(fit);
    return est;
}

double mse(const ImageF& img, const ImageF& ref) {
    check_same_shape(img, ref, "mse");
    double acc = 0.0;
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        const double d = static_cast<double>(img.data[i]) - ref.data[i];
        acc += d * d;
    }
    return acc / static_cast<double>(img.data.size());
}

std::optional<double> psnr(const ImageF& img, const ImageF& ref) {
    const double m = mse(img, ref);
    if (m == 0.0) return std::nullopt;
    return 10.0 * std::log10(1.0 / m);
}

double sharpness_proxy(const ImageF& img) {
    if (img.width < 3 || img.height < 3)
        throw std::invalid_argument("sharpness_proxy: image too small");
    if (img.channels != 3 && img.channels != 1)
        throw std::invalid_argument("sharpness_proxy: expected 1 or 3 channels");
    std::vector<double> luma(static_cast<std::size_t>(img.width) * img.height);
    const std::size_t px = luma.size();
    if (img.channels == 3) {
        for (std::size_t i = 0; i < px; ++i)
            luma[i] = 0.299 * img.data[i] + 0.587 * img.data[px + i] + 0.114 * img.data[2 * px + i];
    } else {
        for (std::size_t i = 0; i < px; ++i) luma[i] = img.data[i];
    }
    double acc = 0.0;
    for (int y = 1; y < img.height - 1; ++y)
        for (int x = 1; x < img.width - 1; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * img.width + x;
            const double r = luma[i - img.width] + luma[i + img.width] + luma[i - 1] + luma[i + 1] - 4.0 * luma[i];
            acc += r * r;
        }
    return acc / (static_cast<double>(img.width - 2) * (img.height - 2));
}

}  // namespace rts
