#include "rts/resample.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace rts {
namespace {

double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = M_PI * x;
    return std::sin(px) / px;
}

double kernel_eval(KernelKind kind, double x) {
    switch (kind) {
        case KernelKind::lanczos3:
            return lanczos_weight(x, 3);
        case KernelKind::bilinear:
            return std::max(0.0, 1.0 - std::fabs(x));
        case KernelKind::nearest:
            return std::fabs(x) <= 0.5 ? 1.0 : 0.0;
    }
    return 0.0;
}

double kernel_support(KernelKind kind) {
    switch (kind) {
        case KernelKind::lanczos3: return 3.0;
        case KernelKind::bilinear: return 1.0;
        case KernelKind::nearest: return 0.5;
    }
    return 0.0;
}

struct Taps {
    int start = 0;
    std::vector<float> weights;
};

// One tap table per output coordinate along an axis. `scale` maps output to
// input coordinates; `stretch` widens the kernel for anti-aliased downscale.
std::vector<Taps> build_taps(int out_extent, int in_extent, double scale, double stretch,
                             KernelKind kind) {
    const double support = kernel_support(kind) * stretch;
    std::vector<Taps> taps(out_extent);
    for (int o = 0; o < out_extent; ++o) {
        const double center = (o + 0.5) * scale - 0.5;
        int lo = static_cast<int>(std::ceil(center - support));
        int hi = static_cast<int>(std::floor(center + support));
        // taps at exactly |x| == support evaluate to zero; keep them, the
        // normalization absorbs it
        std::vector<double> w(static_cast<std::size_t>(hi - lo + 1));
        double sum = 0.0;
        for (int i = lo; i <= hi; ++i) {
            const double v = kernel_eval(kind, (center - i) / stretch);
            w[static_cast<std::size_t>(i - lo)] = v;
            sum += v;
        }
        Taps t;
        t.start = lo;
        t.weights.resize(w.size());
        for (std::size_t i = 0; i < w.size(); ++i)
            t.weights[i] = static_cast<float>(w[i] / sum);
        taps[o] = t;
    }
    return taps;
}

int clamp_index(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

// Horizontal then vertical pass over each plane.
ImageF resample_axes(const ImageF& img, int out_w, int out_h,
                     const std::vector<Taps>& tx, const std::vector<Taps>& ty) {
    ImageF tmp(out_w, img.height, img.channels);
    for (int c = 0; c < img.channels; ++c) {
        const float* src = img.plane(c);
        float* dst = tmp.plane(c);
        for (int y = 0; y < img.height; ++y) {
            const float* row = src + static_cast<std::size_t>(y) * img.width;
            float* orow = dst + static_cast<std::size_t>(y) * out_w;
            for (int x = 0; x < out_w; ++x) {
                const Taps& t = tx[x];
                double acc = 0.0;
                for (std::size_t i = 0; i < t.weights.size(); ++i)
                    acc += t.weights[i] * row[clamp_index(t.start + static_cast<int>(i), img.width)];
                orow[x] = static_cast<float>(acc);
            }
        }
    }
    ImageF out(out_w, out_h, img.channels);
    for (int c = 0; c < img.channels; ++c) {
        const float* src = tmp.plane(c);
        float* dst = out.plane(c);
        for (int y = 0; y < out_h; ++y) {
            const Taps& t = ty[y];
            float* orow = dst + static_cast<std::size_t>(y) * out_w;
            for (int x = 0; x < out_w; ++x) {
                double acc = 0.0;
                for (std::size_t i = 0; i < t.weights.size(); ++i)
                    acc += t.weights[i] *
                           src[static_cast<std::size_t>(clamp_index(t.start + static_cast<int>(i), img.height)) * out_w + x];
                orow[x] = static_cast<float>(acc);
            }
        }
    }
    return out;
}

}  // namespace

double lanczos_weight(double x, int a) {
    if (a < 1) throw std::invalid_argument("lanczos_weight: a must be >= 1");
    const double ax = std::fabs(x);
    if (ax >= static_cast<double>(a)) return 0.0;
    return sinc(x) * sinc(x / a);
}

ImageF downscale2x(const ImageF& img, bool clamp, KernelKind kind) {
    if (img.empty()) throw std::invalid_argument("downscale2x: empty image");
    if (img.width % 2 != 0 || img.height % 2 != 0)
        throw std::invalid_argument("downscale2x: dimensions must be even");
    const int ow = img.width / 2, oh = img.height / 2;
    auto tx = build_taps(ow, img.width, 2.0, 2.0, kind);
    auto ty = build_taps(oh, img.height, 2.0, 2.0, kind);
    ImageF out = resample_axes(img, ow, oh, tx, ty);
    if (clamp) clamp01(out);
    return out;
}

ImageF upscale2x(const ImageF& img, bool clamp, KernelKind kind) {
    if (img.empty()) throw std::invalid_argument("upscale2x: empty image");
    const int ow = img.width * 2, oh = img.height * 2;
    auto tx = build_taps(ow, img.width, 0.5, 1.0, kind);
    auto ty = build_taps(oh, img.height, 0.5, 1.0, kind);
    ImageF out = resample_axes(img, ow, oh, tx, ty);
    if (clamp) clamp01(out);
    return out;
}

ImageF gaussian_blur(const ImageF& img, double sigma) {
    if (img.empty()) throw std::invalid_argument("gaussian_blur: empty image");
    if (sigma <= 0.0) throw std::invalid_argument("gaussian_blur: sigma must be positive");
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kd(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-0.5 * (i / sigma) * (i / sigma));
        kd[static_cast<std::size_t>(i + radius)] = v;
        sum += v;
    }
    Taps t;
    t.weights.resize(kd.size());
    for (std::size_t i = 0; i < kd.size(); ++i) t.weights[i] = static_cast<float>(kd[i] / sum);

    std::vector<Taps> tx(static_cast<std::size_t>(img.width));
    for (int x = 0; x < img.width; ++x) {
        tx[static_cast<std::size_t>(x)] = t;
        tx[static_cast<std::size_t>(x)].start = x - radius;
    }
    std::vector<Taps> ty(static_cast<std::size_t>(img.height));
    for (int y = 0; y < img.height; ++y) {
        ty[static_cast<std::size_t>(y)] = t;
        ty[static_cast<std::size_t>(y)].start = y - radius;
    }
    return resample_axes(img, img.width, img.height, tx, ty);
}

ImageF unsharp_mask(const ImageF& img, double lambda, double sigma) {
    if (lambda < 0.0) throw std::invalid_argument("unsharp_mask: lambda must be non-negative");
    ImageF blurred = gaussian_blur(img, sigma);
    ImageF out(img.width, img.height, img.channels);
    const float l = static_cast<float>(lambda);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        out.data[i] = img.data[i] + l * (img.data[i] - blurred.data[i]);
    clamp01(out);
    return out;
}

}  // namespace rts
