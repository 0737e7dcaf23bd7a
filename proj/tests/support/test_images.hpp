#pragma once

#include <cmath>
#include <random>

#include "rts/image.hpp"
#include "rts/tensor.hpp"

namespace rts::testsupport {

/// Synthetic photograph-like image: smooth gradients plus seeded soft blobs,
/// edges and mild sinusoid texture. Values kept inside (0, 1).
inline ImageF make_natural(int w, int h, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    const double gx = uni(rng) * 0.4 - 0.2, gy = uni(rng) * 0.4 - 0.2;
    struct Blob { double cx, cy, r, amp; };
    std::vector<Blob> blobs;
    for (int i = 0; i < 12; ++i)
        blobs.push_back({uni(rng) * w, uni(rng) * h, 4.0 + uni(rng) * w * 0.2,
                         (uni(rng) - 0.5) * 0.8});
    struct Edge { double pos, amp; bool vertical; };
    std::vector<Edge> edges;
    for (int i = 0; i < 4; ++i)
        edges.push_back({uni(rng) * (edges.size() % 2 ? h : w), (uni(rng) - 0.5) * 0.5,
                         i % 2 == 0});
    const double fx = 2.0 * M_PI * (1.0 + uni(rng) * 6.0) / w;
    const double fy = 2.0 * M_PI * (1.0 + uni(rng) * 6.0) / h;
    const double tex_amp = 0.04 + uni(rng) * 0.08;
    double chan_shift[3] = {uni(rng) * 0.1, uni(rng) * 0.1, uni(rng) * 0.1};

    ImageF img(w, h, 3);
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double v = 0.5 + gx * (static_cast<double>(x) / w - 0.5) +
                           gy * (static_cast<double>(y) / h - 0.5) + chan_shift[c];
                for (const Blob& b : blobs) {
                    const double d2 = (x - b.cx) * (x - b.cx) + (y - b.cy) * (y - b.cy);
                    v += b.amp * std::exp(-d2 / (2.0 * b.r * b.r));
                }
                for (const Edge& e : edges) {
                    const double d = (e.vertical ? x : y) - e.pos;
                    v += e.amp / (1.0 + std::exp(-d * 1.5));
                }
                v += tex_amp * std::sin(fx * x) * std::sin(fy * y);
                if (v < 0.03) v = 0.03;
                if (v > 0.97) v = 0.97;
                img.at(c, y, x) = static_cast<float>(v);
            }
    return img;
}

inline ImageF make_constant(int w, int h, float value, int channels = 3) {
    ImageF img(w, h, channels);
    std::fill(img.data.begin(), img.data.end(), value);
    return img;
}

template <typename T>
Tensor<T> random_tensor(Shape shape, std::uint64_t seed, T lo = T(-1), T hi = T(1),
                        bool requires_grad = false) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(static_cast<double>(lo), static_cast<double>(hi));
    Tensor<T> t(std::move(shape), requires_grad);
    for (T& v : *t.data) v = static_cast<T>(dist(rng));
    return t;
}

/// Central finite differences of `loss()` w.r.t. every element of `param`,
/// compared against `analytic`. Returns the max relative error, with
/// denominators floored at `floor_scale` to keep near-zero entries sane.
template <typename LossFn>
double max_relative_fd_error(Tensor<double>& param, const std::vector<double>& analytic,
                             LossFn&& loss, double h = 1e-4, double floor_scale = 1e-6) {
    double worst = 0.0;
    for (std::size_t i = 0; i < param.data->size(); ++i) {
        const double orig = (*param.data)[i];
        (*param.data)[i] = orig + h;
        const double lp = loss();
        (*param.data)[i] = orig - h;
        const double lm = loss();
        (*param.data)[i] = orig;
        const double fd = (lp - lm) / (2.0 * h);
        const double denom = std::max({std::fabs(fd), std::fabs(analytic[i]), floor_scale});
        worst = std::max(worst, std::fabs(fd - analytic[i]) / denom);
    }
    return worst;
}

}  // namespace rts::testsupport
