#include "rts/degrade.hpp"

#include <cmath>
#include <stdexcept>

#include "rts/resample.hpp"

namespace rts {
namespace {

// Standard JPEG luminance quantization table (Annex K), row major.
constexpr int kLumaQuant[64] = {
    16, 11, 10, 16, 24,  40,  51,  61,
    12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,
    14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,
    24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101,
    72, 92, 95, 98, 112, 100, 103, 99,
};

struct Dct8Matrix {
    double c[8][8];
    Dct8Matrix() {
        for (int u = 0; u < 8; ++u)
            for (int x = 0; x < 8; ++x) {
                const double a = u == 0 ? 1.0 / std::sqrt(8.0) : 0.5;
                c[u][x] = a * std::cos((2.0 * x + 1.0) * u * M_PI / 16.0);
            }
    }
};

const Dct8Matrix& dct_matrix() {
    static const Dct8Matrix m;
    return m;
}

// coeffs = C * block * C^T
void dct_apply(const std::array<double, 64>& in, std::array<double, 64>& out, bool inverse) {
    const auto& C = dct_matrix().c;
    double tmp[8][8];
    for (int u = 0; u < 8; ++u)
        for (int x = 0; x < 8; ++x) {
            double acc = 0.0;
            for (int k = 0; k < 8; ++k)
                acc += (inverse ? C[k][u] : C[u][k]) * in[static_cast<std::size_t>(k) * 8 + x];
            tmp[u][x] = acc;
        }
    for (int u = 0; u < 8; ++u)
        for (int v = 0; v < 8; ++v) {
            double acc = 0.0;
            for (int k = 0; k < 8; ++k) acc += tmp[u][k] * (inverse ? C[k][v] : C[v][k]);
            out[static_cast<std::size_t>(u) * 8 + v] = acc;
        }
}

void quant_table(int quality, int table[64]) {
    const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
    for (int i = 0; i < 64; ++i) {
        int q = (kLumaQuant[i] * scale + 50) / 100;
        table[i] = q < 1 ? 1 : q;
    }
}

}  // namespace

void dct8_forward(const std::array<double, 64>& block, std::array<double, 64>& coeffs) {
    dct_apply(block, coeffs, false);
}

void dct8_inverse(const std::array<double, 64>& coeffs, std::array<double, 64>& block) {
    dct_apply(coeffs, block, true);
}

ImageF jpeg_surrogate(const ImageF& img, int quality) {
    if (quality < 1 || quality > 100)
        throw std::invalid_argument("jpeg_surrogate: quality must be in [1, 100]");
    if (img.empty()) throw std::invalid_argument("jpeg_surrogate: empty image");

    int table[64];
    quant_table(quality, table);

    const int pw = (img.width + 7) / 8 * 8;
    const int ph = (img.height + 7) / 8 * 8;
    ImageF out(img.width, img.height, img.channels);

    std::array<double, 64> block, coeffs;
    for (int c = 0; c < img.channels; ++c) {
        for (int by = 0; by < ph; by += 8) {
            for (int bx = 0; bx < pw; bx += 8) {
                for (int y = 0; y < 8; ++y)
                    for (int x = 0; x < 8; ++x) {
                        const int sy = std::min(by + y, img.height - 1);
                        const int sx = std::min(bx + x, img.width - 1);
                        block[static_cast<std::size_t>(y) * 8 + x] =
                            img.at(c, sy, sx) * 255.0 - 128.0;
                    }
                dct8_forward(block, coeffs);
                for (int i = 0; i < 64; ++i)
                    coeffs[static_cast<std::size_t>(i)] =
                        std::round(coeffs[static_cast<std::size_t>(i)] / table[i]) * table[i];
                dct8_inverse(coeffs, block);
                for (int y = 0; y < 8 && by + y < img.height; ++y)
                    for (int x = 0; x < 8 && bx + x < img.width; ++x) {
                        double v = (block[static_cast<std::size_t>(y) * 8 + x] + 128.0) / 255.0;
                        out.at(c, by + y, bx + x) =
                            static_cast<float>(v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v));
                    }
            }
        }
    }
    return out;
}

ImageF make_lr(const ImageF& hr, const DegradeConfig& cfg) {
    if (hr.width % 2 != 0 || hr.height % 2 != 0)
        throw std::invalid_argument("make_lr: dimensions must be even");
    if (!cfg.enabled) return downscale2x(hr);
    if (cfg.order == DegradeOrder::compress_then_downscale)
        return downscale2x(jpeg_surrogate(hr, cfg.quality));
    return jpeg_surrogate(downscale2x(hr), cfg.quality);
}

}  // namespace rts
