#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "rts/degrade.hpp"
#include "rts/resample.hpp"
#include "support/test_images.hpp"

using namespace rts;
using testsupport::make_natural;

namespace {

// Brute-force O(N^4) orthonormal DCT-II.
void ref_dct8(const std::array<double, 64>& block, std::array<double, 64>& coeffs) {
    for (int u = 0; u < 8; ++u)
        for (int v = 0; v < 8; ++v) {
            const double au = u == 0 ? 1.0 / std::sqrt(8.0) : 0.5;
            const double av = v == 0 ? 1.0 / std::sqrt(8.0) : 0.5;
            double acc = 0.0;
            for (int y = 0; y < 8; ++y)
                for (int x = 0; x < 8; ++x)
                    acc += block[static_cast<std::size_t>(y) * 8 + x] *
                           std::cos((2.0 * y + 1.0) * u * M_PI / 16.0) *
                           std::cos((2.0 * x + 1.0) * v * M_PI / 16.0);
            coeffs[static_cast<std::size_t>(u) * 8 + v] = au * av * acc;
        }
}

double mean_abs_error(const ImageF& a, const ImageF& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) acc += std::fabs(a.data[i] - b.data[i]);
    return acc / static_cast<double>(a.data.size());
}

}  // namespace

TEST_CASE("dct8 of a constant block is a pure DC coefficient") {
    std::array<double, 64> block, coeffs;
    block.fill(0.73);
    dct8_forward(block, coeffs);
    CHECK(coeffs[0] == doctest::Approx(8.0 * 0.73).epsilon(1e-9));
    for (int i = 1; i < 64; ++i) CHECK(std::fabs(coeffs[static_cast<std::size_t>(i)]) < 1e-9);
}

TEST_CASE("dct8 round-trips to identity") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(-128.0, 128.0);
    std::array<double, 64> block, coeffs, back;
    for (auto& v : block) v = dist(rng);
    dct8_forward(block, coeffs);
    dct8_inverse(coeffs, back);
    for (int i = 0; i < 64; ++i)
        CHECK(back[static_cast<std::size_t>(i)] == doctest::Approx(block[static_cast<std::size_t>(i)]).epsilon(1e-9));
}

TEST_CASE("dct8 matches the brute-force double-sum oracle") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> dist(-100.0, 100.0);
    std::array<double, 64> block, fast, ref;
    for (auto& v : block) v = dist(rng);
    dct8_forward(block, fast);
    ref_dct8(block, ref);
    for (int i = 0; i < 64; ++i)
        CHECK(fast[static_cast<std::size_t>(i)] == doctest::Approx(ref[static_cast<std::size_t>(i)]).epsilon(1e-9));
}

TEST_CASE("jpeg_surrogate at quality 100 is near-lossless") {
    ImageF img = make_natural(32, 32, 5);
    ImageF out = jpeg_surrogate(img, 100);
    double max_err = 0.0;
    for (std::size_t i = 0; i < img.data.size(); ++i)
        max_err = std::max(max_err, static_cast<double>(std::fabs(out.data[i] - img.data[i])));
    CHECK(max_err <= 2.0 / 255.0);
}

TEST_CASE("jpeg_surrogate keeps constants constant") {
    for (int q : {10, 50, 90}) {
        ImageF c(16, 16, 3);
        std::fill(c.data.begin(), c.data.end(), 0.42f);
        ImageF out = jpeg_surrogate(c, q);
        // DC survives quantization up to one rounding step of the DC quantizer
        const float first = out.data[0];
        for (float v : out.data) CHECK(v == first);
        CHECK(std::fabs(first - 0.42f) < 0.05f);
    }
}

TEST_CASE("jpeg_surrogate distortion is monotone in quality") {
    ImageF img = make_natural(48, 48, 21);
    double prev = std::numeric_limits<double>::infinity();
    for (int q : {10, 30, 50, 70, 90}) {
        const double err = mean_abs_error(jpeg_surrogate(img, q), img);
        CHECK(err <= prev + 1e-12);
        prev = err;
    }
    CHECK(mean_abs_error(jpeg_surrogate(img, 10), img) > mean_abs_error(jpeg_surrogate(img, 90), img));
}

TEST_CASE("jpeg_surrogate rejects out-of-range quality") {
    ImageF img = make_natural(16, 16, 1);
    CHECK_THROWS_AS(jpeg_surrogate(img, 0), std::invalid_argument);
    CHECK_THROWS_AS(jpeg_surrogate(img, 101), std::invalid_argument);
}

TEST_CASE("jpeg_surrogate handles non-multiple-of-8 sizes") {
    ImageF img = make_natural(20, 14, 8);
    ImageF out = jpeg_surrogate(img, 50);
    CHECK(out.width == 20);
    CHECK(out.height == 14);
    for (float v : out.data) {
        CHECK(v >= 0.0f);
        CHECK(v <= 1.0f);
    }
}

TEST_CASE("make_lr halves the size and is deterministic") {
    ImageF hr = make_natural(256, 256, 33);
    DegradeConfig cfg;
    ImageF lr = make_lr(hr, cfg);
    CHECK(lr.width == 128);
    CHECK(lr.height == 128);
    for (float v : lr.data) {
        CHECK(v >= 0.0f);
        CHECK(v <= 1.0f);
    }
    ImageF lr2 = make_lr(hr, cfg);
    CHECK(lr.data == lr2.data);  // bit-identical

    CHECK_THROWS_AS(make_lr(make_natural(15, 16, 1), cfg), std::invalid_argument);
}

TEST_CASE("make_lr bypass and order flags") {
    ImageF hr = make_natural(64, 64, 41);
    DegradeConfig off;
    off.enabled = false;
    ImageF plain = make_lr(hr, off);
    ImageF direct = downscale2x(hr);
    CHECK(plain.data == direct.data);

    DegradeConfig after;
    after.order = DegradeOrder::downscale_then_compress;
    ImageF lr_after = make_lr(hr, after);
    DegradeConfig before;
    ImageF lr_before = make_lr(hr, before);
    CHECK(lr_after.width == 32);
    CHECK(lr_before.width == 32);
    CHECK(lr_after.data != lr_before.data);  // the order genuinely matters
}
