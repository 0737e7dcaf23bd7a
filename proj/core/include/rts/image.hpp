#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rts/tensor.hpp"

namespace rts {

/// 8-bit interchange image, interleaved RGB.
struct ImageU8 {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // 3 * width * height

    ImageU8() = default;
    ImageU8(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(3) * w * h, 0) {}
};

/// Floating-point working image in [0,1] (values may leave the range on
/// unclamped intermediates), planar CHW layout.
struct ImageF {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<float> data;

    ImageF() = default;
    ImageF(int w, int h, int c)
        : width(w), height(h), channels(c),
          data(static_cast<std::size_t>(c) * w * h, 0.0f) {}

    float& at(int c, int y, int x) {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    float at(int c, int y, int x) const {
        return data[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    float* plane(int c) { return data.data() + static_cast<std::size_t>(c) * height * width; }
    const float* plane(int c) const { return data.data() + static_cast<std::size_t>(c) * height * width; }
    bool empty() const { return width == 0 || height == 0 || channels == 0; }
};

inline ImageF to_float(const ImageU8& img) {
    ImageF out(img.width, img.height, 3);
    const std::size_t px = static_cast<std::size_t>(img.width) * img.height;
    for (std::size_t i = 0; i < px; ++i)
        for (int c = 0; c < 3; ++c)
            out.data[static_cast<std::size_t>(c) * px + i] = static_cast<float>(img.data[i * 3 + c]) / 255.0f;
    return out;
}

inline ImageU8 to_u8(const ImageF& img) {
    if (img.channels != 3) throw std::invalid_argument("to_u8: expected 3-channel image");
    ImageU8 out(img.width, img.height);
    const std::size_t px = static_cast<std::size_t>(img.width) * img.height;
    for (std::size_t i = 0; i < px; ++i)
        for (int c = 0; c < 3; ++c) {
            float v = img.data[static_cast<std::size_t>(c) * px + i];
            v = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
            out.data[i * 3 + c] = static_cast<std::uint8_t>(v * 255.0f + 0.5f);
        }
    return out;
}

/// 1xCxHxW tensor view of an image (copy).
inline Tensor<float> image_to_tensor(const ImageF& img) {
    return Tensor<float>::from_data({1, img.channels, img.height, img.width}, img.data);
}

inline ImageF tensor_to_image(const Tensor<float>& t) {
    if (t.shape.size() != 4 || t.shape[0] != 1)
        throw std::invalid_argument("tensor_to_image: expected 1xCxHxW tensor");
    ImageF img(t.shape[3], t.shape[2], t.shape[1]);
    img.data = *t.data;
    return img;
}

inline void clamp01(ImageF& img) {
    for (float& v : img.data) v = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
}

}  // namespace rts
