#include "rts/patches.hpp"

#include <random>
#include <stdexcept>

namespace rts {
namespace {

ImageF crop(const ImageF& img, int x0, int y0, int size) {
    ImageF out(size, size, img.channels);
    for (int c = 0; c < img.channels; ++c)
        for (int y = 0; y < size; ++y)
            for (int x = 0; x < size; ++x)
                out.at(c, y, x) = img.at(c, y0 + y, x0 + x);
    return out;
}

}  // namespace

std::vector<ImageF> extract_patches(const ImageF& img, int size, int count, std::uint64_t seed) {
    if (size <= 0 || count <= 0) throw std::invalid_argument("extract_patches: size and count must be positive");
    if (img.width < size || img.height < size)
        throw std::invalid_argument("extract_patches: image " + std::to_string(img.width) + "x" +
                                    std::to_string(img.height) + " smaller than patch size " +
                                    std::to_string(size));
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dx(0, img.width - size);
    std::uniform_int_distribution<int> dy(0, img.height - size);
    std::vector<ImageF> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        const int x0 = dx(rng);
        const int y0 = dy(rng);
        out.push_back(crop(img, x0, y0, size));
    }
    return out;
}

ImageF center_crop(const ImageF& img, int size) {
    if (img.width < size || img.height < size)
        throw std::invalid_argument("center_crop: image smaller than crop size");
    return crop(img, (img.width - size) / 2, (img.height - size) / 2, size);
}

}  // namespace rts
