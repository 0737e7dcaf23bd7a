#pragma once

#include <string>

#include "rts/image.hpp"

namespace rts {

/// Binary PPM (P6), maxval 255 only. The reader tolerates whitespace and
/// `#` comments in the header; the writer emits the canonical
/// "P6\n<w> <h>\n255\n" header.
ImageU8 read_ppm(const std::string& path);
void write_ppm(const ImageU8& img, const std::string& path);

}  // namespace rts
