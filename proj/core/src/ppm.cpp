#include "rts/ppm.hpp"

#include <fstream>
#include <stdexcept>

namespace rts {
namespace {

// Next header token, skipping whitespace and '#' comments.
std::string next_token(std::istream& is) {
    std::string tok;
    int c;
    while ((c = is.get()) != EOF) {
        if (c == '#') {
            while ((c = is.get()) != EOF && c != '\n') {}
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

int parse_int(const std::string& tok, const char* what) {
    if (tok.empty()) throw std::runtime_error(std::string("truncated PPM header: missing ") + what);
    std::size_t pos = 0;
    int v;
    try {
        v = std::stoi(tok, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error(std::string("bad PPM header field: ") + what);
    }
    if (pos != tok.size()) throw std::runtime_error(std::string("bad PPM header field: ") + what);
    return v;
}

}  // namespace

ImageU8 read_ppm(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    const std::string magic = next_token(is);
    if (magic != "P6")
        throw std::runtime_error("unsupported PPM magic '" + magic + "' in " + path + " (only binary P6)");
    const int w = parse_int(next_token(is), "width");
    const int h = parse_int(next_token(is), "height");
    const int maxval = parse_int(next_token(is), "maxval");
    if (w <= 0 || h <= 0) throw std::runtime_error("bad PPM dimensions in " + path);
    if (maxval != 255) throw std::runtime_error("unsupported PPM depth (maxval " + std::to_string(maxval) + ") in " + path);
    // exactly one whitespace byte separates the header from the payload;
    // next_token has already consumed it
    ImageU8 img(w, h);
    is.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
    if (is.gcount() != static_cast<std::streamsize>(img.data.size()))
        throw std::runtime_error("truncated PPM payload in " + path);
    return img;
}

void write_ppm(const ImageU8& img, const std::string& path) {
    if (img.width <= 0 || img.height <= 0) throw std::invalid_argument("write_ppm: empty image");
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << "P6\n" << img.width << ' ' << img.height << "\n255\n";
    os.write(reinterpret_cast<const char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
    if (!os) throw std::runtime_error("write failed: " + path);
}

}  // namespace rts
