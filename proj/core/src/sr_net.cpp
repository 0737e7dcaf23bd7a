#include "rts/sr_net.hpp"

#include <cstring>
#include <fstream>

namespace rts {
namespace {

constexpr char kMagic[6] = {'R', 'T', 'S', 'S', 'R', '1'};

void put_i32(std::ostream& os, std::int32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((static_cast<std::uint32_t>(v) >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 4);
}

std::int32_t get_i32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw std::runtime_error("corrupt checkpoint: truncated file");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return static_cast<std::int32_t>(v);
}

void put_f32_le(std::ostream& os, const std::vector<float>& data) {
    static_assert(sizeof(float) == 4);
    // little-endian host assumed; asserted at load via the magic round-trip tests
    os.write(reinterpret_cast<const char*>(data.data()),
             static_cast<std::streamsize>(data.size() * 4));
}

}  // namespace

std::int64_t param_count(const SRNetConfig& cfg) {
    const std::int64_t k2 = static_cast<std::int64_t>(cfg.kernel) * cfg.kernel;
    const std::int64_t B = cfg.body_channels;
    const std::int64_t E = 3LL * cfg.upscale * cfg.upscale;
    std::int64_t n = 3 * B * k2 + B;                                  // input conv
    n += cfg.n_residual_layers * (B * B * k2 + B);                    // body convs
    n += B * 3 * k2 + 3;                                              // output conv
    n += 3 * E * k2 + E;                                              // extension conv
    return n;
}

void save_checkpoint(const SRNetParams<float>& params, int stage, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path);
    os.write(kMagic, sizeof(kMagic));
    put_i32(os, params.cfg.n_residual_layers);
    put_i32(os, params.cfg.body_channels);
    put_i32(os, params.cfg.kernel);
    put_i32(os, params.cfg.upscale);
    put_i32(os, stage);
    auto& self = const_cast<SRNetParams<float>&>(params);
    const auto names = params.names();
    auto tensors = self.all();
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        const Tensor<float>& t = *tensors[i];
        put_i32(os, static_cast<std::int32_t>(names[i].size()));
        os.write(names[i].data(), static_cast<std::streamsize>(names[i].size()));
        put_i32(os, static_cast<std::int32_t>(t.shape.size()));
        for (int e : t.shape) put_i32(os, e);
        put_f32_le(os, *t.data);
    }
    if (!os) throw std::runtime_error("checkpoint write failed: " + path);
}

SRNetParams<float> load_checkpoint(const std::string& path, int* stage_out) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[sizeof(kMagic)];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("bad checkpoint magic: " + path);
    SRNetConfig cfg;
    cfg.n_residual_layers = get_i32(is);
    cfg.body_channels = get_i32(is);
    cfg.kernel = get_i32(is);
    cfg.upscale = get_i32(is);
    const int stage = get_i32(is);
    if (cfg.n_residual_layers < 1 || cfg.body_channels < 1 || cfg.kernel < 1 || cfg.upscale < 1)
        throw std::runtime_error("corrupt checkpoint: bad config");

    SRNetParams<float> params = init_params<float>(cfg, 0);
    const auto names = params.names();
    auto tensors = params.all();
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        const std::int32_t name_len = get_i32(is);
        if (name_len < 0 || name_len > 256) throw std::runtime_error("corrupt checkpoint: bad name length");
        std::string name(static_cast<std::size_t>(name_len), '\0');
        is.read(name.data(), name_len);
        if (!is || name != names[i])
            throw std::runtime_error("corrupt checkpoint: unexpected tensor name '" + name + "'");
        const std::int32_t rank = get_i32(is);
        if (rank != static_cast<std::int32_t>(tensors[i]->shape.size()))
            throw std::runtime_error("corrupt checkpoint: rank mismatch for " + name);
        for (int e : tensors[i]->shape)
            if (get_i32(is) != e) throw std::runtime_error("corrupt checkpoint: extent mismatch for " + name);
        is.read(reinterpret_cast<char*>(tensors[i]->data->data()),
                static_cast<std::streamsize>(tensors[i]->data->size() * 4));
        if (!is) throw std::runtime_error("corrupt checkpoint: truncated tensor data for " + name);
    }
    if (stage_out) *stage_out = stage;
    return params;
}

SRNetParams<float> load_checkpoint(const std::string& path, const SRNetConfig& expected,
                                   int* stage_out) {
    SRNetParams<float> params = load_checkpoint(path, stage_out);
    if (!(params.cfg == expected))
        throw std::runtime_error("checkpoint config mismatch: file has " +
                                 std::to_string(params.cfg.n_residual_layers) +
                                 " residual layers, expected " +
                                 std::to_string(expected.n_residual_layers));
    return params;
}

}  // namespace rts
