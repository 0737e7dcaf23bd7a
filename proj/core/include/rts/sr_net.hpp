#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rts/tensor.hpp"

namespace rts {

struct SRNetConfig {
    int n_residual_layers = 3;
    int body_channels = 64;
    int kernel = 3;
    int upscale = 2;

    bool operator==(const SRNetConfig&) const = default;
};

/// Exact learnable-scalar count for the architecture.
std::int64_t param_count(const SRNetConfig& cfg);

/// Input conv (3->64), N single-conv residual layers (64->64), output conv
/// (64->3) forming the global-residual "blue" point, then channel extension
/// (3->12) and 2x pixel shuffle.
template <typename T>
struct SRNetParams {
    SRNetConfig cfg;
    Tensor<T> input_w, input_b;
    std::vector<Tensor<T>> body_w, body_b;
    Tensor<T> output_w, output_b;
    Tensor<T> ext_w, ext_b;

    std::vector<Tensor<T>*> all() {
        std::vector<Tensor<T>*> p{&input_w, &input_b};
        for (std::size_t i = 0; i < body_w.size(); ++i) {
            p.push_back(&body_w[i]);
            p.push_back(&body_b[i]);
        }
        p.push_back(&output_w);
        p.push_back(&output_b);
        p.push_back(&ext_w);
        p.push_back(&ext_b);
        return p;
    }

    std::vector<const Tensor<T>*> all() const {
        auto& self = const_cast<SRNetParams&>(*this);
        std::vector<const Tensor<T>*> out;
        for (Tensor<T>* t : self.all()) out.push_back(t);
        return out;
    }

    /// Parameter names in checkpoint order, aligned with all().
    std::vector<std::string> names() const {
        std::vector<std::string> n{"input.w", "input.b"};
        for (std::size_t i = 0; i < body_w.size(); ++i) {
            n.push_back("body" + std::to_string(i) + ".w");
            n.push_back("body" + std::to_string(i) + ".b");
        }
        n.insert(n.end(), {"output.w", "output.b", "ext.w", "ext.b"});
        return n;
    }
};

template <typename T>
struct SRForward {
    Tensor<T> blue;  // input resolution, 3 channels, global residual added
    Tensor<T> sr;    // 2x resolution, 3 channels
};

/// He-style fan-in uniform init for input and body convs; output and
/// extension convs zero so the fresh network is the identity enhancement
/// (blue = x, sr = 0).
template <typename T>
SRNetParams<T> init_params(const SRNetConfig& cfg, std::uint64_t seed) {
    if (cfg.n_residual_layers < 1)
        throw std::invalid_argument("init_params: need at least one residual layer");
    const int B = cfg.body_channels, k = cfg.kernel;
    std::mt19937_64 rng(seed);
    auto he_uniform = [&rng](Shape shape, int fan_in) {
        Tensor<T> t(std::move(shape), true);
        const double bound = std::sqrt(6.0 / fan_in);
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (T& v : *t.data) v = static_cast<T>(dist(rng));
        return t;
    };
    SRNetParams<T> p;
    p.cfg = cfg;
    p.input_w = he_uniform({B, 3, k, k}, 3 * k * k);
    p.input_b = Tensor<T>({B}, true);
    for (int i = 0; i < cfg.n_residual_layers; ++i) {
        p.body_w.push_back(he_uniform({B, B, k, k}, B * k * k));
        p.body_b.push_back(Tensor<T>({B}, true));
    }
    p.output_w = Tensor<T>({3, B, k, k}, true);
    p.output_b = Tensor<T>({3}, true);
    p.ext_w = Tensor<T>({3 * cfg.upscale * cfg.upscale, 3, k, k}, true);
    p.ext_b = Tensor<T>({3 * cfg.upscale * cfg.upscale}, true);
    return p;
}

template <typename T>
SRForward<T> forward(const SRNetParams<T>& params, const Tensor<T>& x, Tape<T>* tape = nullptr) {
    if (x.shape.size() != 4 || x.shape[1] != 3)
        throw std::invalid_argument("forward: input must be Nx3xHxW");
    if (x.shape[2] < 3 || x.shape[3] < 3)
        throw std::invalid_argument("forward: spatial extents must be >= 3");
    const int pad = (params.cfg.kernel - 1) / 2;
    Tensor<T> f = relu(conv2d(x, params.input_w, params.input_b, pad, tape), tape);
    for (std::size_t i = 0; i < params.body_w.size(); ++i)
        f = relu(add(f, conv2d(f, params.body_w[i], params.body_b[i], pad, tape), tape), tape);
    Tensor<T> r = conv2d(f, params.output_w, params.output_b, pad, tape);  // no ReLU
    SRForward<T> out;
    out.blue = add(x, r, tape);
    Tensor<T> e = conv2d(out.blue, params.ext_w, params.ext_b, pad, tape);  // no ReLU
    out.sr = pixel_shuffle(e, params.cfg.upscale, tape);
    return out;
}

/// Binary checkpoint: magic "RTSSR1", config + stage as little-endian int32,
/// then each tensor as (name length, name, rank, extents, float32 data).
void save_checkpoint(const SRNetParams<float>& params, int stage, const std::string& path);
SRNetParams<float> load_checkpoint(const std::string& path, int* stage_out = nullptr);
SRNetParams<float> load_checkpoint(const std::string& path, const SRNetConfig& expected,
                                   int* stage_out = nullptr);

}  // namespace rts
