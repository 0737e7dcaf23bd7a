#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rts/tensor.hpp"

namespace rts {

/// Per-parameter Adam moment buffers plus hyperparameters. Buffers are laid
/// out in the same order as the parameter list passed to init().
template <typename T>
struct AdamState {
    T lr = T(0.001);
    T beta1 = T(0.9);
    T beta2 = T(0.999);
    T eps = T(1e-8);
    std::int64_t t = 0;
    std::vector<std::vector<T>> m;
    std::vector<std::vector<T>> v;

    void init(const std::vector<Tensor<T>*>& params) {
        m.clear();
        v.clear();
        for (const Tensor<T>* p : params) {
            m.emplace_back(p->size(), T(0));
            v.emplace_back(p->size(), T(0));
        }
        t = 0;
    }
};

/// One bias-corrected Adam update over all parameters; zeroes grads afterward.
template <typename T>
void adam_step(const std::vector<Tensor<T>*>& params, AdamState<T>& state) {
    if (params.size() != state.m.size())
        throw std::invalid_argument("adam_step: state not initialized for this parameter set");
    if (state.t == std::numeric_limits<std::int64_t>::max())
        throw std::overflow_error("adam_step: step counter overflow");
    state.t += 1;
    const T bc1 = T(1) - static_cast<T>(std::pow(static_cast<double>(state.beta1), static_cast<double>(state.t)));
    const T bc2 = T(1) - static_cast<T>(std::pow(static_cast<double>(state.beta2), static_cast<double>(state.t)));
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        Tensor<T>& p = *params[pi];
        if (!p.tracked()) throw std::invalid_argument("adam_step: parameter has no gradient buffer");
        if (static_cast<std::int64_t>(state.m[pi].size()) != p.size())
            throw std::invalid_argument("adam_step: moment buffer shape mismatch");
        T* w = p.ptr();
        const T* g = p.gptr();
        T* mp = state.m[pi].data();
        T* vp = state.v[pi].data();
        const std::int64_t n = p.size();
        for (std::int64_t i = 0; i < n; ++i) {
            mp[i] = state.beta1 * mp[i] + (T(1) - state.beta1) * g[i];
            vp[i] = state.beta2 * vp[i] + (T(1) - state.beta2) * g[i] * g[i];
            const T mhat = mp[i] / bc1;
            const T vhat = vp[i] / bc2;
            w[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
        }
        p.zero_grad();
    }
}

}  // namespace rts
