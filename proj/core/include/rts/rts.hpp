#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "rts/adam.hpp"
#include "rts/degrade.hpp"
#include "rts/image.hpp"
#include "rts/sr_net.hpp"

namespace rts {

enum class StopRule { fixed_n, delta_min, delta_rise };

struct RTSConfig {
    std::string train_dir;
    std::string valid_dir;
    std::string out_dir = "out";
    int patch_size = 256;
    int patches_per_image = 100;
    DegradeConfig degrade;
    SRNetConfig net;
    double lr = 0.001;
    int batch = 8;
    int epochs = 20;
    int max_stages = 8;
    StopRule stop_rule = StopRule::delta_min;
    bool warm_start = true;
    bool blue_tap = false;       // Phase B taps the blue output instead of d(sr)
    bool record_timing = true;   // off: seconds column written as 0 for byte-stable reports
    std::uint64_t seed = 0;
};

struct StageRecord {
    int stage = 0;
    double loss = 0.0;
    double diff_ratio_pct = 0.0;  // DR(HR_n, HR_0) on the validation split
    double delta_pct = 0.0;       // DR_n - DR_{n-1}; DR_0 = 0
    double alpha_hat = 0.0;
    std::string checkpoint;
    double seconds = 0.0;
};

struct RTSResult {
    std::vector<StageRecord> stages;
    int selected_stage = 0;
};

/// Minibatch Adam over mse(forward(lr).sr, target) with a seeded shuffle per
/// epoch; targets stay detached. Returns the mean loss of the final epoch.
template <typename T>
T train_stage(SRNetParams<T>& params,
              const std::vector<std::pair<Tensor<T>, Tensor<T>>>& pairs,
              int epochs, int batch, T lr, std::uint64_t seed);

/// Phase B: enhance each original through the network and downscale back
/// (or tap the blue output directly), clamped to [0,1].
std::vector<ImageF> regenerate_targets(const SRNetParams<float>& params,
                                       const std::vector<ImageF>& originals,
                                       bool blue_tap = false);

/// One-image enhancement, the deployment path of `regenerate_targets`.
ImageF enhance_image(const SRNetParams<float>& params, const ImageF& img, bool blue_tap = false);

/// Stage selection from the delta sequence (deltas[0] = DR_1). delta_min
/// returns the 1-based position of the smallest delta; delta_rise returns the
/// stage just before the first rise; ties toward the smaller index.
int select_stage_count(const std::vector<double>& deltas, StopRule rule);

/// Repeated unsharp masking; returns mean DR(USM^k(y), y) for k = 1..n.
std::vector<double> run_usm_baseline(const std::vector<ImageF>& originals, int n_applications,
                                     double lambda, double sigma);

/// The full stage loop: Phase A / Phase B over max_stages, per-stage metrics,
/// checkpoints and a stages.csv report under cfg.out_dir.
RTSResult run_rts(const RTSConfig& cfg);

// ---------------------------------------------------------------------------

template <typename T>
T train_stage(SRNetParams<T>& params,
              const std::vector<std::pair<Tensor<T>, Tensor<T>>>& pairs,
              int epochs, int batch, T lr, std::uint64_t seed) {
    if (pairs.empty()) throw std::invalid_argument("train_stage: empty pair list");
    if (batch < 1) throw std::invalid_argument("train_stage: batch must be >= 1");
    const Shape lr_shape = pairs.front().first.shape;
    const Shape hr_shape = pairs.front().second.shape;
    for (const auto& [x, y] : pairs) {
        if (x.shape != lr_shape || y.shape != hr_shape)
            throw std::invalid_argument("train_stage: inconsistent shapes in pair list");
        if (y.shape[2] != 2 * x.shape[2] || y.shape[3] != 2 * x.shape[3])
            throw std::invalid_argument("train_stage: target must be 2x the LR size");
    }
    if (epochs <= 0) return T(0);

    auto param_ptrs = params.all();
    AdamState<T> opt;
    opt.lr = lr;
    opt.init(param_ptrs);
    for (Tensor<T>* p : param_ptrs) p->zero_grad();

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    const int C = lr_shape[1], H = lr_shape[2], W = lr_shape[3];
    T final_epoch_loss = T(0);
    for (int epoch = 0; epoch < epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        int n_batches = 0;
        for (std::size_t b0 = 0; b0 < order.size(); b0 += static_cast<std::size_t>(batch)) {
            const int bs = static_cast<int>(std::min<std::size_t>(batch, order.size() - b0));
            Tensor<T> x({bs, C, H, W});
            Tensor<T> y({bs, hr_shape[1], hr_shape[2], hr_shape[3]});
            for (int i = 0; i < bs; ++i) {
                const auto& [px, py] = pairs[order[b0 + static_cast<std::size_t>(i)]];
                std::copy(px.data->begin(), px.data->end(),
                          x.data->begin() + static_cast<std::int64_t>(i) * px.size());
                std::copy(py.data->begin(), py.data->end(),
                          y.data->begin() + static_cast<std::int64_t>(i) * py.size());
            }
            Tape<T> tape;
            auto out = forward(params, x, &tape);
            Tensor<T> loss = mse_loss(out.sr, y, &tape);
            tape.backward(loss);
            adam_step(param_ptrs, opt);
            epoch_loss += static_cast<double>(loss.item());
            ++n_batches;
        }
        final_epoch_loss = static_cast<T>(epoch_loss / n_batches);
    }
    return final_epoch_loss;
}

}  // namespace rts
