#include <benchmark/benchmark.h>

#include <random>

#include "rts/degrade.hpp"
#include "rts/resample.hpp"
#include "rts/sr_net.hpp"

using namespace rts;

namespace {

Tensor<float> random_input(const Shape& shape, std::uint64_t seed, bool requires_grad = false) {
    Tensor<float> t(shape, requires_grad);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> dist(0.0f, 1.0f);
    for (auto& v : *t.data) v = dist(rng);
    return t;
}

ImageF random_image(int w, int h, std::uint64_t seed) {
    ImageF img(w, h, 3);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> dist(0.0f, 1.0f);
    for (auto& v : img.data) v = dist(rng);
    return img;
}

void bench_conv2d_forward(benchmark::State& state) {
    auto x = random_input({1, 64, 64, 64}, 1);
    auto w = random_input({64, 64, 3, 3}, 2);
    auto b = random_input({64}, 3);
    for (auto _ : state) benchmark::DoNotOptimize(conv2d(x, w, b, 1));
}
BENCHMARK(bench_conv2d_forward)->Unit(benchmark::kMillisecond);

void bench_conv2d_train_step(benchmark::State& state) {
    auto x = random_input({1, 64, 64, 64}, 1);
    auto w = random_input({64, 64, 3, 3}, 2, /*requires_grad=*/true);
    auto b = random_input({64}, 3, /*requires_grad=*/true);
    auto target = random_input({1, 64, 64, 64}, 4);
    for (auto _ : state) {
        Tape<float> tape;
        auto loss = mse_loss(conv2d(x, w, b, 1, &tape), target, &tape);
        tape.backward(loss);
        benchmark::DoNotOptimize(loss.item());
    }
}
BENCHMARK(bench_conv2d_train_step)->Unit(benchmark::kMillisecond);

void bench_network_forward(benchmark::State& state) {
    SRNetConfig cfg;
    cfg.n_residual_layers = static_cast<int>(state.range(0));
    auto p = init_params<float>(cfg, 5);
    auto x = random_input({1, 3, 64, 64}, 6);
    for (auto _ : state) benchmark::DoNotOptimize(forward(p, x));
}
BENCHMARK(bench_network_forward)->Arg(1)->Arg(3)->Arg(6)->Unit(benchmark::kMillisecond);

void bench_downscale2x(benchmark::State& state) {
    ImageF img = random_image(512, 512, 7);
    for (auto _ : state) benchmark::DoNotOptimize(downscale2x(img));
}
BENCHMARK(bench_downscale2x)->Unit(benchmark::kMillisecond);

void bench_jpeg_surrogate(benchmark::State& state) {
    ImageF img = random_image(512, 512, 8);
    for (auto _ : state) benchmark::DoNotOptimize(jpeg_surrogate(img, 30));
}
BENCHMARK(bench_jpeg_surrogate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
