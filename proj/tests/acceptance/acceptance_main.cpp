// End-to-end acceptance suite. Each criterion prints one [PASS]/[FAIL] line;
// the exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rts/degrade.hpp"
#include "rts/fixed_point.hpp"
#include "rts/metrics.hpp"
#include "rts/ppm.hpp"
#include "rts/resample.hpp"
#include "rts/rts.hpp"
#include "rts/sr_net.hpp"
#include "support/test_images.hpp"

using namespace rts;
using testsupport::make_constant;
using testsupport::make_natural;
using testsupport::max_relative_fd_error;
using testsupport::random_tensor;

namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int idx, const char* what, bool ok, const std::string& detail = "") {
    std::printf("[%s] criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", idx, what,
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string slurp(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
}

fs::path write_dataset(const std::string& name, int n_images, int w, int h, std::uint64_t seed) {
    const fs::path dir = fs::temp_directory_path() / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    for (int i = 0; i < n_images; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "img_%03d.ppm", i);
        write_ppm(to_u8(make_natural(w, h, seed + static_cast<std::uint64_t>(i))),
                  (dir / buf).string());
    }
    return dir;
}

// --------------------------------------------------------------------------

void criterion_1_param_counts() {
    bool ok = true;
    const std::int64_t expected[] = {40787, 114643, 225427};
    const int layers[] = {1, 3, 6};
    std::ostringstream detail;
    for (int i = 0; i < 3; ++i) {
        SRNetConfig cfg;
        cfg.n_residual_layers = layers[i];
        const std::int64_t formula = param_count(cfg);
        auto p = init_params<float>(cfg, 0);
        std::int64_t enumerated = 0;
        for (const Tensor<float>* t : p.all()) enumerated += t->size();
        ok = ok && formula == expected[i] && enumerated == formula;
        detail << "N=" << layers[i] << ":" << formula << (i < 2 ? " " : "");
    }
    report(1, "parameter counts 40787/114643/225427 match runtime enumeration", ok, detail.str());
}

void criterion_2_gradients() {
    double worst_op = 0.0;

    {  // conv: weight, input and bias grads through an mse head
        auto x = random_tensor<double>({1, 2, 5, 5}, 1, -1.0, 1.0, true);
        auto w = random_tensor<double>({3, 2, 3, 3}, 2, -0.5, 0.5, true);
        auto b = random_tensor<double>({3}, 3, -0.5, 0.5, true);
        auto target = random_tensor<double>({1, 3, 5, 5}, 4);
        Tape<double> tape;
        auto loss = mse_loss(conv2d(x, w, b, 1, &tape), target, &tape);
        tape.backward(loss);
        auto f = [&]() { return mse_loss(conv2d(x, w, b, 1), target).item(); };
        worst_op = std::max(worst_op, max_relative_fd_error(w, *w.grad, f));
        worst_op = std::max(worst_op, max_relative_fd_error(x, *x.grad, f));
        worst_op = std::max(worst_op, max_relative_fd_error(b, *b.grad, f));
    }
    {  // relu away from the kink
        auto x = random_tensor<double>({1, 2, 4, 4}, 5, 0.2, 1.0, true);
        for (std::size_t i = 0; i < x.data->size(); i += 2) (*x.data)[i] *= -1.0;
        auto target = random_tensor<double>({1, 2, 4, 4}, 6);
        Tape<double> tape;
        auto loss = mse_loss(relu(x, &tape), target, &tape);
        tape.backward(loss);
        auto f = [&]() { return mse_loss(relu(x), target).item(); };
        worst_op = std::max(worst_op, max_relative_fd_error(x, *x.grad, f));
    }
    {  // pixel shuffle
        auto x = random_tensor<double>({1, 8, 3, 3}, 7, -1.0, 1.0, true);
        auto target = random_tensor<double>({1, 2, 6, 6}, 8);
        Tape<double> tape;
        auto loss = mse_loss(pixel_shuffle(x, 2, &tape), target, &tape);
        tape.backward(loss);
        auto f = [&]() { return mse_loss(pixel_shuffle(x, 2), target).item(); };
        worst_op = std::max(worst_op, max_relative_fd_error(x, *x.grad, f));
    }
    {  // mse itself
        auto x = random_tensor<double>({1, 3, 4, 4}, 9, -1.0, 1.0, true);
        auto target = random_tensor<double>({1, 3, 4, 4}, 10);
        Tape<double> tape;
        auto loss = mse_loss(x, target, &tape);
        tape.backward(loss);
        auto f = [&]() { return mse_loss(x, target).item(); };
        worst_op = std::max(worst_op, max_relative_fd_error(x, *x.grad, f));
    }

    // end-to-end network at 1x3x8x8, 64-bit
    double worst_net = 0.0;
    {
        SRNetConfig cfg;
        cfg.n_residual_layers = 1;
        cfg.body_channels = 8;
        auto p = init_params<double>(cfg, 17);
        std::mt19937_64 rng(18);
        std::uniform_real_distribution<double> dist(-0.1, 0.1);
        for (Tensor<double>* t : {&p.output_w, &p.output_b, &p.ext_w, &p.ext_b})
            for (double& v : *t->data) v = dist(rng);
        auto x = random_tensor<double>({1, 3, 8, 8}, 19, 0.0, 1.0);
        auto target = random_tensor<double>({1, 3, 16, 16}, 20, 0.0, 1.0);
        Tape<double> tape;
        auto loss = mse_loss(forward(p, x, &tape).sr, target, &tape);
        tape.backward(loss);
        auto f = [&]() { return mse_loss(forward(p, x).sr, target).item(); };
        for (Tensor<double>* t : p.all())
            worst_net = std::max(worst_net, max_relative_fd_error(*t, *t->grad, f));
    }

    char detail[96];
    std::snprintf(detail, sizeof(detail), "per-op max rel err %.2e, network %.2e", worst_op,
                  worst_net);
    report(2, "finite-difference gradient checks (< 1e-4 per-op, < 1e-3 network)",
           worst_op < 1e-4 && worst_net < 1e-3, detail);
}

struct DeskRun {
    RTSResult result;
    std::vector<ImageF> valid_images;
    fs::path out_dir;
    double minutes = 0.0;
    SRNetConfig net;
};

DeskRun criterion_3_desk_run() {
    DeskRun run;
    const fs::path train = write_dataset("rts_acc_train", 20, 160, 160, 5000);
    const fs::path valid = write_dataset("rts_acc_valid", 6, 160, 160, 6000);
    run.out_dir = fs::temp_directory_path() / "rts_acc_out";
    fs::remove_all(run.out_dir);

    RTSConfig cfg;
    cfg.train_dir = train.string();
    cfg.valid_dir = valid.string();
    cfg.out_dir = run.out_dir.string();
    cfg.patch_size = 128;
    cfg.patches_per_image = 6;
    cfg.net.n_residual_layers = 1;
    cfg.epochs = 5;
    cfg.batch = 2;  // small batches buy enough optimizer steps per 5-epoch stage
    cfg.max_stages = 5;
    cfg.seed = 1;
    run.net = cfg.net;

    const auto t0 = std::chrono::steady_clock::now();
    run.result = run_rts(cfg);
    run.minutes = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60.0;

    for (int i = 0; i < 6; ++i)
        run.valid_images.push_back(make_natural(160, 160, 6000 + static_cast<std::uint64_t>(i)));

    const auto& stages = run.result.stages;
    bool nondecreasing = stages.size() == 5;
    for (std::size_t i = 1; i < stages.size(); ++i)
        nondecreasing = nondecreasing && stages[i].diff_ratio_pct >= stages[i - 1].diff_ratio_pct;

    std::size_t min_idx = 0;
    for (std::size_t i = 1; i < stages.size(); ++i)
        if (stages[i].delta_pct < stages[min_idx].delta_pct) min_idx = i;
    const bool interior_min = min_idx + 1 >= 2;

    const double alpha1 = stages.empty() ? -1.0 : stages.front().alpha_hat;
    const bool alpha_ok = alpha1 > 0.0 && alpha1 < 1.0;
    const bool time_ok = run.minutes < 30.0;

    std::ostringstream detail;
    detail.precision(4);
    detail << "DR=[";
    for (std::size_t i = 0; i < stages.size(); ++i)
        detail << stages[i].diff_ratio_pct << (i + 1 < stages.size() ? " " : "");
    detail << "] delta-min stage " << (min_idx + 1) << ", alpha1=" << alpha1 << ", "
           << run.minutes << " min";
    report(3, "desk-scale convergence trend (DR non-decreasing, interior delta min, alpha in (0,1))",
           nondecreasing && interior_min && alpha_ok && time_ok, detail.str());

    fs::remove_all(train);
    fs::remove_all(valid);
    return run;
}

void criterion_4_usm_contrast(const DeskRun& run) {
    const std::vector<double> dr = run_usm_baseline(run.valid_images, 8, 0.5, 1.0);
    std::vector<double> deltas{dr[0]};
    for (std::size_t i = 1; i < dr.size(); ++i) deltas.push_back(dr[i] - dr[i - 1]);

    bool usm_nonshrinking = true;  // delta_k >= 0.8 * delta_2 for k in 3..8
    for (std::size_t k = 3; k <= 8; ++k)
        usm_nonshrinking = usm_nonshrinking && deltas[k - 1] >= 0.8 * deltas[1];

    std::size_t min_idx = 0;
    const auto& stages = run.result.stages;
    for (std::size_t i = 1; i < stages.size(); ++i)
        if (stages[i].delta_pct < stages[min_idx].delta_pct) min_idx = i;
    const bool rts_converging = !stages.empty() && min_idx + 1 < stages.size();

    std::ostringstream detail;
    detail.precision(4);
    detail << "usm deltas=[";
    for (std::size_t i = 0; i < deltas.size(); ++i)
        detail << deltas[i] << (i + 1 < deltas.size() ? " " : "");
    detail << "] rts delta-min stage " << (min_idx + 1) << " of " << stages.size();
    report(4, "usm deltas stay non-shrinking while rts deltas dip before the last stage",
           usm_nonshrinking && rts_converging, detail.str());
}

void criterion_5_fixed_point() {
    bool tail_ok = true;
    for (double alpha = 0.1; alpha < 0.95; alpha += 0.1) {
        const double y = 0.8, y_bar = 0.25;
        const double limit = fixed_point_limit(y, y_bar, alpha);
        for (int n = 0; n <= 50; ++n) {
            const double gap = std::fabs(predict_hr_n(y, y_bar, alpha, n) - limit);
            const double bound = std::pow(alpha, n + 1) * std::fabs(y - y_bar) / (1.0 - alpha);
            tail_ok = tail_ok && gap <= bound + 1e-12;
        }
    }

    std::vector<double> planted;
    for (int n = 1; n <= 8; ++n) planted.push_back(1.7 * (1.0 - std::pow(0.62, n)));
    const AlphaFit recovered = fit_geometric_dr(planted);
    const bool fit_ok = std::fabs(recovered.alpha - 0.62) < 1e-6;

    const AlphaFit measured = fit_geometric_dr({0.95, 1.35, 1.47, 1.48});
    const bool measured_ok = measured.alpha > 0.0 && measured.alpha < 1.0;

    char detail[96];
    std::snprintf(detail, sizeof(detail), "recovered alpha %.8f, measured-sequence alpha %.4f",
                  recovered.alpha, measured.alpha);
    report(5, "fixed-point tail bound, model recovery and measured-sequence fit",
           tail_ok && fit_ok && measured_ok, detail);
}

void criterion_6_resampler() {
    bool unity_ok = true;
    for (KernelKind kind : {KernelKind::lanczos3, KernelKind::bilinear, KernelKind::nearest}) {
        const ImageF c = make_constant(32, 30, 0.6f);
        for (float v : downscale2x(c, false, kind).data) unity_ok = unity_ok && std::fabs(v - 0.6f) < 1e-6;
        for (float v : upscale2x(c, false, kind).data) unity_ok = unity_ok && std::fabs(v - 0.6f) < 1e-6;
    }

    bool zeros_ok = lanczos_weight(0.0, 3) == 1.0;
    for (int k = 1; k <= 5; ++k) zeros_ok = zeros_ok && std::fabs(lanczos_weight(k, 3)) < 1e-12;

    bool linear_ok = true;
    {
        const ImageF a = make_natural(40, 36, 61);
        const ImageF b = make_natural(40, 36, 62);
        ImageF combo(40, 36, 3);
        for (std::size_t i = 0; i < combo.data.size(); ++i)
            combo.data[i] = 0.7f * a.data[i] - 0.4f * b.data[i];
        const ImageF da = downscale2x(a, false);
        const ImageF db = downscale2x(b, false);
        const ImageF dc = downscale2x(combo, false);
        for (std::size_t i = 0; i < dc.data.size(); ++i)
            linear_ok = linear_ok && std::fabs(dc.data[i] - (0.7f * da.data[i] - 0.4f * db.data[i])) < 1e-6;
    }

    double worst_mae = 0.0;
    for (std::uint64_t seed : {71u, 72u, 73u, 74u}) {
        const ImageF img = make_natural(64, 64, seed);
        const ImageF back = downscale2x(upscale2x(img));
        double acc = 0.0;
        for (std::size_t i = 0; i < img.data.size(); ++i)
            acc += std::fabs(back.data[i] - img.data[i]);
        worst_mae = std::max(worst_mae, acc / static_cast<double>(img.data.size()));
    }

    char detail[64];
    std::snprintf(detail, sizeof(detail), "worst D(U(x)) MAE %.5f", worst_mae);
    report(6, "resampler partition of unity, kernel zeros, linearity and D(U(x)) identity",
           unity_ok && zeros_ok && linear_ok && worst_mae < 0.01, detail);
}

void criterion_7_determinism() {
    // two tiny stage-loop runs with identical config and seed
    const fs::path train = write_dataset("rts_acc_det_train", 4, 48, 48, 300);
    const fs::path valid = write_dataset("rts_acc_det_valid", 2, 48, 48, 400);
    const fs::path out_a = fs::temp_directory_path() / "rts_acc_det_a";
    const fs::path out_b = fs::temp_directory_path() / "rts_acc_det_b";
    fs::remove_all(out_a);
    fs::remove_all(out_b);

    RTSConfig cfg;
    cfg.train_dir = train.string();
    cfg.valid_dir = valid.string();
    cfg.patch_size = 32;
    cfg.patches_per_image = 2;
    cfg.net.n_residual_layers = 1;
    cfg.net.body_channels = 8;
    cfg.epochs = 2;
    cfg.batch = 2;
    cfg.max_stages = 2;
    cfg.record_timing = false;
    cfg.seed = 9;

    cfg.out_dir = out_a.string();
    run_rts(cfg);
    cfg.out_dir = out_b.string();
    run_rts(cfg);

    bool runs_identical = slurp(out_a / "stages.csv") == slurp(out_b / "stages.csv") &&
                          !slurp(out_a / "stages.csv").empty();
    for (int s = 1; s <= 2; ++s) {
        const std::string name = "stage_" + std::to_string(s) + ".ckpt";
        runs_identical = runs_identical && slurp(out_a / name) == slurp(out_b / name) &&
                         !slurp(out_a / name).empty();
    }

    // round-trips
    const fs::path tmp = fs::temp_directory_path() / "rts_acc_rt.ppm";
    ImageU8 img = to_u8(make_natural(31, 17, 55));
    write_ppm(img, tmp.string());
    const std::string ppm_bytes = slurp(tmp);
    write_ppm(read_ppm(tmp.string()), tmp.string());
    const bool ppm_ok = slurp(tmp) == ppm_bytes;
    fs::remove(tmp);

    const fs::path ckpt = fs::temp_directory_path() / "rts_acc_rt.ckpt";
    SRNetConfig net;
    net.body_channels = 8;
    auto params = init_params<float>(net, 5);
    save_checkpoint(params, 2, ckpt.string());
    const std::string ckpt_bytes = slurp(ckpt);
    save_checkpoint(load_checkpoint(ckpt.string()), 2, ckpt.string());
    const bool ckpt_ok = slurp(ckpt) == ckpt_bytes;
    fs::remove(ckpt);

    const int selected =
        select_stage_count({0.95, 0.40, 0.12, 0.01, 0.03, 0.04, 0.07, 0.14}, StopRule::delta_min);

    report(7, "byte-identical reruns, ppm/checkpoint round-trips, stage selection returns 4",
           runs_identical && ppm_ok && ckpt_ok && selected == 4,
           "selected stage " + std::to_string(selected));

    fs::remove_all(train);
    fs::remove_all(valid);
    fs::remove_all(out_a);
    fs::remove_all(out_b);
}

void criterion_8_inference_cost(const DeskRun& run) {
    const auto& stages = run.result.stages;
    if (stages.size() < 2) {
        report(8, "inference cost at the selected stage matches stage 1", false,
               "desk run produced fewer than 2 stages");
        return;
    }
    const int selected = run.result.selected_stage;
    auto p1 = load_checkpoint(stages.front().checkpoint);
    auto pn = load_checkpoint(stages[static_cast<std::size_t>(selected - 1)].checkpoint);

    std::int64_t n1 = 0, nn = 0;
    for (const Tensor<float>* t : p1.all()) n1 += t->size();
    for (const Tensor<float>* t : pn.all()) nn += t->size();

    auto x = random_tensor<float>({1, 3, 64, 64}, 81, 0.0f, 1.0f);
    reset_tensor_op_count();
    forward(p1, x);
    const std::uint64_t ops1 = tensor_op_count();
    reset_tensor_op_count();
    forward(pn, x);
    const std::uint64_t opsn = tensor_op_count();

    char detail[96];
    std::snprintf(detail, sizeof(detail), "stage %d vs 1: params %lld/%lld, forward ops %llu/%llu",
                  selected, static_cast<long long>(nn), static_cast<long long>(n1),
                  static_cast<unsigned long long>(opsn), static_cast<unsigned long long>(ops1));
    report(8, "inference cost at the selected stage matches stage 1",
           n1 == nn && ops1 == opsn && ops1 > 0, detail);
    fs::remove_all(run.out_dir);
}

}  // namespace

int main() {
    criterion_1_param_counts();
    criterion_2_gradients();
    const DeskRun run = criterion_3_desk_run();
    criterion_4_usm_contrast(run);
    criterion_5_fixed_point();
    criterion_6_resampler();
    criterion_7_determinism();
    criterion_8_inference_cost(run);
    std::printf("%d of 8 criteria failed\n", g_failures);
    return g_failures;
}
