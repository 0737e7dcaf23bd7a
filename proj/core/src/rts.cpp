#include "rts/rts.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "rts/metrics.hpp"
#include "rts/patches.hpp"
#include "rts/ppm.hpp"
#include "rts/resample.hpp"

namespace rts {
namespace {

namespace fs = std::filesystem;

std::vector<ImageF> load_dir(const std::string& dir) {
    if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir);
    std::vector<std::string> paths;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".ppm")
            paths.push_back(e.path().string());
    std::sort(paths.begin(), paths.end());
    if (paths.empty()) throw std::runtime_error("no .ppm images in " + dir);
    std::vector<ImageF> out;
    out.reserve(paths.size());
    for (const auto& p : paths) out.push_back(to_float(read_ppm(p)));
    return out;
}

ImageF image_sub(const ImageF& a, const ImageF& b) {
    ImageF out(a.width, a.height, a.channels);
    for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] - b.data[i];
    return out;
}

// Unclamped 2x SR output of one image.
ImageF forward_sr(const SRNetParams<float>& params, const ImageF& img) {
    auto out = forward(params, image_to_tensor(img));
    return tensor_to_image(out.sr);
}

double stage_alpha(const SRNetParams<float>& params, const std::vector<ImageF>& valid,
                   const DegradeConfig& degrade) {
    double acc = 0.0;
    int n = 0;
    for (const ImageF& y : valid) {
        const ImageF x = make_lr(y, degrade);
        const ImageF r_x = image_sub(forward_sr(params, x), upscale2x(x, /*clamp=*/false));
        const ImageF r_y = image_sub(forward_sr(params, y), upscale2x(y, /*clamp=*/false));
        const ImageF r_y_down = downscale2x(r_y, /*clamp=*/false);
        acc += estimate_alpha(r_y_down, r_x).alpha_hat;
        ++n;
    }
    return acc / n;
}

std::string format_record(const StageRecord& r) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%d,%.8f,%.6f,%.6f,%.6f,%.3f", r.stage, r.loss,
                  r.diff_ratio_pct, r.delta_pct, r.alpha_hat, r.seconds);
    return buf;
}

void write_stages_csv(const std::vector<StageRecord>& records, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream os(tmp);
        if (!os) throw std::runtime_error("cannot open " + tmp);
        os << "stage,loss,diff_ratio_pct,delta_pct,alpha_hat,seconds\n";
        for (const StageRecord& r : records) os << format_record(r) << '\n';
        if (!os) throw std::runtime_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("rename failed: " + path);
}

}  // namespace

ImageF enhance_image(const SRNetParams<float>& params, const ImageF& img, bool blue_tap) {
    auto out = forward(params, image_to_tensor(img));
    ImageF result = blue_tap ? tensor_to_image(out.blue) : downscale2x(tensor_to_image(out.sr), false);
    clamp01(result);
    return result;
}

std::vector<ImageF> regenerate_targets(const SRNetParams<float>& params,
                                       const std::vector<ImageF>& originals, bool blue_tap) {
    std::vector<ImageF> out;
    out.reserve(originals.size());
    for (const ImageF& y : originals) out.push_back(enhance_image(params, y, blue_tap));
    return out;
}

int select_stage_count(const std::vector<double>& deltas, StopRule rule) {
    if (deltas.size() < 2)
        throw std::invalid_argument("select_stage_count: need at least 2 deltas");
    const int n = static_cast<int>(deltas.size());
    switch (rule) {
        case StopRule::fixed_n:
            return n;
        case StopRule::delta_min: {
            int best = 0;
            for (int i = 1; i < n; ++i)
                if (deltas[static_cast<std::size_t>(i)] < deltas[static_cast<std::size_t>(best)]) best = i;
            return best + 1;
        }
        case StopRule::delta_rise: {
            for (int k = 1; k < n; ++k)
                if (deltas[static_cast<std::size_t>(k)] > deltas[static_cast<std::size_t>(k - 1)])
                    return k;  // the stage just before divergence
            return n;
        }
    }
    throw std::invalid_argument("select_stage_count: unknown rule");
}

std::vector<double> run_usm_baseline(const std::vector<ImageF>& originals, int n_applications,
                                     double lambda, double sigma) {
    if (n_applications < 2)
        throw std::invalid_argument("run_usm_baseline: need at least 2 applications");
    if (originals.empty()) throw std::invalid_argument("run_usm_baseline: no images");
    std::vector<ImageF> current = originals;
    std::vector<double> dr(static_cast<std::size_t>(n_applications), 0.0);
    for (int k = 0; k < n_applications; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < current.size(); ++i) {
            current[i] = unsharp_mask(current[i], lambda, sigma);
            acc += image_difference_ratio(current[i], originals[i]);
        }
        dr[static_cast<std::size_t>(k)] = acc / static_cast<double>(current.size());
    }
    return dr;
}

RTSResult run_rts(const RTSConfig& cfg) {
    if (cfg.max_stages < 1) throw std::invalid_argument("run_rts: max_stages must be >= 1");
    if (cfg.patch_size % 2 != 0) throw std::invalid_argument("run_rts: patch size must be even");

    fs::create_directories(cfg.out_dir);

    const std::vector<ImageF> train_images = load_dir(cfg.train_dir);
    const std::vector<ImageF> valid_images = load_dir(cfg.valid_dir);

    // HR_0 patches and LR inputs, built once
    std::vector<ImageF> hr0;
    for (std::size_t i = 0; i < train_images.size(); ++i) {
        auto patches = extract_patches(train_images[i], cfg.patch_size, cfg.patches_per_image,
                                       cfg.seed + i);
        hr0.insert(hr0.end(), patches.begin(), patches.end());
    }
    std::vector<Tensor<float>> lr_tensors;
    lr_tensors.reserve(hr0.size());
    for (const ImageF& p : hr0) lr_tensors.push_back(image_to_tensor(make_lr(p, cfg.degrade)));

    std::vector<ImageF> valid0;
    for (const ImageF& v : valid_images) valid0.push_back(center_crop(v, cfg.patch_size));

    std::vector<ImageF> targets = hr0;
    SRNetParams<float> params = init_params<float>(cfg.net, cfg.seed);

    RTSResult result;
    double prev_dr = 0.0;
    for (int stage = 1; stage <= cfg.max_stages; ++stage) {
        const auto t0 = std::chrono::steady_clock::now();
        if (!cfg.warm_start && stage > 1)
            params = init_params<float>(cfg.net, cfg.seed + static_cast<std::uint64_t>(stage));

        std::vector<std::pair<Tensor<float>, Tensor<float>>> pairs;
        pairs.reserve(hr0.size());
        for (std::size_t i = 0; i < hr0.size(); ++i)
            pairs.emplace_back(lr_tensors[i], image_to_tensor(targets[i]));

        StageRecord rec;
        rec.stage = stage;
        rec.loss = train_stage(params, pairs, cfg.epochs, cfg.batch, static_cast<float>(cfg.lr),
                               cfg.seed + 7919ULL * static_cast<std::uint64_t>(stage));
        if (!std::isfinite(rec.loss)) {
            rec.checkpoint = "(aborted: non-finite training loss)";
            result.stages.push_back(rec);
            write_stages_csv(result.stages, cfg.out_dir + "/stages.csv");
            throw std::runtime_error("run_rts: non-finite training loss at stage " +
                                     std::to_string(stage));
        }

        targets = regenerate_targets(params, hr0, cfg.blue_tap);

        const std::vector<ImageF> valid_n = regenerate_targets(params, valid0, cfg.blue_tap);
        double dr_acc = 0.0;
        for (std::size_t i = 0; i < valid0.size(); ++i)
            dr_acc += image_difference_ratio(valid_n[i], valid0[i]);
        rec.diff_ratio_pct = dr_acc / static_cast<double>(valid0.size());
        rec.delta_pct = rec.diff_ratio_pct - prev_dr;
        prev_dr = rec.diff_ratio_pct;
        rec.alpha_hat = stage_alpha(params, valid0, cfg.degrade);

        rec.checkpoint = cfg.out_dir + "/stage_" + std::to_string(stage) + ".ckpt";
        save_checkpoint(params, stage, rec.checkpoint);
        write_ppm(to_u8(valid_n.front()), cfg.out_dir + "/sample_stage_" + std::to_string(stage) + ".ppm");

        if (cfg.record_timing)
            rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.stages.push_back(rec);
    }

    write_stages_csv(result.stages, cfg.out_dir + "/stages.csv");

    if (result.stages.size() < 2) {
        result.selected_stage = 1;
    } else {
        std::vector<double> deltas;
        for (const StageRecord& r : result.stages) deltas.push_back(r.delta_pct);
        result.selected_stage = select_stage_count(deltas, cfg.stop_rule);
    }
    return result;
}

}  // namespace rts
