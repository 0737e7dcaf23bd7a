#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "rts/config.hpp"
#include "rts/fixed_point.hpp"
#include "rts/metrics.hpp"
#include "rts/ppm.hpp"
#include "rts/resample.hpp"
#include "rts/rts.hpp"
#include "rts/sr_net.hpp"

namespace {

int cmd_run(const std::string& config_path) {
    const rts::RTSConfig cfg = rts::parse_experiment_config(config_path);
    const rts::RTSResult result = rts::run_rts(cfg);
    std::printf("stage  loss          dr_pct    delta_pct alpha_hat\n");
    for (const auto& r : result.stages)
        std::printf("%-6d %-13.6g %-9.4f %-9.4f %-9.4f\n", r.stage, r.loss, r.diff_ratio_pct,
                    r.delta_pct, r.alpha_hat);
    std::printf("selected stage: %d\n", result.selected_stage);
    std::printf("report: %s/stages.csv\n", cfg.out_dir.c_str());
    if (result.stages.size() >= 3) {
        try {
            rts::write_theory_comparison(result.stages, cfg.out_dir + "/theory.csv");
            std::printf("theory comparison: %s/theory.csv\n", cfg.out_dir.c_str());
        } catch (const std::invalid_argument&) {
            // degenerate DR sequence, no fit to report
        }
    }
    return 0;
}

int cmd_enhance(const std::string& ckpt, const std::string& in_path, const std::string& out_path,
                bool blue_tap) {
    const rts::SRNetParams<float> params = rts::load_checkpoint(ckpt);
    const rts::ImageF in = rts::to_float(rts::read_ppm(in_path));
    const rts::ImageF out = rts::enhance_image(params, in, blue_tap);
    rts::write_ppm(rts::to_u8(out), out_path);
    std::printf("enhanced %s -> %s (%dx%d)\n", in_path.c_str(), out_path.c_str(), out.width,
                out.height);
    return 0;
}

int cmd_metrics(const std::string& a_path, const std::string& b_path) {
    const rts::ImageF a = rts::to_float(rts::read_ppm(a_path));
    const rts::ImageF b = rts::to_float(rts::read_ppm(b_path));
    std::printf("dr_pct      %.6f\n", rts::image_difference_ratio(a, b));
    std::printf("mse         %.8g\n", rts::mse(a, b));
    const auto p = rts::psnr(a, b);
    if (p) std::printf("psnr_db     %.4f\n", *p);
    else std::printf("psnr_db     identical\n");
    std::printf("sharpness_a %.8g\n", rts::sharpness_proxy(a));
    std::printf("sharpness_b %.8g\n", rts::sharpness_proxy(b));
    return 0;
}

int cmd_fixedpoint(double alpha, int n) {
    double cumulative = 0.0;
    for (int i = 1; i <= n; ++i) {
        const double inc = std::pow(alpha, i);
        cumulative += inc;
        std::printf("stage %d: increment %.6f cumulative %.6f\n", i, inc, cumulative);
    }
    std::printf("limit: %.6f\n", rts::fixed_point_limit(0.0, -1.0, alpha));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Recurrently-trained super-resolution image enhancement"};
    app.require_subcommand(1);

    std::string config_path, ckpt, in_path, out_path, a_path, b_path;
    bool blue_tap = false;
    double alpha = 0.5;
    int n_stages = 4;

    auto* run = app.add_subcommand("run", "run the full stage loop from a config file");
    run->add_option("config", config_path, "experiment config file")->required();

    auto* enhance = app.add_subcommand("enhance", "one-shot enhancement of a single image");
    enhance->add_option("checkpoint", ckpt, "trained network checkpoint")->required();
    enhance->add_option("input", in_path, "input .ppm")->required();
    enhance->add_option("output", out_path, "output .ppm")->required();
    enhance->add_flag("--blue-tap", blue_tap, "tap the input-resolution output directly");

    auto* metrics = app.add_subcommand("metrics", "difference and quality metrics of two images");
    metrics->add_option("a", a_path, "image to measure (.ppm)")->required();
    metrics->add_option("b", b_path, "reference image (.ppm)")->required();

    auto* fixedpoint = app.add_subcommand("fixedpoint", "geometric convergence trajectory");
    fixedpoint->add_option("alpha", alpha, "contraction factor in [0,1)")->required();
    fixedpoint->add_option("n", n_stages, "number of stages")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*run) return cmd_run(config_path);
        if (*enhance) return cmd_enhance(ckpt, in_path, out_path, blue_tap);
        if (*metrics) return cmd_metrics(a_path, b_path);
        if (*fixedpoint) return cmd_fixedpoint(alpha, n_stages);
        return 1;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::overflow_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
