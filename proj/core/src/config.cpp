#include "rts/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rts {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::runtime_error("config: bad boolean for " + key + ": '" + v + "'");
}

int parse_int(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const int r = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return r;
    } catch (const std::exception&) {
        throw std::runtime_error("config: bad integer for " + key + ": '" + v + "'");
    }
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double r = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return r;
    } catch (const std::exception&) {
        throw std::runtime_error("config: bad number for " + key + ": '" + v + "'");
    }
}

void apply(RTSConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "dataset.train_dir") cfg.train_dir = value;
    else if (key == "dataset.valid_dir") cfg.valid_dir = value;
    else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "patch.size") cfg.patch_size = parse_int(value, key);
    else if (key == "patch.per_image") cfg.patches_per_image = parse_int(value, key);
    else if (key == "degrade.quality") cfg.degrade.quality = parse_int(value, key);
    else if (key == "degrade.enabled") cfg.degrade.enabled = parse_bool(value, key);
    else if (key == "degrade.order") {
        if (value == "compress_then_downscale") cfg.degrade.order = DegradeOrder::compress_then_downscale;
        else if (value == "downscale_then_compress") cfg.degrade.order = DegradeOrder::downscale_then_compress;
        else throw std::runtime_error("config: bad degrade.order '" + value + "'");
    } else if (key == "net.residual_layers") cfg.net.n_residual_layers = parse_int(value, key);
    else if (key == "optim.lr") cfg.lr = parse_double(value, key);
    else if (key == "optim.batch") cfg.batch = parse_int(value, key);
    else if (key == "optim.epochs") cfg.epochs = parse_int(value, key);
    else if (key == "rts.max_stages") cfg.max_stages = parse_int(value, key);
    else if (key == "rts.stop_rule") {
        if (value == "fixed_n") cfg.stop_rule = StopRule::fixed_n;
        else if (value == "delta_min") cfg.stop_rule = StopRule::delta_min;
        else if (value == "delta_rise") cfg.stop_rule = StopRule::delta_rise;
        else throw std::runtime_error("config: bad rts.stop_rule '" + value + "'");
    } else if (key == "rts.warm_start") cfg.warm_start = parse_bool(value, key);
    else if (key == "rts.blue_tap") cfg.blue_tap = parse_bool(value, key);
    else if (key == "report.timing") cfg.record_timing = parse_bool(value, key);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
    else throw std::runtime_error("config: unknown key '" + key + "'");
}

void validate(const RTSConfig& cfg) {
    if (cfg.patch_size <= 0 || cfg.patch_size % 2 != 0)
        throw std::runtime_error("config: patch.size must be positive and even");
    if (cfg.patches_per_image < 1) throw std::runtime_error("config: patch.per_image must be >= 1");
    if (cfg.degrade.quality < 1 || cfg.degrade.quality > 100)
        throw std::runtime_error("config: degrade.quality must be in [1, 100]");
    if (cfg.net.n_residual_layers < 1)
        throw std::runtime_error("config: net.residual_layers must be >= 1");
    if (cfg.batch < 1) throw std::runtime_error("config: optim.batch must be >= 1");
    if (cfg.epochs < 0) throw std::runtime_error("config: optim.epochs must be >= 0");
    if (cfg.max_stages < 1) throw std::runtime_error("config: rts.max_stages must be >= 1");
}

}  // namespace

RTSConfig parse_experiment_config_text(const std::string& text) {
    RTSConfig cfg;
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: missing '=' on line " + std::to_string(line_no));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw std::runtime_error("config: empty key on line " + std::to_string(line_no));
        apply(cfg, key, value);
    }
    validate(cfg);
    return cfg;
}

RTSConfig parse_experiment_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_experiment_config_text(ss.str());
}

}  // namespace rts
