#include <charconv>
#include <fstream>
#include <sstream>

#include "geu/errors.hpp"
#include "geu/experiment.hpp"

namespace geu {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& s) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + s + "'");
    }
}

int to_int(const std::string& key, const std::string& s) {
    int v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ConfigError("config key '" + key + "': expected an integer, got '" + s + "'");
    }
    return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& s) {
    std::uint64_t v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ConfigError("config key '" + key + "': expected an unsigned integer, got '" +
                          s + "'");
    }
    return v;
}

bool to_bool(const std::string& key, const std::string& s) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError("config key '" + key + "': expected a boolean, got '" + s + "'");
}

std::vector<double> to_double_list(const std::string& key, const std::string& s) {
    std::vector<double> out;
    for (const auto& item : split_list(s)) out.push_back(to_double(key, item));
    return out;
}

std::vector<int> to_int_list(const std::string& key, const std::string& s) {
    std::vector<int> out;
    for (const auto& item : split_list(s)) out.push_back(to_int(key, item));
    return out;
}

}  // namespace

MethodSpec parse_method(const std::string& name) {
    MethodSpec spec;
    spec.name = name;
    if (name == "LDA") {
        spec.base = Method::Lda;
    } else if (name == "RLDA") {
        spec.base = Method::Lda;
        spec.rlda = true;
    } else if (name == "MFA") {
        spec.base = Method::Mfa;
    } else if (name == "GEU-LDA-U" || name == "GEU-LDA-S") {
        spec.base = Method::Lda;
        spec.uncertainty = name.back() == 'U' ? MethodSpec::Uncertainty::Unsupervised
                                              : MethodSpec::Uncertainty::Supervised;
    } else if (name == "GEU-MFA-U" || name == "GEU-MFA-S") {
        spec.base = Method::Mfa;
        spec.uncertainty = name.back() == 'U' ? MethodSpec::Uncertainty::Unsupervised
                                              : MethodSpec::Uncertainty::Supervised;
    } else {
        throw ConfigError("unknown method '" + name +
                          "' (expected LDA, RLDA, MFA, GEU-LDA-U, GEU-LDA-S, "
                          "GEU-MFA-U or GEU-MFA-S)");
    }
    return spec;
}

ExperimentConfig parse_config_string(const std::string& text, const std::string& origin) {
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected key = value, got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "dataset") cfg.dataset = value;
        else if (key == "label_column") cfg.label_column = value;
        else if (key == "drop_columns") cfg.drop_columns = split_list(value);
        else if (key == "delimiter") cfg.delimiter = value;
        else if (key == "has_header") cfg.has_header = to_bool(key, value);
        else if (key == "standardize") cfg.standardize = to_bool(key, value);
        else if (key == "stratified") cfg.stratified = to_bool(key, value);
        else if (key == "noise_on_test") cfg.noise_on_test = to_bool(key, value);
        else if (key == "methods") cfg.methods = split_list(value);
        else if (key == "sigma_grid") cfg.sigma_grid = to_double_list(key, value);
        else if (key == "d_grid") cfg.d_grid = to_int_list(key, value);
        else if (key == "k_grid") cfg.k_grid = to_int_list(key, value);
        else if (key == "rlda_ridge_grid") cfg.rlda_ridge_grid = to_double_list(key, value);
        else if (key == "k1") cfg.k1 = to_int(key, value);
        else if (key == "k2") cfg.k2 = to_int(key, value);
        else if (key == "noise_levels") cfg.noise_levels = to_double_list(key, value);
        else if (key == "folds") cfg.folds = to_int(key, value);
        else if (key == "inner_folds") cfg.inner_folds = to_int(key, value);
        else if (key == "repeats") cfg.repeats = to_int(key, value);
        else if (key == "seed") cfg.seed = to_u64(key, value);
        else if (key == "threads") cfg.threads = to_int(key, value);
        else if (key == "floor") cfg.floor = value;
        else if (key == "train_sizes") cfg.train_sizes = to_int_list(key, value);
        else if (key == "fit_method") cfg.fit_method = value;
        else if (key == "fit_sigma") cfg.fit_sigma = to_double(key, value);
        else if (key == "fit_d") cfg.fit_d = to_int(key, value);
        else if (key == "model_path") cfg.model_path = value;
        else if (key == "uncertainty_estimator") cfg.uncertainty_estimator = value;
        else if (key == "uncertainty_sigma") cfg.uncertainty_sigma = to_double(key, value);
        else if (key == "boundary_points") cfg.boundary_points = to_int(key, value);
        else if (key == "boundary_separation") cfg.boundary_separation = to_double(key, value);
        else if (key == "boundary_spread") cfg.boundary_spread = to_double(key, value);
        else if (key == "boundary_sigma") cfg.boundary_sigma = to_double(key, value);
        else if (key == "boundary_estimator") cfg.boundary_estimator = value;
        else if (key == "boundary_m") cfg.boundary_m = to_int_list(key, value);
        else if (key == "boundary_resolution") cfg.boundary_resolution = to_int(key, value);
        else if (key == "boundary_k") cfg.boundary_k = to_int(key, value);
        else if (key == "boundary_d") cfg.boundary_d = to_int(key, value);
        else {
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": unknown config key '" + key + "'");
        }
    }

    // Structural checks that do not need the dataset.
    if (cfg.methods.empty()) throw ConfigError("methods list is empty");
    for (const auto& m : cfg.methods) parse_method(m);
    if (cfg.sigma_grid.empty()) throw ConfigError("sigma_grid is empty");
    if (cfg.d_grid.empty()) throw ConfigError("d_grid is empty");
    if (cfg.k_grid.empty()) throw ConfigError("k_grid is empty");
    if (cfg.rlda_ridge_grid.empty()) throw ConfigError("rlda_ridge_grid is empty");
    if (cfg.noise_levels.empty()) throw ConfigError("noise_levels is empty");
    for (double s : cfg.sigma_grid) {
        if (s < 0) throw ConfigError("sigma_grid entries must be nonnegative");
    }
    for (int d : cfg.d_grid) {
        if (d < 1) throw ConfigError("d_grid entries must be positive");
    }
    for (int k : cfg.k_grid) {
        if (k < 1) throw ConfigError("k_grid entries must be positive");
    }
    for (double v : cfg.noise_levels) {
        if (v < 0) throw ConfigError("noise_levels entries must be nonnegative");
    }
    if (cfg.folds < 2) throw ConfigError("folds must be >= 2");
    if (cfg.inner_folds < 2) throw ConfigError("inner_folds must be >= 2");
    if (cfg.repeats < 1) throw ConfigError("repeats must be >= 1");
    if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
    if (cfg.k1 < 1 || cfg.k2 < 1) throw ConfigError("k1 and k2 must be positive");
    if (cfg.delimiter.size() != 1) throw ConfigError("delimiter must be one character");
    if (cfg.floor != "auto") to_double("floor", cfg.floor);
    if (cfg.uncertainty_estimator != "supervised" &&
        cfg.uncertainty_estimator != "unsupervised") {
        throw ConfigError("uncertainty_estimator must be supervised or unsupervised");
    }
    if (cfg.boundary_estimator != "supervised" &&
        cfg.boundary_estimator != "unsupervised") {
        throw ConfigError("boundary_estimator must be supervised or unsupervised");
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_string(buf.str(), path);
}

}  // namespace geu
