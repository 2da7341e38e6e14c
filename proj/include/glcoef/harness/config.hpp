#pragma once

// Experiment configuration: an INI file with sections [model], [spectral],
// [experiment] and [output]. See docs/config.md for the keys.

#include "glcoef/models.hpp"
#include "glcoef/spectral.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace glcoef::harness {

/// Invalid configuration; the message names the offending key.
class ConfigError : public Error {
public:
    using Error::Error;
};

struct ExperimentConfig {
    // [model]
    std::optional<MatrixModel> model;
    double moment_epsilon = 1.0;

    // [spectral]
    int m = 1024;
    double h = 0.02;
    double s_max = 0.25;
    double eig_tol = 1e-12;
    std::size_t max_iter = 100000;
    int n_quad = 512;
    DerivativeScheme scheme = DerivativeScheme::richardson;

    // [experiment]
    std::vector<double> s_list{0.0};
    std::vector<std::size_t> n_list{64, 256, 1024};
    std::size_t n_mc = 100000;
    double A = 4.0;
    double gamma = 0.25;
    double t_min = -6.0, t_max = 6.0;
    int t_points = 241;
    double t = 0.0; // sandwich threshold
    double x_theta = 0.0;
    double y_theta = 0.0;
    std::string phi = "const"; // const | trig:K
    int n_phi = 1;             // random phi count when phi = trig:K
    double b_tol = 1e-9;
    std::size_t b_max_iter = 10000;
    std::size_t walk_steps = 1000;
    std::size_t check_steps = 2000;
    std::size_t check_reps = 8;
    std::size_t moment_samples = 100000;
    std::uint64_t seed = 1;

    // [output]
    std::filesystem::path out_dir = "out";
    unsigned threads = 0; // 0: GLCOEF_THREADS or hardware concurrency

    const MatrixModel& require_model() const;
    SpectralOptions spectral_options() const;
    unsigned thread_count() const;
};

ExperimentConfig parse_config_string(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

} // namespace glcoef::harness
