// glcoef <subcommand> <config.ini> [--seed N] [--threads K] [--out DIR]

#include "glcoef/harness/run.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace glcoef::harness;

    CLI::App app{"Edgeworth expansion experiments for products of random matrices"};
    std::string command, config_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::string> out;
    app.add_option("subcommand", command,
                   "check | spectral | bias | walk | edgeworth | berry-esseen | sandwich")
        ->required();
    app.add_option("config", config_path, "INI configuration file")->required()->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "override experiment.seed");
    app.add_option("--threads", threads, "override output.threads");
    app.add_option("--out", out, "override output.dir");
    CLI11_PARSE(app, argc, argv);

    const auto cmd = parse_subcommand(command);
    if (!cmd) {
        std::cerr << "error: unknown subcommand '" << command << "'\n";
        return 64;
    }
    try {
        auto cfg = load_config(config_path);
        if (seed) cfg.seed = *seed;
        if (threads) cfg.threads = *threads;
        if (out) cfg.out_dir = *out;
        return run(cfg, *cmd, std::cout);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 65;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
