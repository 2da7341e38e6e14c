#pragma once

// Experiment orchestration behind the CLI subcommands. The experiment
// functions are public so that tests and the acceptance suite drive exactly
// the code paths the CLI uses.

#include "glcoef/edgeworth.hpp"
#include "glcoef/harness/config.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace glcoef::harness {

enum class Subcommand { check, spectral, bias, walk, edgeworth, berry_esseen, sandwich };

std::optional<Subcommand> parse_subcommand(const std::string& name);
std::string to_string(Subcommand cmd);

/// Runs one subcommand, writing its CSV into cfg.out_dir and a short summary
/// to `log`. Returns the process exit status.
int run(const ExperimentConfig& cfg, Subcommand cmd, std::ostream& log);

/// Root stream of an experiment: (seed, experiment tag, extra tags...).
RngStream experiment_stream(std::uint64_t seed, std::string_view experiment, std::uint64_t index = 0);

/// The target functions selected by cfg.phi on a grid.
std::vector<GridFunction> config_phis(const ExperimentConfig& cfg, const ProjectiveGrid& grid);

/// Everything the coefficient expansion needs at one tilt.
struct EdgeworthInputs {
    SpectralData spec; // with derivatives
    double b = 0.0;
    double d = 0.0;
    double mass = 1.0;
    std::size_t b_iters = 0;

    EdgeworthParams params(std::size_t n) const;
};

EdgeworthInputs edgeworth_inputs(const MatrixModel& model, double s, const ProjectiveGrid& grid,
                                 const SpectralOptions& opts, const ProjectivePoint& x, const DualPoint& y,
                                 const GridFunction& phi, const BiasOptions& bias = {});

/// Normalized log-coefficients z = (log|<f, G_n v>| - n Lambda') / (sigma sqrt n)
/// at each horizon, with the importance weight times phi(x_n) of every path
/// divided by the mean weight (all ones when s = 0 and phi = 1).
struct CheckpointSamples {
    std::size_t n = 0;
    std::vector<double> z;
    std::vector<double> weight;
    bool unit_weights = true;
    std::size_t degenerate = 0; // paths with delta(x_n, y) = 0
};

std::vector<CheckpointSamples> sample_coefficients(const MatrixModel& model, const EdgeworthInputs& in,
                                                   const ProjectiveGrid& grid, const ProjectivePoint& x,
                                                   const DualPoint& y, const GridFunction& phi,
                                                   const std::vector<std::size_t>& horizons, std::size_t n_mc,
                                                   const RngStream& rng, unsigned threads);

/// ECDF of a checkpoint, mass-weighted when weights are present.
EcdfTable checkpoint_ecdf(const CheckpointSamples& cs);

struct BerryEsseenRow {
    std::string model_id;
    double s = 0.0;
    std::size_t n = 0;
    std::size_t n_mc = 0;
    double ks_phi = 0.0;
    double ks_edgeworth = 0.0;
    double ks_phi_sqrtn = 0.0;
    std::uint64_t seed = 0;
};

/// KS distances of the coefficient ECDF against mass Phi and against the
/// first-order expansion, for every horizon of cfg.n_list and every tilt.
std::vector<BerryEsseenRow> berry_esseen_experiment(const ExperimentConfig& cfg);

} // namespace glcoef::harness
