#pragma once

// Exponential change of measure. Paths are drawn under mu and reweighted by
//   q_n^s = e^{s S_n} r_s(x_n) / (kappa(s)^n r_s(x_0)),
// so E_mu[q_n^s h] is the expectation of h under the tilted chain Q_s^x.

#include "glcoef/models.hpp"
#include "glcoef/projective.hpp"
#include "glcoef/spectral.hpp"

#include <functional>
#include <string>

namespace glcoef {

struct TiltedPathWeight {
    std::size_t n = 0;
    double log_w = 0.0;
    double w() const noexcept { return std::exp(log_w); }
};

/// Spectral data must come from a d = 2 grid of matching size. x0 and xn are
/// the start and end directions of a walk with cocycle sum S.
TiltedPathWeight path_weight(const SpectralData& spec, const ProjectiveGrid& grid, const ProjectivePoint& x0,
                             const ProjectivePoint& xn, double S, std::size_t n);
TiltedPathWeight path_weight(const SpectralData& spec, const ProjectiveGrid& grid, const ProjectivePoint& x0,
                             const WalkRecord& walk);

/// What a path functional sees at the end of a path.
struct PathView {
    const ProjectivePoint& x0;
    const ProjectivePoint& xn;
    double S;
    std::size_t n;
};

using PathFunctional = std::function<double(const PathView&)>;

enum class SelfNormalize { off, on, automatic }; // automatic: on when n > 50

struct TiltedEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    double mean_weight = 0.0; // plain average of the weights
    double ess = 0.0;         // (sum w)^2 / sum w^2
    std::size_t n_paths = 0;
    bool self_normalized = false;
    bool ess_warning = false; // ess < 0.01 n_paths
    std::string warning;
};

struct TiltOptions {
    SelfNormalize self_normalize = SelfNormalize::automatic;
    unsigned threads = 1;
    std::size_t block = 1024; // paths per RNG substream
};

/// Importance-sampling estimate of E_{Q_s^{x0}}[h]. Path block b uses the
/// stream rng.split(b), so results do not depend on the thread count.
/// Requires n_mc >= 100.
TiltedEstimate expect_tilted(const MatrixModel& model, const SpectralData& spec, const ProjectiveGrid& grid,
                             const ProjectivePoint& x0, const PathFunctional& h, std::size_t n, std::size_t n_mc,
                             const RngStream& rng, const TiltOptions& opts = {});

/// Several functionals over the same paths (one estimate each).
std::vector<TiltedEstimate> expect_tilted_many(const MatrixModel& model, const SpectralData& spec,
                                               const ProjectiveGrid& grid, const ProjectivePoint& x0,
                                               const std::vector<PathFunctional>& hs, std::size_t n,
                                               std::size_t n_mc, const RngStream& rng, const TiltOptions& opts = {});

/// Aggregates log-weights and values. Weights are exponentiated after a max shift.
TiltedEstimate aggregate_weighted(std::span<const double> log_w, std::span<const double> values, bool self_normalize);

/// (Q_s^n h)(x0) computed on the grid: (K^n (r h))(x0) / (kappa^n r(x0)).
double tilted_grid_expectation(const OperatorMatrix& op, const SpectralData& spec, const ProjectiveGrid& grid,
                               std::span<const double> h, std::size_t n, const ProjectivePoint& x0);

} // namespace glcoef
