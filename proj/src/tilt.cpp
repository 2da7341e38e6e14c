#include "glcoef/tilt.hpp"

#include "glcoef/numeric.hpp"
#include "glcoef/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace glcoef {
namespace {

double r_at(const SpectralData& spec, const ProjectiveGrid& grid, const ProjectivePoint& x) {
    const double r = interpolate(grid, spec.r, x.angle());
    if (!(r > 1e-300)) throw DomainError("interpolated eigenfunction r_s is not positive (corrupt spectral data?)");
    return r;
}

} // namespace

TiltedPathWeight path_weight(const SpectralData& spec, const ProjectiveGrid& grid, const ProjectivePoint& x0,
                             const ProjectivePoint& xn, double S, std::size_t n) {
    if (spec.m != grid.size()) throw DomainError("path_weight: spectral data and grid sizes differ");
    TiltedPathWeight w;
    w.n = n;
    w.log_w = spec.s * S - static_cast<double>(n) * spec.Lambda + std::log(r_at(spec, grid, xn)) -
              std::log(r_at(spec, grid, x0));
    return w;
}

TiltedPathWeight path_weight(const SpectralData& spec, const ProjectiveGrid& grid, const ProjectivePoint& x0,
                             const WalkRecord& walk) {
    return path_weight(spec, grid, x0, walk.x, walk.S, walk.n);
}

TiltedEstimate aggregate_weighted(std::span<const double> log_w, std::span<const double> values, bool self_normalize) {
    if (log_w.size() != values.size()) throw DomainError("aggregate_weighted: size mismatch");
    const std::size_t N = log_w.size();
    if (N < 2) throw DomainError("aggregate_weighted needs at least two paths");
    TiltedEstimate est;
    est.n_paths = N;
    est.self_normalized = self_normalize;
    const double shift = *std::max_element(log_w.begin(), log_w.end());
    std::vector<double> w(N), wh(N), w2(N);
    for (std::size_t i = 0; i < N; ++i) {
        w[i] = std::exp(log_w[i] - shift);
        wh[i] = w[i] * values[i];
        w2[i] = w[i] * w[i];
    }
    const double sw = pairwise_sum(w), swh = pairwise_sum(wh), sw2 = pairwise_sum(w2);
    const double scale = std::exp(shift);
    est.mean_weight = scale * sw / static_cast<double>(N);
    est.ess = sw * sw / sw2;
    if (self_normalize) {
        est.estimate = swh / sw;
        std::vector<double> dev(N);
        for (std::size_t i = 0; i < N; ++i) {
            const double e = w[i] * (values[i] - est.estimate);
            dev[i] = e * e;
        }
        est.std_error = std::sqrt(pairwise_sum(dev)) / sw;
    } else {
        for (std::size_t i = 0; i < N; ++i) wh[i] *= scale;
        const auto me = mean_and_error(wh);
        est.estimate = me.mean;
        est.std_error = me.std_error;
    }
    if (est.ess < 0.01 * static_cast<double>(N)) {
        est.ess_warning = true;
        est.warning = "effective sample size " + std::to_string(est.ess) + " below 1% of " + std::to_string(N) +
                      " paths";
    }
    return est;
}

std::vector<TiltedEstimate> expect_tilted_many(const MatrixModel& model, const SpectralData& spec,
                                               const ProjectiveGrid& grid, const ProjectivePoint& x0,
                                               const std::vector<PathFunctional>& hs, std::size_t n,
                                               std::size_t n_mc, const RngStream& rng, const TiltOptions& opts) {
    if (n_mc < 100) throw DomainError("expect_tilted needs N_mc >= 100");
    if (n == 0) throw DomainError("expect_tilted needs n >= 1");
    if (opts.block == 0) throw DomainError("path block size must be positive");
    const std::size_t n_blocks = (n_mc + opts.block - 1) / opts.block;
    const std::size_t nh = hs.size();
    std::vector<double> log_w(n_mc);
    std::vector<double> values(n_mc * nh);
    parallel_for(n_blocks, opts.threads, [&](std::size_t b) {
        RngStream st = rng.split(b);
        const std::size_t lo = b * opts.block, hi = std::min(n_mc, lo + opts.block);
        for (std::size_t i = lo; i < hi; ++i) {
            WalkState ws(x0);
            for (std::size_t k = 0; k < n; ++k) ws.step(model.sample(st));
            const ProjectivePoint xn = ws.point();
            const double S = ws.cocycle_sum();
            log_w[i] = path_weight(spec, grid, x0, xn, S, n).log_w;
            const PathView view{x0, xn, S, n};
            for (std::size_t j = 0; j < nh; ++j) values[j * n_mc + i] = hs[j](view);
        }
    });
    const bool self_norm = opts.self_normalize == SelfNormalize::on ||
                           (opts.self_normalize == SelfNormalize::automatic && n > 50);
    std::vector<TiltedEstimate> out;
    out.reserve(nh);
    for (std::size_t j = 0; j < nh; ++j)
        out.push_back(aggregate_weighted(log_w, std::span<const double>(values).subspan(j * n_mc, n_mc), self_norm));
    return out;
}

TiltedEstimate expect_tilted(const MatrixModel& model, const SpectralData& spec, const ProjectiveGrid& grid,
                             const ProjectivePoint& x0, const PathFunctional& h, std::size_t n, std::size_t n_mc,
                             const RngStream& rng, const TiltOptions& opts) {
    return expect_tilted_many(model, spec, grid, x0, {h}, n, n_mc, rng, opts).front();
}

double tilted_grid_expectation(const OperatorMatrix& op, const SpectralData& spec, const ProjectiveGrid& grid,
                               std::span<const double> h, std::size_t n, const ProjectivePoint& x0) {
    const int m = op.m;
    if (static_cast<int>(h.size()) != m || spec.m != m) throw DomainError("tilted_grid_expectation: size mismatch");
    std::vector<double> v(m), next(m);
    for (int i = 0; i < m; ++i) v[i] = spec.r[i] * h[i];
    for (std::size_t k = 0; k < n; ++k) {
        apply(op, v, next);
        for (int i = 0; i < m; ++i) v[i] = next[i] / spec.kappa;
    }
    return interpolate(grid, v, x0.angle()) / interpolate(grid, spec.r, x0.angle());
}

} // namespace glcoef
