#include "glcoef/edgeworth.hpp"

#include "glcoef/numeric.hpp"
#include "glcoef/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace glcoef {

double normal_cdf(double t) noexcept { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }

double normal_pdf(double t) noexcept {
    constexpr double inv_sqrt_2pi = 0.39894228040143267793994605993438;
    return inv_sqrt_2pi * std::exp(-0.5 * t * t);
}

void EdgeworthParams::validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("Edgeworth scale sigma must be positive");
    if (n < 1) throw DomainError("Edgeworth horizon n must be >= 1");
}

double edgeworth_cocycle_cdf(const EdgeworthParams& p, double t) {
    p.validate();
    const double rn = std::sqrt(static_cast<double>(p.n));
    const double ph = normal_pdf(t);
    return p.mass * (normal_cdf(t) + p.skew / (6.0 * p.sigma * p.sigma * p.sigma * rn) * (1.0 - t * t) * ph) -
           p.bias_b / (p.sigma * rn) * ph;
}

double edgeworth_coeff_cdf(const EdgeworthParams& p, double t) {
    const double rn = std::sqrt(static_cast<double>(p.n));
    return edgeworth_cocycle_cdf(p, t) - p.bias_d / (p.sigma * rn) * normal_pdf(t);
}

EcdfTable::EcdfTable(std::vector<double> samples) : x_(std::move(samples)) {
    if (x_.empty()) throw DomainError("ECDF needs at least one sample");
    std::sort(x_.begin(), x_.end());
    const double n = static_cast<double>(x_.size());
    cum_.resize(x_.size());
    for (std::size_t i = 0; i < x_.size(); ++i) cum_[i] = static_cast<double>(i + 1) / n;
}

EcdfTable::EcdfTable(std::span<const double> samples, std::span<const double> weights, double total) {
    if (samples.empty()) throw DomainError("ECDF needs at least one sample");
    if (samples.size() != weights.size()) throw DomainError("ECDF: samples and weights differ in size");
    std::vector<std::size_t> idx(samples.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return samples[a] < samples[b]; });
    x_.resize(samples.size());
    cum_.resize(samples.size());
    CompensatedSum acc;
    const bool normalize = !(total > 0.0);
    if (normalize) total = pairwise_sum(weights);
    if (!(total > 0.0)) throw DomainError("ECDF weights must have positive total");
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (weights[idx[i]] < 0.0) throw DomainError("ECDF weights must be nonnegative");
        x_[i] = samples[idx[i]];
        acc.add(weights[idx[i]]);
        cum_[i] = acc.value() / total;
    }
    if (normalize) cum_.back() = 1.0;
}

double EcdfTable::operator()(double t) const {
    const auto it = std::upper_bound(x_.begin(), x_.end(), t);
    if (it == x_.begin()) return 0.0;
    return cum_[static_cast<std::size_t>(it - x_.begin()) - 1];
}

double ecdf_ks(const EcdfTable& ecdf, const std::function<double(double)>& reference) {
    const auto& x = ecdf.sorted();
    const auto& c = ecdf.cumulative();
    double worst = 0.0;
    double before = 0.0;
    for (std::size_t i = 0; i < x.size();) {
        std::size_t j = i;
        while (j + 1 < x.size() && x[j + 1] == x[i]) ++j;
        const double ref = reference(x[i]);
        worst = std::max({worst, std::abs(before - ref), std::abs(c[j] - ref)});
        before = c[j];
        i = j + 1;
    }
    return worst;
}

double ecdf_ks(std::vector<double> samples, const std::function<double(double)>& reference) {
    return ecdf_ks(EcdfTable(std::move(samples)), reference);
}

std::vector<double> t_grid(double lo, double hi, int n_points) {
    if (n_points < 2 || !(hi > lo)) throw DomainError("t-grid needs n_points >= 2 and hi > lo");
    std::vector<double> t(n_points);
    for (int i = 0; i < n_points; ++i) t[i] = lo + (hi - lo) * i / (n_points - 1);
    return t;
}

SandwichReport sandwich_diagnostic(const MatrixModel& model, const SpectralData& spec, const ProjectiveGrid& grid,
                                   const PartitionScheme& scheme, const ProjectivePoint& x, const DualPoint& y,
                                   const GridFunction& phi, double t, std::size_t n_mc, const RngStream& rng,
                                   const TiltOptions& opts, double w_tol) {
    const std::size_t n = scheme.n();
    if (n_mc < 100) throw DomainError("sandwich_diagnostic needs N_mc >= 100");
    if (static_cast<int>(phi.values.size()) != grid.size()) throw DomainError("sandwich: phi size != grid size");
    const double sigma = spec.sigma();
    const double drift = spec.Lambda1;
    const double rn = std::sqrt(static_cast<double>(n));
    const int M = scheme.M();
    const double a = scheme.a();

    // Paths in blocks, one substream per block.
    std::vector<double> log_w(n_mc), S(n_mc), ld(n_mc), phi_end(n_mc);
    const std::size_t n_blocks = (n_mc + opts.block - 1) / opts.block;
    parallel_for(n_blocks, opts.threads, [&](std::size_t b) {
        RngStream st = rng.split(b);
        const std::size_t lo = b * opts.block, hi = std::min(n_mc, lo + opts.block);
        for (std::size_t i = lo; i < hi; ++i) {
            WalkState ws(x);
            for (std::size_t k = 0; k < n; ++k) ws.step(model.sample(st));
            const ProjectivePoint xn = ws.point();
            S[i] = ws.cocycle_sum();
            ld[i] = log_delta(xn, y);
            phi_end[i] = interpolate(grid, phi.values, xn.angle());
            log_w[i] = path_weight(spec, grid, x, xn, S[i], n).log_w;
        }
    });

    const bool self_norm = opts.self_normalize == SelfNormalize::on ||
                           (opts.self_normalize == SelfNormalize::automatic && n > 50);
    const double shift = *std::max_element(log_w.begin(), log_w.end());

    // Weighted first and second moments, per k and per quantity.
    struct Acc {
        CompensatedSum s1, s2w, s22;
        void add(double w, double v) {
            if (v == 0.0) return;
            s1.add(w * v);
            s2w.add(w * w * v);
            s22.add(w * w * v * v);
        }
    };
    std::vector<Acc> accF(M + 1), accU(M + 1), accL(M + 1);
    Acc accW;
    CompensatedSum sw, sw2;
    for (std::size_t i = 0; i < n_mc; ++i) {
        const double w = std::exp(log_w[i] - shift);
        sw.add(w);
        sw2.add(w * w);
        const double tt = -ld[i];
        const double zc = (S[i] + ld[i] - static_cast<double>(n) * drift) / (sigma * rn);
        const double zs = (S[i] - static_cast<double>(n) * drift) / (sigma * rn);
        const double ka = tt / a;
        const int k_lo = std::isfinite(ka) ? std::max(0, static_cast<int>(std::floor(ka)) - 1) : M;
        const int k_hi = std::isfinite(ka) ? std::min(M, static_cast<int>(std::floor(ka)) + 2) : M;
        for (int k = std::min(k_lo, M); k <= k_hi; ++k) {
            const double v = phi_end[i] * scheme.piece(k, tt);
            if (v == 0.0) continue;
            if (zc <= t) accF[k].add(w, v);
            if (zs <= t + (k + 1) * a / (sigma * rn)) accU[k].add(w, v);
            if (zs <= t + (k - 1) * a / (sigma * rn)) accL[k].add(w, v);
            if (k == M && tt >= (M + 1) * a) accW.add(w, v);
        }
    }

    const double N = static_cast<double>(n_mc);
    const double scale = std::exp(shift);
    auto finish = [&](const Acc& acc, double& est, double& se) {
        if (self_norm) {
            est = acc.s1.value() / sw.value();
            const double var = acc.s22.value() - 2.0 * est * acc.s2w.value() + est * est * sw2.value();
            se = std::sqrt(std::max(var, 0.0)) / sw.value();
        } else {
            // Plain mean of w v with the shift undone.
            est = scale * acc.s1.value() / N;
            const double m2 = scale * scale * acc.s22.value() / N;
            se = std::sqrt(std::max(m2 - est * est, 0.0) / (N - 1.0));
        }
    };

    SandwichReport rep;
    rep.n = n;
    rep.t = t;
    rep.M_n = M;
    finish(accW, rep.W_n, rep.W_se);
    double sup = 0.0;
    for (double v : phi.values) sup = std::max(sup, std::abs(v));
    rep.w_tol = w_tol >= 0.0 ? w_tol : 10.0 * sup / (static_cast<double>(n) * static_cast<double>(n));
    rep.w_ok = rep.W_n <= rep.w_tol;
    rep.rows.resize(M + 1);
    for (int k = 0; k <= M; ++k) {
        auto& row = rep.rows[k];
        row.k = k;
        finish(accF[k], row.F, row.se_F);
        finish(accU[k], row.upper, row.se_upper);
        finish(accL[k], row.lower, row.se_lower);
        if (k == M) {
            row.upper += rep.W_n;
            row.se_upper = std::hypot(row.se_upper, rep.W_se);
        }
        const double tol_up = 3.0 * std::hypot(row.se_F, row.se_upper);
        const double tol_lo = 3.0 * std::hypot(row.se_F, row.se_lower);
        row.ok = row.lower <= row.F + tol_lo && row.F <= row.upper + tol_up;
        if (!row.ok) rep.violations.push_back(k);
    }
    return rep;
}

} // namespace glcoef
