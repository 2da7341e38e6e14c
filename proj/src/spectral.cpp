#include "glcoef/spectral.hpp"

#include "glcoef/kernels.hpp"
#include "glcoef/numeric.hpp"
#include "glcoef/parallel.hpp"
#include "glcoef/projective.hpp"

#include <algorithm>
#include <cmath>

namespace glcoef {

ProjectiveGrid::ProjectiveGrid(int m) : m_(m), h_(kPi / m) {
    if (m < 4) throw DomainError("grid size m must be >= 4");
}

ProjectiveGrid::Stencil ProjectiveGrid::locate(double theta) const noexcept {
    double u = theta / h_ - 0.5;
    const double fl = std::floor(u);
    const double w = u - fl;
    long j = static_cast<long>(fl) % m_;
    if (j < 0) j += m_;
    const int j0 = static_cast<int>(j);
    const int j1 = j0 + 1 == m_ ? 0 : j0 + 1;
    return {j0, j1, w};
}

int ProjectiveGrid::cell_of(double theta) const noexcept {
    double t = std::fmod(theta, kPi);
    if (t < 0.0) t += kPi;
    const int c = static_cast<int>(t / h_);
    return std::clamp(c, 0, m_ - 1);
}

double interpolate(const ProjectiveGrid& grid, std::span<const double> values, double theta) {
    if (static_cast<int>(values.size()) != grid.size()) throw DomainError("interpolate: value count != grid size");
    const auto st = grid.locate(theta);
    return (1.0 - st.w) * values[st.j0] + st.w * values[st.j1];
}

GridFunction constant_function(const ProjectiveGrid& grid, double c, std::string id) {
    return {std::move(id), std::vector<double>(grid.size(), c)};
}

GridFunction random_trig_function(const ProjectiveGrid& grid, int n_modes, RngStream& rng, std::string id) {
    const double c0 = rng.uniform(-1.0, 1.0);
    std::vector<double> a(n_modes), b(n_modes);
    for (int k = 0; k < n_modes; ++k) {
        a[k] = rng.uniform(-1.0, 1.0);
        b[k] = rng.uniform(-1.0, 1.0);
    }
    GridFunction f{std::move(id), std::vector<double>(grid.size())};
    for (int i = 0; i < grid.size(); ++i) {
        const double t = grid.theta(i);
        double v = c0;
        for (int k = 0; k < n_modes; ++k) v += a[k] * std::cos(2.0 * (k + 1) * t) + b[k] * std::sin(2.0 * (k + 1) * t);
        f.values[i] = v;
    }
    return f;
}

namespace {

void check_build(const MatrixModel& model, double s, const BuildOptions& opts) {
    if (model.dimension() != 2)
        throw DomainError("spectral discretization requires d = 2; use Monte Carlo estimators");
    if (!(std::abs(s) <= opts.s_max + 1e-15))
        throw DomainError("tilt s = " + std::to_string(s) + " outside [-s_max, s_max] with s_max = " +
                          std::to_string(opts.s_max));
    if (opts.n_quad < 1) throw DomainError("n_quad must be >= 1");
}

// Weight carried by one transition: e^{s sigma}, times sigma when requested.
inline double transition_weight(double s, double sigma, bool sigma_weighted) {
    const double e = std::exp(s * sigma);
    return sigma_weighted ? e * sigma : e;
}

// Row value for models whose final factor is a uniform rotation. The uniform
// average of the linear interpolant over the image angle equals the plain
// grid mean, so every row is the constant E[weight] / m.
double rotation_invariant_mass(const MatrixModel& model, double s, bool sigma_weighted, int n_quad) {
    if (model.kind() == ModelKind::scalar_rotation) {
        CompensatedSum acc;
        for (std::size_t j = 0; j < model.scales().size(); ++j) {
            const double sigma = std::log(model.scales()[j]);
            acc.add(model.probabilities()[j] * transition_weight(s, sigma, sigma_weighted));
        }
        return acc.value();
    }
    // rotation-diag-rotation: sigma(D R(t'), x) does not depend on x after
    // averaging t'; midpoint rule on the periodic integrand converges spectrally.
    const double e1 = std::exp(2.0 * model.log_scales()[0]);
    const double e2 = std::exp(2.0 * model.log_scales()[1]);
    std::vector<double> vals(n_quad);
    for (int q = 0; q < n_quad; ++q) {
        const double t = (q + 0.5) * kPi / n_quad;
        const double c = std::cos(t), sn = std::sin(t);
        const double sigma = 0.5 * std::log(e1 * c * c + e2 * sn * sn);
        vals[q] = transition_weight(s, sigma, sigma_weighted);
    }
    return pairwise_sum(vals) / n_quad;
}

OperatorMatrix build(const MatrixModel& model, double s, const ProjectiveGrid& grid, const BuildOptions& opts,
                     bool sigma_weighted) {
    check_build(model, s, opts);
    const int m = grid.size();
    OperatorMatrix op;
    op.m = m;
    op.s = s;
    op.sigma_weighted = sigma_weighted;
    op.k.assign(static_cast<std::size_t>(m) * m, 0.0);

    if (model.kind() != ModelKind::finite_support) {
        const double v = rotation_invariant_mass(model, s, sigma_weighted, opts.n_quad) / m;
        std::fill(op.k.begin(), op.k.end(), v);
        return op;
    }

    const auto& mats = model.matrices();
    const auto& probs = model.probabilities();
    parallel_for(static_cast<std::size_t>(m), opts.threads, [&](std::size_t i) {
        double* row = op.k.data() + i * m;
        const double t = grid.theta(static_cast<int>(i));
        const double c = std::cos(t), sn = std::sin(t);
        for (std::size_t j = 0; j < mats.size(); ++j) {
            const Matrix& g = mats[j];
            const double w0 = g(0, 0) * c + g(0, 1) * sn;
            const double w1 = g(1, 0) * c + g(1, 1) * sn;
            const double sigma = 0.5 * std::log(w0 * w0 + w1 * w1);
            const double weight = probs[j] * transition_weight(s, sigma, sigma_weighted);
            const auto st = grid.locate(line_angle(w0, w1));
            row[st.j0] += (1.0 - st.w) * weight;
            row[st.j1] += st.w * weight;
        }
    });
    return op;
}

double sup_norm(std::span<const double> x) {
    double v = 0.0;
    for (double a : x) v = std::max(v, std::abs(a));
    return v;
}

} // namespace

OperatorMatrix build_operator(const MatrixModel& model, double s, const ProjectiveGrid& grid,
                              const BuildOptions& opts) {
    return build(model, s, grid, opts, false);
}

OperatorMatrix build_sigma_operator(const MatrixModel& model, double s, const ProjectiveGrid& grid,
                                    const BuildOptions& opts) {
    return build(model, s, grid, opts, true);
}

void apply(const OperatorMatrix& op, std::span<const double> x, std::span<double> y) {
    kernels::matvec(op.k, op.m, op.m, x, y);
}

void apply_transposed(const OperatorMatrix& op, std::span<const double> x, std::span<double> y) {
    kernels::matvec_transposed(op.k, op.m, op.m, x, y);
}

double SpectralData::sigma() const {
    if (!has_derivatives) throw DomainError("sigma requested but derivatives were not computed");
    if (!(Lambda2 > 0.0)) throw DomainError("Lambda''(s) is not positive; sigma_s undefined");
    return std::sqrt(Lambda2);
}

SpectralData dominant_eigen(const OperatorMatrix& op, const EigenOptions& opts) {
    const int m = op.m;
    std::vector<double> r(m, 1.0), nu(m, 1.0 / m), kr(m), ktnu(m);
    double kappa = 0.0, res_r = 0.0, res_l = 0.0;
    std::size_t it = 0;
    for (;; ++it) {
        apply(op, r, kr);
        apply_transposed(op, nu, ktnu);
        kappa = kernels::dot(nu, kr) / kernels::dot(nu, r);
        if (!(kappa > 0.0) || !std::isfinite(kappa))
            throw ConvergenceError("power iteration produced a nonpositive eigenvalue estimate", INFINITY);

        double dr = 0.0, dl = 0.0, nl = 0.0;
        for (int i = 0; i < m; ++i) {
            dr = std::max(dr, std::abs(kr[i] - kappa * r[i]));
            dl += std::abs(ktnu[i] - kappa * nu[i]);
            nl += std::abs(nu[i]);
        }
        res_r = dr / sup_norm(r);
        res_l = dl / nl;
        if (res_r <= opts.tol && res_l <= opts.tol) break;
        if (it + 1 >= opts.max_iter)
            throw ConvergenceError("power iteration did not converge in " + std::to_string(opts.max_iter) +
                                       " iterations (residual " + std::to_string(std::max(res_r, res_l)) + ")",
                                   std::max(res_r, res_l));
        const double nr = sup_norm(kr);
        double sl = 0.0;
        for (double v : ktnu) sl += v;
        for (int i = 0; i < m; ++i) {
            r[i] = kr[i] / nr;
            nu[i] = ktnu[i] / sl;
        }
    }

    SpectralData spec;
    spec.s = op.s;
    spec.m = m;
    spec.kappa = kappa;
    spec.Lambda = std::log(kappa);
    spec.residual = res_r;
    spec.left_residual = res_l;
    spec.iters = it + 1;
    const double mass = pairwise_sum(nu);
    for (auto& v : nu) v /= mass;
    const double nr = kernels::dot(nu, r);
    for (auto& v : r) v /= nr;
    for (int i = 0; i < m; ++i) {
        if (!(r[i] > 0.0)) throw ConvergenceError("right eigenvector is not strictly positive", res_r);
        nu[i] = std::max(nu[i], 0.0);
    }
    spec.r = std::move(r);
    spec.nu = std::move(nu);
    spec.pi = stationary_measure(spec);
    return spec;
}

std::vector<double> stationary_measure(const SpectralData& spec) {
    const int m = static_cast<int>(spec.r.size());
    std::vector<double> pi(m);
    for (int i = 0; i < m; ++i) pi[i] = spec.nu[i] * spec.r[i];
    const double total = pairwise_sum(pi);
    for (auto& v : pi) v /= total;
    return pi;
}

LambdaDerivatives lambda_derivatives(const MatrixModel& model, double s, const ProjectiveGrid& grid, double h,
                                     DerivativeScheme scheme, const BuildOptions& build_opts,
                                     const EigenOptions& eig) {
    if (!(h > 0.0)) throw DomainError("derivative step h must be positive");
    if (std::abs(s) + 3.0 * h > build_opts.s_max + 1e-15)
        throw DomainError("derivative stencil s +- 3h leaves (-s_max, s_max)");
    LambdaDerivatives out;
    for (int j = -3; j <= 3; ++j) {
        const auto op = build_operator(model, s + j * h, grid, build_opts);
        out.lambda[j + 3] = dominant_eigen(op, eig).Lambda;
    }
    const auto& L = out.lambda; // L[3 + j] = Lambda(s + j h)
    if (scheme == DerivativeScheme::plain) {
        out.d1 = (L[4] - L[2]) / (2.0 * h);
        out.d2 = (L[4] - 2.0 * L[3] + L[2]) / (h * h);
        out.d3 = (L[5] - 2.0 * L[4] + 2.0 * L[2] - L[1]) / (2.0 * h * h * h);
    } else {
        out.d1 = (45.0 * (L[4] - L[2]) - 9.0 * (L[5] - L[1]) + (L[6] - L[0])) / (60.0 * h);
        out.d2 = (2.0 * (L[6] + L[0]) - 27.0 * (L[5] + L[1]) + 270.0 * (L[4] + L[2]) - 490.0 * L[3]) / (180.0 * h * h);
        out.d3 = (-(L[6] - L[0]) + 8.0 * (L[5] - L[1]) - 13.0 * (L[4] - L[2])) / (8.0 * h * h * h);
    }
    return out;
}

SpectralData solve_spectral(const MatrixModel& model, double s, const ProjectiveGrid& grid,
                            const SpectralOptions& opts) {
    const auto op = build_operator(model, s, grid, opts.build);
    SpectralData spec = dominant_eigen(op, opts.eig);
    if (opts.derivatives) {
        const auto d = lambda_derivatives(model, s, grid, opts.h, opts.scheme, opts.build, opts.eig);
        spec.has_derivatives = true;
        spec.Lambda1 = d.d1;
        spec.Lambda2 = d.d2;
        spec.Lambda3 = d.d3;
    }
    return spec;
}

std::vector<double> mc_invariant_measure(const MatrixModel& model, const ProjectiveGrid& grid, std::size_t n_burn,
                                         std::size_t n_samples, RngStream& rng, double theta0) {
    if (model.dimension() != 2) throw DomainError("mc_invariant_measure requires d = 2");
    if (n_burn < 1000) throw DomainError("mc_invariant_measure needs n_burn >= 1000");
    if (n_samples == 0) throw DomainError("mc_invariant_measure needs n_samples >= 1");
    WalkState st(ProjectivePoint::from_angle(theta0));
    for (std::size_t k = 0; k < n_burn; ++k) st.step(model.sample(rng));
    std::vector<double> hist(grid.size(), 0.0);
    for (std::size_t k = 0; k < n_samples; ++k) {
        st.step(model.sample(rng));
        const auto& u = st.direction();
        hist[grid.cell_of(line_angle(u(0), u(1)))] += 1.0;
    }
    for (auto& v : hist) v /= static_cast<double>(n_samples);
    return hist;
}

ContractionReport remainder_contraction(const OperatorMatrix& op0, const SpectralData& spec0,
                                        std::span<const double> phi, std::size_t n_max, double floor) {
    if (static_cast<int>(phi.size()) != op0.m) throw DomainError("remainder_contraction: phi size != m");
    const int m = op0.m;
    const double mean = kernels::dot(spec0.nu, phi);
    std::vector<double> psi(phi.begin(), phi.end()), next(m);
    for (auto& v : psi) v -= mean;
    ContractionReport rep;
    const double n0 = sup_norm(psi);
    rep.norms.push_back(n0);
    if (!(n0 > 0.0)) return rep;
    for (std::size_t n = 1; n <= n_max; ++n) {
        apply(op0, psi, next);
        // Re-project off the dominant direction; otherwise the O(tol) error in
        // nu leaves a constant that stalls the decay at that level.
        kernels::axpy(-kernels::dot(spec0.nu, next), spec0.r, next);
        psi.swap(next);
        const double nn = sup_norm(psi);
        rep.norms.push_back(nn);
        if (nn < floor * n0) break;
    }
    // Fit on the points above the floor, dropping the first half as transient.
    std::vector<double> xs, ys;
    const std::size_t last = rep.norms.back() < floor * n0 ? rep.norms.size() - 1 : rep.norms.size();
    const std::size_t first = last >= 6 ? last / 2 : 0;
    for (std::size_t n = first; n < last; ++n) {
        xs.push_back(static_cast<double>(n));
        ys.push_back(std::log(rep.norms[n]));
    }
    if (xs.size() >= 2) {
        rep.rate = std::exp(fit_line(xs, ys).slope);
        rep.fitted_steps = xs.size();
    } else {
        // Collapsed below the floor after one step (rank-one operator).
        rep.rate = rep.norms.size() > 1 ? rep.norms[1] / n0 : 0.0;
        rep.fitted_steps = 1;
    }
    return rep;
}

} // namespace glcoef
