#include "glcoef/bias.hpp"

#include "glcoef/kernels.hpp"
#include "glcoef/numeric.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>

namespace glcoef {
namespace {

constexpr int kGaussPoints = 8;

struct GaussRule {
    std::array<double, kGaussPoints> x; // on [-1, 1]
    std::array<double, kGaussPoints> w; // sum 2
};

const GaussRule& gauss_rule() {
    static const GaussRule rule = [] {
        using G = boost::math::quadrature::gauss<double, kGaussPoints>;
        GaussRule r{};
        const auto& ab = G::abscissa();
        const auto& wt = G::weights();
        int n = 0;
        for (std::size_t i = 0; i < ab.size(); ++i) {
            if (ab[i] == 0.0) {
                r.x[n] = 0.0;
                r.w[n++] = wt[i];
            } else {
                r.x[n] = -ab[i];
                r.w[n++] = wt[i];
                r.x[n] = ab[i];
                r.w[n++] = wt[i];
            }
        }
        return r;
    }();
    return rule;
}

// Integral of log|v| from a to b.
double log_abs_integral(double a, double b) {
    auto F = [](double v) { return v == 0.0 ? 0.0 : v * std::log(std::abs(v)) - v; };
    return F(b) - F(a);
}

double log_sinc(double v) { return v == 0.0 ? 0.0 : std::log(std::sin(v) / v); }

template <class F>
double gauss_integral(F&& f, double a, double b) {
    const auto& g = gauss_rule();
    const double c = 0.5 * (a + b), r = 0.5 * (b - a);
    double s = 0.0;
    for (int q = 0; q < kGaussPoints; ++q) s += g.w[q] * f(c + r * g.x[q]);
    return s * r;
}

// v in [-pi/2, pi/2)
double wrap_half(double v) {
    v = std::fmod(v + 0.5 * kPi, kPi);
    if (v < 0.0) v += kPi;
    return v - 0.5 * kPi;
}

} // namespace

CellQuadrature::CellQuadrature(const ProjectiveGrid& grid, const DualPoint& y) {
    if (y.dimension() != 2) throw DomainError("cell quadrature requires d = 2");
    const int m = grid.size();
    const double h = grid.spacing();
    // delta(theta, y) = |cos(theta - theta_y)| = |sin(theta - theta_z)|
    const double tz = y.angle() + 0.5 * kPi;
    const auto& g = gauss_rule();
    nodes_.resize(m);
    log_avg_.resize(m);
    for (int i = 0; i < m; ++i) {
        const double va = wrap_half(i * h - tz);
        const double vb = va + h;
        std::vector<std::pair<double, double>> parts;
        if (va < 0.0 && vb > 0.0)
            parts = {{va, 0.0}, {0.0, vb}};
        else
            parts = {{va, vb}};

        auto& nodes = nodes_[i];
        nodes.reserve(parts.size() * kGaussPoints);
        for (const auto& [a, b] : parts) {
            const double c = 0.5 * (a + b), r = 0.5 * (b - a);
            for (int q = 0; q < kGaussPoints; ++q) nodes.push_back({tz + c + r * g.x[q], g.w[q] * r / h});
        }

        double integral = 0.0;
        if (va < 3.0 * h && vb > -3.0 * h) {
            for (const auto& [a, b] : parts) integral += log_abs_integral(a, b) + gauss_integral(log_sinc, a, b);
        } else {
            for (const auto& [a, b] : parts)
                integral += gauss_integral([](double v) { return std::log(std::abs(std::sin(v))); }, a, b);
        }
        log_avg_[i] = integral / h;
    }
}

BiasSolver::BiasSolver(const MatrixModel& model, double s, const ProjectiveGrid& grid, const SpectralOptions& opts)
    : grid_(grid),
      op_(build_operator(model, s, grid, opts.build)),
      sigma_op_(build_sigma_operator(model, s, grid, opts.build)),
      spec_(dominant_eigen(op_, opts.eig)) {
    if (opts.derivatives) {
        const auto d = lambda_derivatives(model, s, grid, opts.h, opts.scheme, opts.build, opts.eig);
        spec_.has_derivatives = true;
        spec_.Lambda1 = d.d1;
        spec_.Lambda2 = d.d2;
        spec_.Lambda3 = d.d3;
    }
    std::vector<double> khat_r(grid.size());
    apply(sigma_op_, spec_.r, khat_r);
    drift_ = kernels::dot(spec_.nu, khat_r) / (spec_.kappa * kernels::dot(spec_.nu, spec_.r));
}

namespace {

void apply_conjugated(const OperatorMatrix& op, const SpectralData& spec, std::span<const double> psi,
                      std::span<double> out) {
    const std::size_t m = psi.size();
    std::vector<double> rpsi(m);
    for (std::size_t i = 0; i < m; ++i) rpsi[i] = spec.r[i] * psi[i];
    apply(op, rpsi, out);
    for (std::size_t i = 0; i < m; ++i) out[i] /= spec.kappa * spec.r[i];
}

} // namespace

void BiasSolver::apply_q(std::span<const double> psi, std::span<double> out) const {
    apply_conjugated(op_, spec_, psi, out);
}

void BiasSolver::apply_qhat(std::span<const double> psi, std::span<double> out) const {
    apply_conjugated(sigma_op_, spec_, psi, out);
}

BValues BiasSolver::b_values(const GridFunction& phi, const BiasOptions& opts) const {
    const int m = grid_.size();
    if (static_cast<int>(phi.values.size()) != m) throw DomainError("b_bias: phi size != grid size");
    std::vector<double> p = phi.values, mv(m, 0.0), qp(m), qhp(m), qm(m);
    BValues out;
    double inc = INFINITY;
    for (std::size_t n = 1; n <= opts.n_max; ++n) {
        apply_q(p, qp);
        apply_qhat(p, qhp);
        apply_q(mv, qm);
        inc = 0.0;
        for (int i = 0; i < m; ++i) {
            const double next = qm[i] + qhp[i] - drift_ * qp[i];
            inc = std::max(inc, std::abs(next - mv[i]));
            mv[i] = next;
        }
        p.swap(qp);
        if (inc < opts.tol) {
            out.values = std::move(mv);
            out.iters = n;
            out.last_increment = inc;
            return out;
        }
    }
    throw ConvergenceError("b recursion did not converge in " + std::to_string(opts.n_max) +
                               " steps (last increment " + std::to_string(inc) + ")",
                           inc);
}

double BiasSolver::b_at(const GridFunction& phi, const ProjectivePoint& x, const BiasOptions& opts) const {
    const auto b = b_values(phi, opts);
    return interpolate(grid_, b.values, x.angle());
}

double BiasSolver::d(const DualPoint& y, const GridFunction& phi) const { return d_bias(grid_, spec_.pi, y, phi); }

double BiasSolver::mass(const GridFunction& phi) const { return kernels::dot(spec_.pi, phi.values); }

double d_bias(const ProjectiveGrid& grid, std::span<const double> pi, const DualPoint& y, const GridFunction& phi) {
    const int m = grid.size();
    if (static_cast<int>(pi.size()) != m || static_cast<int>(phi.values.size()) != m)
        throw DomainError("d_bias: weights / phi size != grid size");
    const CellQuadrature quad(grid, y);
    std::vector<double> terms(m);
    for (int i = 0; i < m; ++i) terms[i] = pi[i] * phi.values[i] * quad.log_delta_average(i);
    return pairwise_sum(terms);
}

std::vector<double> piece_masses(const ProjectiveGrid& grid, std::span<const double> pi, const DualPoint& y,
                                 const GridFunction& phi, const PartitionScheme& scheme) {
    const int m = grid.size();
    if (static_cast<int>(pi.size()) != m || static_cast<int>(phi.values.size()) != m)
        throw DomainError("piece_masses: weights / phi size != grid size");
    const CellQuadrature quad(grid, y);
    const int M = scheme.M();
    const double ty = y.angle();
    std::vector<CompensatedSum> acc(M + 1);
    for (int i = 0; i < m; ++i) {
        const double wi = pi[i] * phi.values[i];
        if (wi == 0.0) continue;
        for (const auto& node : quad.nodes(i)) {
            const double dl = std::abs(std::cos(node.theta - ty));
            const double t = dl > 0.0 ? -std::log(std::min(dl, 1.0)) : INFINITY;
            // Only pieces k with (k-1) a < t < (k+1) a are nonzero; the tail piece
            // is reached through k_hi = M once t > (M-1) a.
            const double ka = t / scheme.a();
            const int k_lo = std::isfinite(ka) ? std::max(0, static_cast<int>(std::floor(ka)) - 1) : M;
            const int k_hi = std::isfinite(ka) ? std::min(M, static_cast<int>(std::floor(ka)) + 2) : M;
            for (int k = std::min(k_lo, M); k <= k_hi; ++k) acc[k].add(wi * node.weight * scheme.piece(k, t));
        }
    }
    std::vector<double> out(M + 1);
    for (int k = 0; k <= M; ++k) out[k] = acc[k].value();
    return out;
}

Delta020Report delta020_check(const BiasSolver& solver, const DualPoint& y, const GridFunction& phi,
                              const PartitionScheme& scheme, double c) {
    for (double v : phi.values)
        if (v < 0.0) throw DomainError("delta020_check needs a nonnegative phi");
    if (c < 0.0) c = 10.0;
    const auto& pi = solver.spectral().pi;
    Delta020Report rep;
    rep.n = scheme.n();
    rep.a_n = scheme.a();
    rep.M_n = scheme.M();
    rep.minus_d = -solver.d(y, phi);
    rep.mass = solver.mass(phi);
    const auto pieces = piece_masses(solver.grid(), pi, y, phi, scheme);
    CompensatedSum up, lo, tot;
    for (int k = 0; k <= scheme.M(); ++k) {
        up.add((k + 1) * scheme.a() * pieces[k]);
        lo.add((k - 1) * scheme.a() * pieces[k]);
        tot.add(pieces[k]);
    }
    rep.upper_sum = up.value();
    rep.lower_sum = lo.value();
    rep.mass_pieces = tot.value();
    double sup = 0.0;
    for (double v : phi.values) sup = std::max(sup, std::abs(v));
    const double nn = static_cast<double>(scheme.n());
    rep.upper_bound = rep.minus_d + 2.0 * scheme.a() * rep.mass;
    rep.lower_bound = rep.minus_d - 2.0 * scheme.a() * rep.mass - c * sup / (nn * nn);
    rep.upper_ok = rep.upper_sum <= rep.upper_bound;
    rep.lower_ok = rep.lower_sum >= rep.lower_bound;
    return rep;
}

} // namespace glcoef
