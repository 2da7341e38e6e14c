#include "glcoef/spectral.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>

using namespace glcoef;

namespace {

MatrixModel shear_rotation() {
    Matrix a(2, 2);
    a << 2, 1, 1, 1;
    return MatrixModel::finite_support("shear-rotation", {a, rotation2(1.0)}, {0.5, 0.5});
}

MatrixModel coin() { return MatrixModel::scalar_rotation("coin", 2, {2.0, 0.5}, {0.5, 0.5}); }

double max_row_sum_error(const OperatorMatrix& op, double target) {
    double worst = 0.0;
    for (int i = 0; i < op.m; ++i) {
        const auto r = op.row(i);
        worst = std::max(worst, std::abs(std::accumulate(r.begin(), r.end(), 0.0) - target));
    }
    return worst;
}

// Cumulants of X = log ||g x|| for the rdr model, x uniform: periodic
// trapezoid rule on a fine independent grid.
struct RdrCumulants {
    double k1, k2, k3;
    double kappa(double s, double a) const {
        const int n = 1 << 14;
        double acc = 0.0;
        for (int q = 0; q < n; ++q) {
            const double t = kPi * q / n;
            acc += std::pow(std::exp(2 * a) * std::cos(t) * std::cos(t) + std::exp(-2 * a) * std::sin(t) * std::sin(t),
                            0.5 * s);
        }
        return acc / n;
    }
};

RdrCumulants rdr_cumulants(double a) {
    const int n = 1 << 14;
    double m1 = 0.0, m2 = 0.0, m3 = 0.0;
    for (int q = 0; q < n; ++q) {
        const double t = kPi * q / n;
        const double x =
            0.5 * std::log(std::exp(2 * a) * std::cos(t) * std::cos(t) + std::exp(-2 * a) * std::sin(t) * std::sin(t));
        m1 += x;
        m2 += x * x;
        m3 += x * x * x;
    }
    m1 /= n;
    m2 /= n;
    m3 /= n;
    return {m1, m2 - m1 * m1, m3 - 3 * m1 * m2 + 2 * m1 * m1 * m1};
}

} // namespace

TEST_CASE("grid geometry and interpolation") {
    const ProjectiveGrid g(8);
    CHECK(g.spacing() == doctest::Approx(kPi / 8));
    CHECK(g.theta(0) == doctest::Approx(kPi / 16));
    const auto st = g.locate(g.theta(3));
    CHECK(st.j0 == 3);
    CHECK(st.w == doctest::Approx(0.0).epsilon(1e-12));
    const auto wrap = g.locate(kPi - 0.01);
    CHECK(wrap.j0 == 7);
    CHECK(wrap.j1 == 0);
    CHECK(g.cell_of(kPi + 0.1) == g.cell_of(0.1));
    CHECK(g.cell_of(-0.1) == 7);
    std::vector<double> v(8);
    for (int i = 0; i < 8; ++i) v[i] = i;
    CHECK(interpolate(g, v, 0.5 * (g.theta(2) + g.theta(3))) == doctest::Approx(2.5));
    CHECK_THROWS_AS(ProjectiveGrid(3), DomainError);
}

TEST_CASE("random trigonometric functions are pi-periodic and seeded") {
    const ProjectiveGrid g(64);
    RngStream a(1), b(1);
    const auto f = random_trig_function(g, 3, a, "f");
    const auto h = random_trig_function(g, 3, b, "h");
    CHECK(f.values == h.values);
    CHECK(constant_function(g, 2.0).values == std::vector<double>(64, 2.0));
}

TEST_CASE("markov rows at s = 0") {
    const ProjectiveGrid g(256);
    CHECK(max_row_sum_error(build_operator(shear_rotation(), 0.0, g), 1.0) <= 1e-12);
    CHECK(max_row_sum_error(build_operator(coin(), 0.0, g), 1.0) <= 1e-12);
    CHECK(max_row_sum_error(build_operator(MatrixModel::rotation_diag_rotation("rdr", 1.0), 0.0, g), 1.0) <= 1e-12);

    const auto id = MatrixModel::finite_support("I", {identity_matrix(2)}, {1.0});
    const auto k = build_operator(id, 0.0, g);
    for (int i = 0; i < g.size(); ++i)
        for (int j = 0; j < g.size(); ++j) CHECK(k(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
}

TEST_CASE("scalar-rotation rows factor out E c^s") {
    const ProjectiveGrid g(128);
    BuildOptions wide;
    wide.s_max = 1.5;
    const auto k = build_operator(coin(), 1.0, g, wide);
    CHECK(max_row_sum_error(k, 1.25) <= 1e-12);
    const auto spec = dominant_eigen(k);
    CHECK(spec.kappa == doctest::Approx(1.25).epsilon(1e-10));
    CHECK_THROWS_AS(build_operator(coin(), 1.0, g), DomainError);
    CHECK_THROWS_AS(build_operator(MatrixModel::rotation_diag_rotation("r3", std::vector<double>{1, 0, -1}), 0.0, g),
                    DomainError);
}

TEST_CASE("s = 0: kappa = 1 and r = 1") {
    const ProjectiveGrid g(512);
    for (const auto& model : {shear_rotation(), coin(), MatrixModel::rotation_diag_rotation("rdr", 1.0)}) {
        const auto spec = dominant_eigen(build_operator(model, 0.0, g));
        CHECK(std::abs(spec.kappa - 1.0) <= 1e-10);
        for (double r : spec.r) CHECK(std::abs(r - 1.0) <= 1e-10);
        for (int i = 0; i < g.size(); ++i) CHECK(std::abs(spec.pi[i] - spec.nu[i]) <= 1e-10 * spec.nu[i] + 1e-15);
        CHECK(std::abs(std::accumulate(spec.pi.begin(), spec.pi.end(), 0.0) - 1.0) <= 1e-12);
    }
}

TEST_CASE("power iteration against a dense eigensolver") {
    const ProjectiveGrid g(256);
    for (double s : {-0.2, 0.0, 0.15}) {
        const auto op = build_operator(shear_rotation(), s, g);
        const auto spec = dominant_eigen(op);
        Eigen::MatrixXd k(op.m, op.m);
        for (int i = 0; i < op.m; ++i)
            for (int j = 0; j < op.m; ++j) k(i, j) = op(i, j);
        const Eigen::EigenSolver<Eigen::MatrixXd> es(k, false);
        double best = 0.0;
        for (int i = 0; i < op.m; ++i) best = std::max(best, es.eigenvalues()(i).real());
        CHECK(std::abs(spec.kappa - best) <= 1e-10);
        CHECK(spec.residual <= 1e-11);
        CHECK(std::abs(std::accumulate(spec.pi.begin(), spec.pi.end(), 0.0) - 1.0) <= 1e-12);
        for (double r : spec.r) CHECK(r > 0.0);
    }
}

TEST_CASE("scalar-rotation cumulants") {
    const ProjectiveGrid g(1024);
    const double l2 = std::log(2.0);
    for (double s : {-0.2, -0.1, 0.0, 0.1, 0.2}) {
        const auto spec = solve_spectral(coin(), s, g, SpectralOptions{.derivatives = false});
        const double exact = 0.5 * (std::pow(2.0, s) + std::pow(2.0, -s));
        CHECK(std::abs(spec.kappa / exact - 1.0) <= 1e-8);
    }
    const auto spec = solve_spectral(coin(), 0.0, g);
    CHECK(std::abs(spec.Lambda1) <= 1e-8);
    CHECK(std::abs(spec.Lambda2 - l2 * l2) <= 1e-5);
    CHECK(std::abs(spec.Lambda3) <= 1e-4);
    CHECK(spec.sigma() == doctest::Approx(l2).epsilon(1e-5));
    for (int i = 0; i < g.size(); ++i) CHECK(std::abs(spec.pi[i] - 1.0 / g.size()) <= 1e-10);
}

TEST_CASE("plain and high-order difference schemes") {
    const ProjectiveGrid g(64);
    const double l2 = std::log(2.0);
    const auto plain = lambda_derivatives(coin(), 0.05, g, 0.02, DerivativeScheme::plain);
    const auto rich = lambda_derivatives(coin(), 0.05, g, 0.02, DerivativeScheme::richardson);
    // Lambda(s) = log cosh(s log 2)
    const double th = std::tanh(0.05 * l2);
    const double d1 = l2 * th, d2 = l2 * l2 * (1 - th * th), d3 = -2 * l2 * l2 * l2 * th * (1 - th * th);
    CHECK(std::abs(rich.d1 - d1) <= 1e-10);
    CHECK(std::abs(rich.d2 - d2) <= 1e-8);
    CHECK(std::abs(rich.d3 - d3) <= 1e-5);
    CHECK(std::abs(rich.d2 - d2) < std::abs(plain.d2 - d2));
    CHECK(std::abs(plain.d2 - d2) <= 1e-4);
    CHECK_THROWS_AS(lambda_derivatives(coin(), 0.2, g, 0.02), DomainError);
}

TEST_CASE("rotation-diag-rotation against its closed-form kernel") {
    const double a = 1.0;
    const auto model = MatrixModel::rotation_diag_rotation("rdr", a);
    const auto c = rdr_cumulants(a);
    CHECK(c.k1 == doctest::Approx(std::log(std::cosh(a))).epsilon(1e-12));
    const ProjectiveGrid g(256);
    for (double s : {-0.2, 0.1, 0.2}) {
        const auto spec = solve_spectral(model, s, g, SpectralOptions{.derivatives = false});
        CHECK(spec.kappa == doctest::Approx(c.kappa(s, a)).epsilon(1e-12));
    }
    const auto spec = solve_spectral(model, 0.0, g);
    CHECK(std::abs(spec.Lambda1 - c.k1) <= 1e-9);
    CHECK(std::abs(spec.Lambda2 - c.k2) <= 1e-6);
    CHECK(std::abs(spec.Lambda3 - c.k3) <= 1e-4);
}

TEST_CASE("grid refinement on a finite-support model") {
    const auto model = shear_rotation();
    SpectralOptions opts;
    const auto coarse = solve_spectral(model, 0.0, ProjectiveGrid(256), opts);
    const auto mid = solve_spectral(model, 0.0, ProjectiveGrid(512), opts);
    const auto fine = solve_spectral(model, 0.0, ProjectiveGrid(1024), opts);
    const double e1 = std::abs(coarse.Lambda1 - fine.Lambda1), e2 = std::abs(mid.Lambda1 - fine.Lambda1);
    CHECK(e2 < e1);
    CHECK(e2 <= 1e-4);
    CHECK(std::abs(mid.Lambda2 - fine.Lambda2) <= 1e-3);
}

TEST_CASE("monte carlo invariant measure") {
    SUBCASE("scalar rotation gives the uniform histogram") {
        const ProjectiveGrid g(64);
        RngStream rng(21);
        const std::size_t n = 200000;
        const auto hist = mc_invariant_measure(coin(), g, 1000, n, rng);
        double worst = 0.0;
        for (double p : hist) worst = std::max(worst, std::abs(p * g.size() - 1.0));
        CHECK(worst <= 4.0 * std::sqrt(g.size() / static_cast<double>(n)));
    }
    SUBCASE("fixed point of a diagonal matrix") {
        const ProjectiveGrid g(64);
        RngStream rng(2);
        Matrix d = Matrix::Zero(2, 2);
        d(0, 0) = 2;
        d(1, 1) = 0.5;
        const auto hist = mc_invariant_measure(MatrixModel::finite_support("D", {d}, {1.0}), g, 1000, 1000, rng);
        CHECK(hist[g.cell_of(0.0)] == 1.0);
    }
    SUBCASE("agrees with the spectral stationary measure") {
        const ProjectiveGrid g(128);
        const auto model = MatrixModel::rotation_diag_rotation("rdr", 1.0);
        RngStream rng(5);
        const auto hist = mc_invariant_measure(model, g, 1000, 1000000, rng);
        const auto spec = dominant_eigen(build_operator(model, 0.0, g));
        double tv = 0.0;
        for (int i = 0; i < g.size(); ++i) tv += 0.5 * std::abs(hist[i] - spec.pi[i]);
        CHECK(tv <= 0.02);

        // The finite-support measure is rough, so the interpolated operator
        // only matches it at finer grids; the gap shrinks with m.
        const auto sr = shear_rotation();
        const auto h2 = mc_invariant_measure(sr, g, 1000, 1000000, rng);
        std::vector<double> tvs;
        for (int m : {128, 512, 2048}) {
            const auto s2 = dominant_eigen(build_operator(sr, 0.0, ProjectiveGrid(m)));
            std::vector<double> agg(g.size(), 0.0);
            for (int i = 0; i < m; ++i) agg[i * g.size() / m] += s2.pi[i];
            double tv2 = 0.0;
            for (int i = 0; i < g.size(); ++i) tv2 += 0.5 * std::abs(h2[i] - agg[i]);
            tvs.push_back(tv2);
        }
        CHECK(tvs[1] < tvs[0]);
        CHECK(tvs[2] < tvs[1]);
        CHECK(tvs[2] <= 0.02);
    }
}

TEST_CASE("remainder contraction") {
    const ProjectiveGrid g(512);
    RngStream rng(8);
    const auto op = build_operator(shear_rotation(), 0.0, g);
    const auto spec = dominant_eigen(op);
    const auto phi = random_trig_function(g, 3, rng, "phi");
    const auto rep = remainder_contraction(op, spec, phi.values);
    CHECK(rep.rate > 0.0);
    CHECK(rep.rate < 0.999);
    CHECK(rep.fitted_steps >= 2);

    const auto op_r = build_operator(MatrixModel::rotation_diag_rotation("rdr", 1.0), 0.0, g);
    const auto spec_r = dominant_eigen(op_r);
    const auto rep_r = remainder_contraction(op_r, spec_r, phi.values);
    CHECK(rep_r.rate < 1e-12);
}

TEST_CASE("convergence failure is reported") {
    const ProjectiveGrid g(128);
    const auto op = build_operator(shear_rotation(), 0.1, g);
    CHECK_THROWS_AS(dominant_eigen(op, EigenOptions{1e-15, 3}), ConvergenceError);
}
