#include "glcoef/edgeworth.hpp"

#include <doctest.h>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

using namespace glcoef;

TEST_CASE("normal cdf and pdf") {
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_pdf(0.0) == doctest::Approx(0.3989423).epsilon(1e-7));
    const double t = 1.959964;
    const double oracle =
        0.5 + boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                  [](double u) { return std::exp(-0.5 * u * u) / std::sqrt(2.0 * kPi); }, 0.0, t, 10, 1e-15);
    CHECK(std::abs(normal_cdf(t) - oracle) <= 1e-13);
    CHECK(std::abs(normal_cdf(t) - 0.975) <= 1e-6);
    CHECK(normal_cdf(-40.0) >= 0.0);
    CHECK(normal_cdf(-10.0) == doctest::Approx(7.61985302416e-24).epsilon(1e-9));
}

TEST_CASE("expansion arithmetic") {
    EdgeworthParams p;
    p.sigma = 1.0;
    p.skew = 0.6;
    p.bias_b = -0.3;
    p.bias_d = -0.4;
    p.n = 100;
    CHECK(edgeworth_coeff_cdf(p, 0.0) == doctest::Approx(0.5319154).epsilon(1e-7));

    EdgeworthParams q;
    q.sigma = 0.6931;
    q.bias_d = -std::log(2.0);
    q.n = 400;
    const double diff = edgeworth_coeff_cdf(q, 0.0) - edgeworth_cocycle_cdf(q, 0.0);
    CHECK(diff == doctest::Approx(std::log(2.0) / (0.6931 * 20.0) * normal_pdf(0.0)).epsilon(1e-12));
    CHECK(diff == doctest::Approx(0.0199471).epsilon(1e-4));

    q.bias_d = 0.0;
    for (double t : {-2.0, 0.3, 1.7}) CHECK(edgeworth_coeff_cdf(q, t) == edgeworth_cocycle_cdf(q, t));

    EdgeworthParams z;
    z.sigma = 0.8;
    z.n = 50;
    for (double t : {-3.0, -0.5, 0.0, 2.2}) CHECK(edgeworth_coeff_cdf(z, t) == normal_cdf(t));

    EdgeworthParams far = p;
    far.mass = 0.7;
    far.n = 1000000000000ULL;
    CHECK(edgeworth_coeff_cdf(far, 0.4) == doctest::Approx(0.7 * normal_cdf(0.4)).epsilon(1e-6));

    EdgeworthParams bad;
    bad.sigma = 0.0;
    CHECK_THROWS_AS(edgeworth_coeff_cdf(bad, 0.0), DomainError);
}

TEST_CASE("ecdf tables") {
    const EcdfTable e(std::vector<double>{3.0, 1.0, 2.0, 2.0});
    CHECK(e(0.5) == 0.0);
    CHECK(e(1.0) == 0.25);
    CHECK(e(2.0) == 0.75);
    CHECK(e(10.0) == 1.0);

    const std::vector<double> xs{0.0, 1.0}, ws{1.0, 3.0};
    const EcdfTable w(xs, ws);
    CHECK(w(0.0) == 0.25);
    CHECK(w(1.0) == 1.0);
    const EcdfTable sub(xs, ws, 8.0);
    CHECK(sub(0.5) == 0.125);
    CHECK(sub(2.0) == 0.5);
}

TEST_CASE("kolmogorov distances") {
    CHECK(ecdf_ks(std::vector<double>{0.0}, normal_cdf) == doctest::Approx(0.5));

    const std::size_t N = 1000;
    const boost::math::normal nd;
    std::vector<double> q(N);
    for (std::size_t i = 0; i < N; ++i) q[i] = boost::math::quantile(nd, (i + 0.5) / N);
    CHECK(ecdf_ks(q, normal_cdf) == doctest::Approx(0.5 / N).epsilon(1e-9));

    RngStream rng(2024);
    std::vector<double> z(1000000);
    for (auto& v : z) v = rng.normal();
    CHECK(ecdf_ks(z, normal_cdf) <= 1.95 / 1000.0);

    const auto grid = t_grid();
    CHECK(grid.size() == 241);
    CHECK(grid.front() == -6.0);
    CHECK(grid.back() == 6.0);
    CHECK(grid[120] == doctest::Approx(0.0));
}

namespace {

MatrixModel rdr() { return MatrixModel::rotation_diag_rotation("rdr", 1.0); }

} // namespace

TEST_CASE("sandwich diagnostic") {
    const ProjectiveGrid g(512);
    const auto model = rdr();
    const auto spec = solve_spectral(model, 0.0, g);
    const auto x = ProjectivePoint::from_angle(0.0);
    const auto y = DualPoint::from_angle(0.3);

    SUBCASE("holds on rdr at n = 256") {
        const PartitionScheme p(256);
        const auto rep =
            sandwich_diagnostic(model, spec, g, p, x, y, constant_function(g, 1.0), 0.0, 100000, RngStream(5));
        CHECK(rep.rows.size() == static_cast<std::size_t>(p.M() + 1));
        CHECK(rep.rows[3].ok);
        CHECK(rep.rows[3].F > 0.0);
        CHECK(rep.rows[3].lower <= rep.rows[3].F);
        CHECK(rep.rows[3].F <= rep.rows[3].upper);
        CHECK(rep.ok());
    }
    SUBCASE("zero phi") {
        const PartitionScheme p(64);
        const auto rep =
            sandwich_diagnostic(model, spec, g, p, x, y, constant_function(g, 0.0), 0.0, 1000, RngStream(5));
        for (const auto& r : rep.rows) {
            CHECK(r.F == 0.0);
            CHECK(r.upper == 0.0);
            CHECK(r.lower == 0.0);
        }
        CHECK(rep.W_n == 0.0);
    }
    SUBCASE("large threshold collapses the sandwich") {
        const PartitionScheme p(64);
        const auto rep =
            sandwich_diagnostic(model, spec, g, p, x, y, constant_function(g, 1.0), 1e6, 2000, RngStream(6));
        double total = 0.0;
        for (const auto& r : rep.rows) {
            CHECK(r.F == r.upper);
            CHECK(r.F == r.lower);
            total += r.F;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}
