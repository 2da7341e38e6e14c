#include "glcoef/projective.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

using namespace glcoef;

namespace {

Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

Matrix diag2(double a, double b) {
    Matrix g = Matrix::Zero(2, 2);
    g(0, 0) = a;
    g(1, 1) = b;
    return g;
}

const ProjectivePoint e1(vec2(1, 0));
const ProjectivePoint e2(vec2(0, 1));
const DualPoint f1(vec2(1, 0));
const DualPoint f2(vec2(0, 1));

} // namespace

TEST_CASE("canonical representatives") {
    const ProjectivePoint a(vec2(-3, -4)), b(vec2(0.6, 0.8));
    CHECK(a.vector()(0) == doctest::Approx(0.6));
    CHECK((a.vector() - b.vector()).norm() < 1e-15);
    CHECK(ProjectivePoint(vec2(0, -2)) == e2);
    CHECK(ProjectivePoint::from_angle(kPi / 2).angle() == doctest::Approx(kPi / 2));
    CHECK(ProjectivePoint::from_angle(kPi + 0.3).angle() == doctest::Approx(0.3));
    CHECK_THROWS_AS(ProjectivePoint(vec2(0, 0)), DomainError);
}

TEST_CASE("projective action") {
    const ProjectivePoint x = ProjectivePoint::from_angle(0.4);
    CHECK(act(identity_matrix(2), x) == x);
    CHECK(act(diag2(2, 0.5), e1) == e1);
    CHECK((act(rotation2(kPi / 2), e1).vector() - e2.vector()).norm() < 1e-15);
    CHECK_THROWS_AS(act(Matrix::Zero(2, 2), x), SingularMatrixError);
}

TEST_CASE("norm cocycle") {
    const ProjectivePoint x = ProjectivePoint::from_angle(1.1);
    CHECK(cocycle(2.0 * identity_matrix(2), x) == doctest::Approx(std::log(2.0)));
    CHECK(cocycle(diag2(2, 0.5), e1) == doctest::Approx(std::log(2.0)));
    const ProjectivePoint d(vec2(1, 1));
    CHECK(cocycle(diag2(2, 0.5), d) == doctest::Approx(0.5 * std::log(4.25 / 2.0)).epsilon(1e-14));
    // the value quoted by the module docs, log sqrt(4.25) - log sqrt(2)
    CHECK(cocycle(diag2(2, 0.5), d) == doctest::Approx(0.72345 - 0.5 * std::log(2.0)).epsilon(1e-5));
    const auto r = act_with_cocycle(diag2(2, 0.5), d);
    CHECK(r.sigma == cocycle(diag2(2, 0.5), d));
    CHECK(r.x == act(diag2(2, 0.5), d));
}

TEST_CASE("cocycle identity sigma(gh, x) = sigma(g, h x) + sigma(h, x)") {
    RngStream rng(4);
    const auto m = MatrixModel::rotation_diag_rotation("rdr", 1.3);
    for (int i = 0; i < 100; ++i) {
        const Matrix g = m.sample(rng), h = m.sample(rng);
        const auto x = ProjectivePoint::from_angle(rng.uniform(0, kPi));
        const Matrix gh = g * h;
        CHECK(cocycle(gh, x) == doctest::Approx(cocycle(g, act(h, x)) + cocycle(h, x)).epsilon(1e-13));
    }
}

TEST_CASE("delta and log delta") {
    CHECK(delta(e1, f1) == 1.0);
    CHECK(delta(e1, f2) == 0.0);
    CHECK(log_delta(e1, f2) == -std::numeric_limits<double>::infinity());
    const ProjectivePoint d(vec2(1, 1));
    CHECK(delta(d, f1) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(log_delta(d, f1) <= 0.0);
}

TEST_CASE("angular distance") {
    const auto x = ProjectivePoint::from_angle(0.7);
    CHECK(angular_distance(x, x) == 0.0);
    CHECK(angular_distance(e1, e2) == doctest::Approx(1.0));
    CHECK(angular_distance(ProjectivePoint::from_angle(0.2), ProjectivePoint::from_angle(0.2 + kPi / 6)) ==
          doctest::Approx(0.5));
    CHECK(angular_distance(f1, DualPoint::from_angle(kPi / 6)) == doctest::Approx(0.5));
    Vector a(3), b(3);
    a << 1, 2, 2;
    b << 0, 0, 1;
    // |sin| of the angle between (1,2,2)/3 and e3: sqrt(1 - (2/3)^2)
    CHECK(angular_distance(ProjectivePoint(a), ProjectivePoint(b)) == doctest::Approx(std::sqrt(5.0) / 3.0));
    CHECK(line_angle(-1.0, -1.0) == doctest::Approx(kPi / 4));
    CHECK(line_angle(1.0, -1.0) == doctest::Approx(3 * kPi / 4));
}

TEST_CASE("walks on point masses") {
    RngStream rng(1);
    const auto two = MatrixModel::finite_support("2I", {2.0 * identity_matrix(2)}, {1.0});
    const auto x0 = ProjectivePoint::from_angle(0.9);
    const auto w = walk(two, x0, std::nullopt, 10, rng);
    CHECK(w.S == doctest::Approx(10 * std::log(2.0)).epsilon(1e-15));
    CHECK(w.x == x0);
    CHECK_FALSE(w.has_dual);

    const auto d = MatrixModel::finite_support("D", {diag2(2, 0.5)}, {1.0});
    const auto wd = walk(d, e1, f1, 20, rng);
    CHECK(wd.S == doctest::Approx(20 * std::log(2.0)).epsilon(1e-15));
    CHECK(wd.x == e1);
    CHECK(wd.log_coeff() == doctest::Approx(20 * std::log(2.0)));
    CHECK_FALSE(wd.degenerate());
    CHECK_THROWS_AS(walk(d, e1, f1, 0, rng), DomainError);
}

TEST_CASE("direct coefficient products") {
    const std::vector<Matrix> one{diag2(2, 0.5)};
    CHECK(coeff_log_direct(one, vec2(1, 0), vec2(1, 0)) == doctest::Approx(std::log(2.0)));
    const std::vector<Matrix> rot{rotation2(kPi / 2)};
    Matrix r(2, 2);
    r << 0, -1, 1, 0;
    const std::vector<Matrix> exact{r};
    CHECK(coeff_log_direct(exact, vec2(1, 0), vec2(1, 0)) == -std::numeric_limits<double>::infinity());
    CHECK(coeff_log_rescaled(exact, vec2(1, 0), vec2(1, 0)) == -std::numeric_limits<double>::infinity());

    std::vector<Matrix> big(2000, diag2(4.0, 0.25));
    CHECK_THROWS_AS(coeff_log_direct(big, vec2(1, 1), vec2(1, 0)), OverflowError);
    CHECK(coeff_log_rescaled(big, vec2(1, 1), vec2(1, 0)) == doctest::Approx(2000 * std::log(4.0) - 0.5 * std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("walk decomposition matches the naive product for short horizons") {
    RngStream rng(12);
    for (const auto& model : {MatrixModel::rotation_diag_rotation("rdr", 1.0),
                              MatrixModel::rotation_diag_rotation("rdr3", std::vector<double>{0.5, 0.1, -0.6})}) {
        const int d = model.dimension();
        for (int trial = 0; trial < 200; ++trial) {
            Vector v = Vector::Zero(d), f = Vector::Zero(d);
            for (int i = 0; i < d; ++i) {
                v(i) = rng.normal();
                f(i) = rng.normal();
            }
            const std::size_t n = 1 + trial % 8;
            std::vector<Matrix> gs;
            RngStream path = rng.split(trial);
            const auto rec = walk_observed(model, ProjectivePoint(v), DualPoint(f), n, path,
                                           [&](std::size_t, const Matrix& g, const WalkState&) { gs.push_back(g); });
            const double direct = coeff_log_direct(gs, v.normalized(), f.normalized());
            CHECK(std::abs(rec.log_coeff() - direct) <= 1e-12);
            Vector p = v.normalized();
            for (const auto& g : gs) p = g * p;
            CHECK(std::abs(rec.S - std::log(p.norm())) <= 1e-12);
        }
    }
}
