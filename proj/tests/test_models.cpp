#include "glcoef/models.hpp"

#include <doctest.h>

#include <cmath>

using namespace glcoef;

namespace {

Matrix diag2(double a, double b) {
    Matrix g = Matrix::Zero(2, 2);
    g(0, 0) = a;
    g(1, 1) = b;
    return g;
}

} // namespace

TEST_CASE("point mass samples its matrix") {
    Matrix a(2, 2);
    a << 2, 1, 1, 1;
    const auto m = MatrixModel::finite_support("A", {a}, {1.0});
    RngStream rng(77);
    for (int i = 0; i < 10; ++i) CHECK(m.sample(rng) == a);
}

TEST_CASE("two-point model frequency within the binomial 3 sigma band") {
    const auto m = MatrixModel::finite_support("AB", {diag2(2, 0.5), diag2(3, 1.0 / 3)}, {0.3, 0.7});
    RngStream rng(1);
    const std::size_t n = 1000000;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (m.sample(rng)(0, 0) == 2.0) ++hits;
    const double sd = std::sqrt(0.3 * 0.7 / static_cast<double>(n));
    const double freq = static_cast<double>(hits) / static_cast<double>(n);
    CHECK(std::abs(freq - 0.3) <= 3.0 * sd);
    CHECK(freq >= 0.2986);
    CHECK(freq <= 0.3014);
}

TEST_CASE("sampling is a function of the stream") {
    const auto m = MatrixModel::rotation_diag_rotation("rdr", 1.0);
    RngStream a(5, {9}), b(5, {9});
    for (int i = 0; i < 50; ++i) CHECK(m.sample(a) == m.sample(b));
}

TEST_CASE("model validation") {
    Matrix sing(2, 2);
    sing << 1, 2, 2, 4;
    CHECK_THROWS_AS(MatrixModel::finite_support("s", {sing}, {1.0}), DomainError);
    CHECK_THROWS_AS(MatrixModel::finite_support("p", {diag2(1, 1), diag2(2, 1)}, {0.5, 0.6}), DomainError);
    CHECK_THROWS_AS(MatrixModel::finite_support("n", {diag2(1, 1), diag2(2, 1)}, {1.5, -0.5}), DomainError);
    CHECK_THROWS_AS(MatrixModel::finite_support("e", {}, {}), DomainError);
    CHECK_THROWS_AS(MatrixModel::scalar_rotation("c", 2, {0.0}, {1.0}), DomainError);
    CHECK_THROWS_AS(MatrixModel::scalar_rotation("d", 1, {2.0}, {1.0}), DomainError);
    CHECK_THROWS_AS(MatrixModel::rotation_diag_rotation("r", std::vector<double>{1.0, 2.0, 3.0, 4.0, 5.0, 6.0,
                                                                                  7.0, 8.0, 9.0}),
                    DomainError);
}

TEST_CASE("scalar-rotation and rdr samples have the prescribed singular values") {
    RngStream rng(3);
    const auto sr = MatrixModel::scalar_rotation("sr", 3, {2.0, 0.5}, {0.5, 0.5});
    const auto rdr = MatrixModel::rotation_diag_rotation("rdr", std::vector<double>{0.7, 0.0, -0.7});
    for (int i = 0; i < 20; ++i) {
        const Matrix g = sr.sample(rng);
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
        const auto sv = svd.singularValues();
        CHECK(sv(0) == doctest::Approx(sv(2)).epsilon(1e-12));
        const Matrix h = rdr.sample(rng);
        const Eigen::JacobiSVD<Eigen::MatrixXd> svd2(h);
        CHECK(svd2.singularValues()(0) == doctest::Approx(std::exp(0.7)).epsilon(1e-12));
        CHECK(svd2.singularValues()(2) == doctest::Approx(std::exp(-0.7)).epsilon(1e-12));
    }
}

TEST_CASE("haar rotations are orthogonal with unit determinant") {
    RngStream rng(8);
    for (int d : {2, 3, 5}) {
        const Matrix o = haar_rotation(d, rng);
        CHECK((o.transpose() * o - identity_matrix(d)).norm() < 1e-13);
        CHECK(o.determinant() == doctest::Approx(1.0));
    }
    // mean of the (0,0) entry of a Haar rotation in SO(2) is E cos = 0
    double s = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) s += haar_rotation(2, rng)(0, 0);
    CHECK(std::abs(s / n) < 4.0 * std::sqrt(0.5 / n));
}

TEST_CASE("conorm and moments") {
    CHECK(conorm(identity_matrix(2)) == doctest::Approx(1.0));
    CHECK(conorm(diag2(2, 0.5)) == doctest::Approx(2.0));
    CHECK(conorm(diag2(2, 4)) == doctest::Approx(4.0));

    RngStream rng(2);
    const auto id = MatrixModel::finite_support("I", {identity_matrix(2)}, {1.0});
    for (double eps : {0.3, 1.0, 2.0}) CHECK(estimate_moment(id, eps, 1000, rng).mean == 1.0);
    const auto d2 = MatrixModel::finite_support("D", {diag2(2, 0.5)}, {1.0});
    CHECK(estimate_moment(d2, 1.0, 1000, rng).mean == doctest::Approx(2.0).epsilon(1e-14));

    const auto mix = MatrixModel::finite_support("mix", {diag2(2, 0.5), diag2(3, 1.0 / 3)}, {0.5, 0.5});
    const auto est = estimate_moment(mix, 1.0, 100000, rng);
    CHECK(est.ok());
    CHECK(std::abs(est.mean - 2.5) <= 4.0 * est.std_error);
    CHECK(est.std_error == doctest::Approx(0.5 / std::sqrt(100000.0)).epsilon(0.05));
    CHECK_THROWS_AS(estimate_moment(mix, 0.0, 10, rng), DomainError);
}

TEST_CASE("proximality diagnostics") {
    RngStream rng(4);
    const auto sr = MatrixModel::scalar_rotation("sr", 2, {2.0, 0.5}, {0.5, 0.5});
    const auto rep = proximality_check(sr, 500, 4, rng);
    CHECK(std::abs(rep.proximality_slope) < 1e-10);
    CHECK_FALSE(rep.proximality_detected);

    const auto d2 = MatrixModel::finite_support("D", {diag2(2, 0.5)}, {1.0});
    const auto rd = proximality_check(d2, 200, 2, rng);
    CHECK(rd.proximality_slope == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-10));
    CHECK(rd.proximality_detected);

    const auto rdr = MatrixModel::rotation_diag_rotation("rdr", 1.0);
    const auto rr = proximality_check(rdr, 2000, 8, rng);
    CHECK(rr.proximality_slope > 0.5);
    CHECK(rr.proximality_detected);
    CHECK_THROWS_AS(proximality_check(rdr, 50, 2, rng), DomainError);
}

TEST_CASE("irreducibility heuristic") {
    RngStream rng(6);
    // diagonal matrices preserve the two coordinate axes
    const auto diag = MatrixModel::finite_support("D", {diag2(2, 0.5), diag2(3, 1.0 / 3)}, {0.5, 0.5});
    CHECK_FALSE(irreducibility_heuristic(diag, 1000, rng));
    // a diagonal matrix and the swap preserve the union of the axes
    Matrix swap(2, 2);
    swap << 0, 1, 1, 0;
    const auto ds = MatrixModel::finite_support("DS", {diag2(2, 0.5), swap}, {0.5, 0.5});
    CHECK_FALSE(irreducibility_heuristic(ds, 1000, rng));
    Matrix a(2, 2);
    a << 2, 1, 1, 1;
    const auto ar = MatrixModel::finite_support("AR", {a, rotation2(1.0)}, {0.5, 0.5});
    CHECK(irreducibility_heuristic(ar, 1000, rng));
    CHECK(irreducibility_heuristic(MatrixModel::rotation_diag_rotation("rdr", 1.0), 1000, rng));
}

TEST_CASE("check_conditions bundles the diagnostics") {
    RngStream rng(10);
    Matrix a(2, 2);
    a << 2, 1, 1, 1;
    const auto ar = MatrixModel::finite_support("AR", {a, rotation2(1.0)}, {0.5, 0.5});
    const auto rep = check_conditions(ar, 1.0, 10000, 1000, 4, rng);
    CHECK(rep.moment_samples == 10000);
    CHECK(rep.moment_overflows == 0);
    CHECK(rep.proximality_detected);
    CHECK(rep.irreducibility_flag);
}
