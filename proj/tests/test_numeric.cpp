#include "glcoef/numeric.hpp"
#include "glcoef/parallel.hpp"
#include "glcoef/rng.hpp"
#include "glcoef/types.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace glcoef;

TEST_CASE("compensated and pairwise sums") {
    CompensatedSum cs;
    cs.add(1.0);
    for (int i = 0; i < 1000; ++i) cs.add(1e-16);
    cs.add(-1.0);
    CHECK(cs.value() == doctest::Approx(1e-13).epsilon(1e-10));

    std::vector<double> xs(10001, 0.1);
    CHECK(pairwise_sum(xs) == doctest::Approx(1000.1).epsilon(1e-15));
    CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}

TEST_CASE("mean, standard error and line fit") {
    const std::vector<double> xs{1, 2, 3, 4};
    const auto me = mean_and_error(xs);
    CHECK(me.mean == 2.5);
    // sample sd sqrt(5/3), divided by 2
    CHECK(me.std_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));

    const std::vector<double> t{0, 1, 2, 3, 4}, y{1, 3, 5, 7, 9};
    const auto fit = fit_line(t, y);
    CHECK(fit.slope == doctest::Approx(2.0));
    CHECK(fit.intercept == doctest::Approx(1.0));
}

TEST_CASE("rng streams are keyed, reproducible and independent") {
    RngStream a(5, {1, 2}), b(5, {1, 2}), c(5, {1, 3});
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        if (u != c.uniform()) differs = true;
    }
    CHECK(differs);
    const RngStream root(9);
    RngStream s1 = root.split(4), s2 = root.split(4);
    CHECK(s1.next_u64() == s2.next_u64());
    CHECK(root.split(4).key() != root.split(5).key());
    CHECK(tag_of("walk") != tag_of("bias"));
}

TEST_CASE("parallel_for visits every index once for any thread count") {
    for (unsigned threads : {1u, 2u, 5u}) {
        std::vector<int> hits(1000, 0);
        parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i] += 1; });
        for (int h : hits) CHECK(h == 1);
    }
    CHECK_THROWS_AS(parallel_for(10, 3,
                                 [](std::size_t i) {
                                     if (i == 7) throw DomainError("boom");
                                 }),
                    DomainError);
    CHECK(default_thread_count() >= 1);
}
