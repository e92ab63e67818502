#include <cmath>
#include <random>

#include <doctest.h>

#include "hjbtk/oracles.hpp"

using namespace hjbtk;

TEST_CASE("scalar riccati closed form") {
    CHECK(riccati_p(1.0, 1.0, 0.0) == doctest::Approx(1.0));
    CHECK(riccati_value(1.0, 1.0, 0.0, 2.0) == doctest::Approx(4.0));
    CHECK(riccati_p(1.0, 1.0, 3.0) ==
          doctest::Approx((-3.0 + std::sqrt(13.0)) / 2.0));
    CHECK(riccati_value(0.0, 1.0, 0.7, 5.0) == 0.0);
    CHECK(riccati_p(4.0, 9.0, 0.0) == doctest::Approx(6.0));  // sqrt(QR)
    CHECK_THROWS_AS(riccati_p(1.0, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(riccati_p(1.0, -1.0, 0.0), DomainError);
    CHECK_THROWS_AS(riccati_p(-1.0, 1.0, 0.0), DomainError);
}

TEST_CASE("riccati residual and delta-monotonicity (sampled)") {
    std::mt19937 rng(19);
    std::uniform_real_distribution<double> u(0.1, 5.0);
    for (int i = 0; i < 200; ++i) {
        const double Q = u(rng), R = u(rng), d = u(rng) - 0.1;
        const double P = riccati_p(Q, R, d);
        CHECK(std::abs(P * P / R + d * P - Q) <= 1e-10);
    }
    const double Q = 2.0, R = 3.0;
    double prev = riccati_p(Q, R, 4.0);
    for (double d : {2.0, 1.0, 0.5, 0.25, 0.125, 1e-4}) {
        const double P = riccati_p(Q, R, d);
        CHECK(P >= prev - 1e-12);
        prev = P;
    }
    CHECK(prev == doctest::Approx(std::sqrt(Q * R)).epsilon(1e-3));
}

TEST_CASE("matrix riccati agrees with the diagonal closed form") {
    const int n = 2;
    const Mat Q{3.0, 0.0, 0.0, 5.0};
    const Mat R{2.0, 0.0, 0.0, 7.0};
    const Mat P = riccati_matrix(Q, R, n, 0.4);
    CHECK(P[0] == doctest::Approx(riccati_p(3.0, 2.0, 0.4)).epsilon(1e-7));
    CHECK(P[3] == doctest::Approx(riccati_p(5.0, 7.0, 0.4)).epsilon(1e-7));
    CHECK(std::abs(P[1]) < 1e-8);
    CHECK(std::abs(P[2]) < 1e-8);
}

TEST_CASE("matrix riccati with coupling: P is the matrix square root at R=I") {
    const int n = 2;
    const Mat Q{2.0, 1.0, 1.0, 2.0};
    const Mat R{1.0, 0.0, 0.0, 1.0};
    const Mat P = riccati_matrix(Q, R, n, 0.0);
    // sqrt of [[2,1],[1,2]]: eigenvalues 1 and 3 on (1,-1)/(1,1)
    const double a = (std::sqrt(3.0) + 1.0) / 2.0;
    const double b = (std::sqrt(3.0) - 1.0) / 2.0;
    CHECK(P[0] == doctest::Approx(a).epsilon(1e-6));
    CHECK(P[1] == doctest::Approx(b).epsilon(1e-6));
    CHECK(P[2] == doctest::Approx(b).epsilon(1e-6));
    CHECK(P[3] == doctest::Approx(a).epsilon(1e-6));

    const double v = riccati_value(Q, R, n, 0.0, Vec{1.0, -1.0});
    CHECK(v == doctest::Approx(2.0 * a - 2.0 * b).epsilon(1e-6));
}

TEST_CASE("matrix riccati guards") {
    CHECK_THROWS_AS(riccati_matrix({1.0, 0.0, 0.0, 1.0}, {1.0, 0.0, 0.0, -1.0},
                                   2, 0.0),
                    DomainError);
    CHECK_THROWS_AS(riccati_matrix({1.0, 2.0, 0.0, 1.0}, {1.0, 0.0, 0.0, 1.0},
                                   2, 0.0),
                    DomainError);
}

TEST_CASE("example ground truths") {
    auto t33 = example_truth("example-3-3");
    REQUIRE(!t33.empty());
    CHECK(t33[0].cmp == TruthAssertion::Cmp::LE);
    CHECK(t33[0].expected == doctest::Approx(1.0));
    CHECK(t33[0].point == Vec{1.0, 0.0});

    auto t41 = example_truth("example-4-1");
    CHECK(t41[0].expected == 0.0);

    auto lqr = example_truth("lqr-1d");
    CHECK(lqr[0].expected == doctest::Approx(1.0));

    auto erg = example_truth("ergodic-torus-1d");
    CHECK(erg[0].expected == doctest::Approx(1.0));

    CHECK_THROWS_AS(example_truth("nope"), LookupError);
}
