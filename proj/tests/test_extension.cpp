#include <cmath>
#include <random>

#include <doctest.h>

#include "hjbtk/extension.hpp"
#include "hjbtk/mesh.hpp"
#include "hjbtk/trajectories.hpp"

using namespace hjbtk;

TEST_CASE("extended points sit on S(A), poles exact") {
    const Vec dir{1.0};
    auto rest = extended_point(dir, 0.0, 2);
    CHECK(rest.w0 == 1.0);
    CHECK(rest.w == Vec{0.0});
    auto edge = extended_point(dir, 1.0, 2);
    CHECK(edge.w0 == 0.0);
    CHECK(edge.w == Vec{1.0});

    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int q : {1, 2, 3}) {
        for (int i = 0; i < 50; ++i) {
            auto p = extended_point(dir, u(rng), q);
            CHECK(p.defect(q) <= 1e-10);
        }
    }
}

TEST_CASE("extended data of example-3-3") {
    auto ext = extend(builtin("example-3-3"));
    const Vec x{1.5, -0.5};
    Vec out(2);

    SUBCASE("interior face matches the w0^q scaling") {
        const double w0 = 0.5, w = 0.25;
        ext.f_bar(x, w0, Vec{w}, out);
        CHECK(out[0] == doctest::Approx(w));  // f1 = a scaled back
        CHECK(out[1] == doctest::Approx((std::abs(x[0]) + std::abs(x[1])) * w0));
        CHECK(ext.l_bar(x, w0, Vec{w}) ==
              doctest::Approx(dot(x, x) * w0 + std::abs(w)));
    }
    SUBCASE("recession face") {
        ext.f_bar(x, 0.0, Vec{-1.0}, out);
        CHECK(out[0] == doctest::Approx(-1.0));
        CHECK(out[1] == 0.0);
        CHECK(ext.l_bar(x, 0.0, Vec{-1.0}) == doctest::Approx(1.0));
    }
    SUBCASE("(w0,w) = (1,0) reduces to the original data at a = 0") {
        ext.f_bar(x, 1.0, Vec{0.0}, out);
        CHECK(out[0] == 0.0);
        CHECK(out[1] ==
              doctest::Approx(std::abs(x[0]) + std::abs(x[1])));
        CHECK(ext.l_bar(x, 1.0, Vec{0.0}) == doctest::Approx(dot(x, x)));
    }
}

TEST_CASE("extend guards") {
    CHECK_THROWS_AS(extend(builtin("example-4-1")), PreconditionError);
    ControlProblem lqr = builtin("lqr-1d");
    lqr.f_recession.reset();  // q > p: synthesized zero recession
    auto ext = extend(std::move(lqr));
    Vec out(1);
    ext.f_bar(Vec{2.0}, 0.0, Vec{1.0}, out);
    CHECK(out[0] == 0.0);
}

TEST_CASE("q-homogeneity of the extended data (sampled)") {
    auto ext = extend(builtin("example-3-3"));
    const int q = ext.q();
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> ux(-2.0, 2.0);
    std::uniform_real_distribution<double> ur(0.1, 2.0);
    for (int i = 0; i < 200; ++i) {
        const Vec x{ux(rng), ux(rng)};
        const double w0 = std::abs(ux(rng)) + 0.05;
        const Vec w{ux(rng)};
        const double rho = ur(rng);
        Vec f1(2), f2(2);
        ext.f_bar(x, rho * w0, Vec{rho * w[0]}, f1);
        ext.f_bar(x, w0, w, f2);
        const double s = std::pow(rho, q);
        for (int d = 0; d < 2; ++d)
            CHECK(f1[d] ==
                  doctest::Approx(s * f2[d]).epsilon(1e-8).scale(1.0));
        CHECK(ext.l_bar(x, rho * w0, Vec{rho * w[0]}) ==
              doctest::Approx(s * ext.l_bar(x, w0, w)).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("extended coercivity on the S(A) mesh") {
    auto pr = builtin("example-3-3");
    auto ext = extend(pr);
    auto mesh = mesh_sphere_radius(pr, 17);
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> ux(-2.0, 2.0);
    const auto& g = pr.growth;
    for (int i = 0; i < 50; ++i) {
        const Vec x{ux(rng), ux(rng)};
        for (const Vec& pt : mesh.points) {
            ConstSpan w(pt.data() + 1, pt.size() - 1);
            const double lb = ext.l_bar(x, pt[0], w);
            const double rhs = g.C2 * std::pow(norm2(w), g.q) -
                               g.C1 * std::pow(pt[0], g.q);
            CHECK(lb >= rhs - 1e-10);
        }
    }
}

TEST_CASE("timed controls") {
    TimedControl c{{0.0, 1.0, 2.0}, {{1.0}, {-1.0}}};
    CHECK_NOTHROW(c.validate());
    CHECK(c.at(0.5) == Vec{1.0});
    CHECK(c.at(1.0) == Vec{-1.0});
    CHECK(c.at(5.0) == Vec{-1.0});

    TimedControl bad{{0.0, 1.0}, {{1.0}, {2.0}}};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    TimedControl unordered{{0.0, 2.0, 1.0}, {{1.0}, {2.0}}};
    CHECK_THROWS_AS(unordered.validate(), ConfigError);
}

TEST_CASE("reparametrization forward map, q = 1") {
    auto pr = builtin("example-3-3");
    SUBCASE("rest control is fixed") {
        TimedControl alpha{{0.0, 2.0}, {{0.0}}};
        auto rep = ordinary_to_extended(alpha, pr);
        CHECK(rep.control.values[0][0] == doctest::Approx(1.0));  // w0
        CHECK(rep.control.values[0][1] == 0.0);
        CHECK(rep.control.breakpoints.back() == doctest::Approx(2.0));
    }
    SUBCASE("constant control") {
        TimedControl alpha{{0.0, 1.0}, {{1.0}}};
        auto rep = ordinary_to_extended(alpha, pr);
        // rate = 1 + |c| = 2: s(1) = 2, w = 1/2, w0 = 1/2
        CHECK(rep.control.breakpoints.back() == doctest::Approx(2.0));
        CHECK(rep.control.values[0][0] == doctest::Approx(0.5));
        CHECK(rep.control.values[0][1] == doctest::Approx(0.5));
    }
}

TEST_CASE("reparametrization inverse map and round trip") {
    auto pr = builtin("example-3-3");
    SUBCASE("explicit inverse, q = 1") {
        TimedControl ext{{0.0, 2.0}, {{0.5, 0.5}}};
        auto rep = extended_to_ordinary(ext, pr);
        CHECK(rep.control.values[0][0] == doctest::Approx(1.0));
        // t(s) = s/2
        CHECK(rep.control.breakpoints.back() == doctest::Approx(1.0));
    }
    SUBCASE("round trip reproduces the control") {
        std::mt19937 rng(9);
        std::uniform_real_distribution<double> u(-2.0, 2.0);
        for (int trial = 0; trial < 25; ++trial) {
            TimedControl alpha;
            alpha.breakpoints = {0.0, 0.4, 1.1, 2.0};
            for (int i = 0; i < 3; ++i) alpha.values.push_back({u(rng)});
            auto there = ordinary_to_extended(alpha, pr);
            auto back = extended_to_ordinary(there.control, pr);
            REQUIRE(back.control.values.size() == alpha.values.size());
            for (std::size_t i = 0; i < alpha.values.size(); ++i) {
                CHECK(back.control.values[i][0] ==
                      doctest::Approx(alpha.values[i][0]).epsilon(1e-10));
                CHECK(back.control.breakpoints[i + 1] ==
                      doctest::Approx(alpha.breakpoints[i + 1]).epsilon(1e-10));
            }
        }
    }
    SUBCASE("vanishing w0 has no inverse") {
        TimedControl ext{{0.0, 1.0}, {{0.0, 1.0}}};
        CHECK_THROWS_AS(extended_to_ordinary(ext, pr), NonInvertibleTime);
    }
}

TEST_CASE("generalized trajectory: jump control of example-3-3") {
    auto ext = extend(builtin("example-3-3"));
    // w = -1 (w0 = 0) on s in [0,1], then rest at the pole
    TimedControl ctrl{{0.0, 1.0, 5.0}, {{0.0, -1.0}, {1.0, 0.0}}};
    auto gt = generalized_trajectory(Vec{1.0, 0.0}, ctrl, ext, 5.0, 1e-3);
    CHECK(gt.extended_cost == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(norm2(gt.xi.back()) < 1e-9);
    REQUIRE(gt.jumps.size() == 1);
    CHECK(gt.jumps[0].first == doctest::Approx(0.0));   // at physical time 0
    CHECK(gt.jumps[0].second == doctest::Approx(1.0));  // displacement 1
    CHECK(!gt.truncated);
    // physical time only advances on the w0 = 1 piece
    CHECK(gt.t.back() == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("generalized trajectory: w0 = 1 is the ordinary flow") {
    auto pr = builtin("example-3-3");
    auto ext = extend(pr);
    TimedControl rest{{0.0, 1.0}, {{1.0, 0.0}}};
    auto gt = generalized_trajectory(Vec{0.5, 0.25}, rest, ext, 1.0, 1e-3);
    CHECK(gt.jumps.empty());
    TimedControl alpha{{0.0, 1.0}, {{0.0}}};
    auto tr = integrate(pr, Vec{0.5, 0.25}, alpha, 1.0, 1e-3);
    for (int d = 0; d < 2; ++d)
        CHECK(gt.xi.back()[d] ==
              doctest::Approx(tr.states.back()[d]).epsilon(1e-8));
}

TEST_CASE("payoff equality under reparametrization (sampled)") {
    auto pr = builtin("example-3-3");
    auto ext = extend(pr);
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (int trial = 0; trial < 10; ++trial) {
        TimedControl alpha;
        alpha.breakpoints = {0.0, 0.3, 0.7, 1.0};
        for (int i = 0; i < 3; ++i) alpha.values.push_back({u(rng)});
        const Vec x{u(rng), u(rng)};
        auto tr = integrate(pr, x, alpha, 1.0, 1e-3);
        auto rep = ordinary_to_extended(alpha, pr);
        auto gt = generalized_trajectory(x, rep.control, ext,
                                         rep.control.breakpoints.back(), 1e-3);
        CHECK(gt.extended_cost ==
              doctest::Approx(tr.payoff.back()).epsilon(1e-4).scale(1.0));
        for (int d = 0; d < 2; ++d)
            CHECK(gt.xi.back()[d] ==
                  doctest::Approx(tr.states.back()[d]).epsilon(1e-4).scale(1.0));
    }
}

TEST_CASE("S(A) mesh contains both poles and satisfies membership") {
    auto pr = builtin("example-3-3");
    auto mesh = mesh_sphere_radius(pr, 9);
    REQUIRE(mesh.extended);
    bool has_rest = false, has_edge = false;
    for (const Vec& pt : mesh.points) {
        ExtendedControlPoint e{pt[0], Vec(pt.begin() + 1, pt.end())};
        CHECK(e.defect(pr.growth.q) <= 1e-10);
        if (pt[0] == 1.0) has_rest = true;
        if (pt[0] == 0.0) has_edge = true;
    }
    CHECK(has_rest);
    CHECK(has_edge);
}
