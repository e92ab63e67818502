#include <cmath>
#include <random>

#include <doctest.h>

#include "hjbtk/trajectories.hpp"

using namespace hjbtk;

namespace {

ControlProblem still_problem() {
    ControlProblem pr;
    pr.n = 2;
    pr.control_set = ControlSetDescriptor::box({{-1.0, 1.0}});
    pr.growth = {.p = 1, .q = 1, .M = 1.0};
    pr.f = [](ConstSpan, ConstSpan, Span out) { out[0] = out[1] = 0.0; };
    pr.l = [](ConstSpan, ConstSpan) { return 1.0; };
    return pr;
}

}  // namespace

TEST_CASE("frozen dynamics: payoff is the horizon") {
    auto pr = still_problem();
    TimedControl alpha{{0.0, 3.0}, {{0.0}}};
    auto tr = integrate(pr, Vec{0.4, -0.2}, alpha, 3.0, 0.01);
    CHECK(tr.payoff.back() == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(tr.states.back()[0] == 0.4);
    CHECK(tr.states.back()[1] == -0.2);
    CHECK(!tr.blew_up);
    CHECK(tr.bound_satisfied);
}

TEST_CASE("example-3-3 payoffs diverge monotonically") {
    auto pr = builtin("example-3-3");
    TimedControl alpha{{0.0, 100.0}, {{0.5}}};
    double last_payoff = 0.0, last_y2 = 0.0;
    for (double T : {2.0, 4.0, 6.0, 8.0}) {
        auto tr = integrate(pr, Vec{1.0, 0.0}, alpha, T, 1e-3);
        CHECK(tr.payoff.back() > last_payoff);
        CHECK(tr.states.back()[1] > last_y2);
        last_payoff = tr.payoff.back();
        last_y2 = tr.states.back()[1];
        // second component is strictly increasing along the whole run
        for (std::size_t i = 1; i < tr.states.size(); ++i)
            CHECK(tr.states[i][1] > tr.states[i - 1][1]);
    }
    CHECK(last_payoff > 100.0);
}

TEST_CASE("growth estimate holds with the declared constant") {
    auto pr = builtin("example-4-1");  // M = 2
    std::mt19937 rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        TimedControl alpha;
        alpha.breakpoints = {0.0, 0.5, 1.0, 1.5, 2.0};
        for (int i = 0; i < 4; ++i)
            alpha.values.push_back({rng() % 2 ? 1.0 : -1.0});
        auto tr = integrate(pr, Vec{0.5, 0.5}, alpha, 2.0, 1e-3);
        CHECK(tr.bound_satisfied);
        CHECK(tr.worst_bound_ratio <= 1.0 + 1e-9);
    }
}

TEST_CASE("integration guards") {
    auto pr = still_problem();
    TimedControl alpha{{0.0, 1.0}, {{0.0}}};
    CHECK_THROWS_AS(integrate(pr, Vec{0.0, 0.0}, alpha, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(integrate(pr, Vec{0.0, 0.0}, alpha, 2.0, 0.1), DomainError);
}

TEST_CASE("blow-up is flagged with a truncation time") {
    ControlProblem pr;
    pr.n = 1;
    pr.control_set = ControlSetDescriptor::box({{-1.0, 1.0}});
    pr.growth = {.p = 1, .q = 1, .M = 10.0};
    pr.f = [](ConstSpan x, ConstSpan, Span out) { out[0] = x[0] * x[0]; };
    pr.l = [](ConstSpan, ConstSpan) { return 0.0; };
    TimedControl alpha{{0.0, 2.0}, {{0.0}}};
    auto tr = integrate(pr, Vec{1.0}, alpha, 2.0, 1e-4);  // escapes at t = 1
    CHECK(tr.blew_up);
    CHECK(tr.truncation_time > 0.9);
    CHECK(tr.truncation_time < 1.1);
}

TEST_CASE("RK4 order on a smooth problem") {
    ControlProblem pr;
    pr.n = 1;
    pr.control_set = ControlSetDescriptor::box({{-1.0, 1.0}});
    pr.growth = {.p = 1, .q = 1, .M = 2.0};
    pr.f = [](ConstSpan x, ConstSpan a, Span out) {
        out[0] = std::sin(x[0]) + a[0];
    };
    pr.l = [](ConstSpan x, ConstSpan) { return x[0] * x[0]; };
    TimedControl alpha{{0.0, 1.0}, {{0.5}}};
    auto fine = integrate(pr, Vec{0.3}, alpha, 1.0, 1e-4);
    const double ref = fine.states.back()[0];
    const double e1 =
        std::abs(integrate(pr, Vec{0.3}, alpha, 1.0, 0.02).states.back()[0] -
                 ref);
    const double e2 =
        std::abs(integrate(pr, Vec{0.3}, alpha, 1.0, 0.01).states.back()[0] -
                 ref);
    CHECK(e1 / e2 > 8.0);   // fourth order: ratio ~ 16
    CHECK(e1 / e2 < 40.0);
}

TEST_CASE("chattering control construction") {
    auto c1 = chattering_control(1, 3.0);
    CHECK(c1.values == std::vector<Vec>{{1.0}});
    auto c2 = chattering_control(2, 2.0);
    CHECK(c2.at(0.5) == Vec{1.0});
    CHECK(c2.at(1.5) == Vec{-1.0});
    CHECK_THROWS_AS(chattering_control(0, 1.0), DomainError);
}

TEST_CASE("chattering payoffs on example-4-1 obey the square bound") {
    auto pr = builtin("example-4-1");
    std::vector<double> logs_n, logs_j;
    for (double t : {1.0, 2.0}) {
        for (int n : {4, 8, 16, 32}) {
            auto alpha = chattering_control(n, t);
            auto tr = integrate(pr, Vec{0.0, 0.0}, alpha, t, 1e-3);
            const double bound = t * t * t * (1.0 + t * t) / (n * n);
            CHECK(tr.payoff.back() <= bound);
            if (t == 2.0) {
                logs_n.push_back(std::log(n));
                logs_j.push_back(std::log(tr.payoff.back()));
            }
        }
    }
    // least-squares slope of log J against log n: expect -2 +- 0.2
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(logs_n.size());
    for (std::size_t i = 0; i < logs_n.size(); ++i) {
        sx += logs_n[i];
        sy += logs_j[i];
        sxx += logs_n[i] * logs_n[i];
        sxy += logs_n[i] * logs_j[i];
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    CHECK(slope == doctest::Approx(-2.0).epsilon(0.1));
}

TEST_CASE("brute force enumeration") {
    SUBCASE("constant cost counts steps") {
        auto pr = still_problem();
        ControlMesh mesh = mesh_box(pr.control_set, {3});
        CHECK(brute_force_value(pr, Vec{0.0, 0.0}, mesh, 4, 0.25) ==
              doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("parking at the cost zero") {
        ControlProblem pr;
        pr.n = 1;
        pr.control_set = ControlSetDescriptor::finite({{-1.0}, {0.0}, {1.0}});
        pr.growth = {.p = 1, .q = 1, .M = 1.0};
        pr.f = [](ConstSpan, ConstSpan a, Span out) { out[0] = a[0]; };
        pr.l = [](ConstSpan x, ConstSpan) { return x[0] * x[0]; };
        ControlMesh mesh = mesh_finite(pr.control_set);
        CHECK(brute_force_value(pr, Vec{0.0}, mesh, 5, 0.5) == 0.0);
    }
    SUBCASE("budget refusal") {
        auto pr = still_problem();
        ControlMesh mesh = mesh_box(pr.control_set, {10});
        CHECK_THROWS_AS(brute_force_value(pr, Vec{0.0, 0.0}, mesh, 9, 0.1),
                        PreconditionError);
    }
}
