#include "adopt/simplex.hpp"
#include "adopt/transportation.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace adopt;

namespace {

LpProblem box_problem() {
    LpProblem p;
    p.num_vars = 2;
    p.objective = {1.0, 1.0};
    p.sense = Sense::Maximize;
    p.rows.push_back({{{0, 1.0}}, Relation::LessEq, 1.0, "x"});
    p.rows.push_back({{{1, 1.0}}, Relation::LessEq, 1.0, "y"});
    return p;
}

}  // namespace

TEST_CASE("simplex: box maximum") {
    auto sol = solve_simplex(box_problem());
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(2.0));
    CHECK(sol.values[0] == doctest::Approx(1.0));
    CHECK(sol.values[1] == doctest::Approx(1.0));
}

TEST_CASE("simplex: contradiction is infeasible") {
    LpProblem p;
    p.num_vars = 1;
    p.objective = {1.0};
    p.sense = Sense::Maximize;
    p.rows.push_back({{{0, 1.0}}, Relation::GreaterEq, 2.0, ""});
    p.rows.push_back({{{0, 1.0}}, Relation::LessEq, 1.0, ""});
    CHECK(solve_simplex(p).status == LpStatus::Infeasible);
}

TEST_CASE("simplex: unbounded detection") {
    LpProblem p;
    p.num_vars = 2;
    p.objective = {1.0, 0.0};
    p.sense = Sense::Maximize;
    p.rows.push_back({{{1, 1.0}}, Relation::LessEq, 1.0, ""});
    CHECK(solve_simplex(p).status == LpStatus::Unbounded);
}

TEST_CASE("simplex: degenerate problem still terminates") {
    // Classic degenerate vertex: several constraints through the origin.
    LpProblem p;
    p.num_vars = 3;
    p.objective = {0.75, -150.0, 0.02};
    p.sense = Sense::Maximize;
    p.rows.push_back({{{0, 0.25}, {1, -60.0}, {2, -0.04}}, Relation::LessEq, 0.0, ""});
    p.rows.push_back({{{0, 0.5}, {1, -90.0}, {2, -0.02}}, Relation::LessEq, 0.0, ""});
    p.rows.push_back({{{2, 1.0}}, Relation::LessEq, 1.0, ""});
    auto sol = solve_simplex(p);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(0.05).epsilon(1e-6));
}

TEST_CASE("simplex: equality rows") {
    LpProblem p;
    p.num_vars = 2;
    p.objective = {2.0, 3.0};
    p.sense = Sense::Minimize;
    p.rows.push_back({{{0, 1.0}, {1, 1.0}}, Relation::Equal, 4.0, ""});
    p.rows.push_back({{{0, 1.0}}, Relation::LessEq, 3.0, ""});
    auto sol = solve_simplex(p);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(3.0 * 2.0 + 1.0 * 3.0));
}

TEST_CASE("simplex matches enumeration on random bounded problems") {
    std::mt19937_64 rng(12345);
    int solved = 0;
    for (int trial = 0; trial < 120; ++trial) {
        LpProblem p = testing::random_bounded_lp(rng);
        auto oracle = testing::enumerate_basic_solutions(p);
        auto sol = solve_simplex(p);
        if (!oracle.feasible) {
            CHECK(sol.status == LpStatus::Infeasible);
            continue;
        }
        REQUIRE(sol.status == LpStatus::Optimal);
        double scale = std::max(1.0, std::fabs(oracle.objective));
        CHECK(std::fabs(sol.objective - oracle.objective) / scale <= 1e-6);
        ++solved;
    }
    CHECK(solved > 30);  // the generator must exercise the solver for real
}

TEST_CASE("simplex determinism: identical runs pivot identically") {
    std::mt19937_64 rng(99);
    LpProblem p = testing::random_bounded_lp(rng);
    auto a = solve_simplex(p);
    auto b = solve_simplex(p);
    CHECK(a.iterations == b.iterations);
    CHECK(a.values == b.values);
    CHECK(a.basis == b.basis);
}

TEST_CASE("solve_phase1 returns a witness") {
    auto sol = solve_phase1(box_problem());
    REQUIRE(sol.status == LpStatus::Optimal);
    REQUIRE(sol.values.size() == 2);
    CHECK(sol.values[0] >= 0.0);
}

TEST_CASE("transportation: worked 2x2 example costs 6") {
    TransportationInstance t;
    t.supplies = {3.0, 2.0};
    t.demands = {2.0, 3.0};
    t.values = {{1.0, 2.0}, {3.0, 1.0}};
    auto sol = solve_transportation(t);
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(6.0));
    CHECK(sol.values[0 * 2 + 0] == doctest::Approx(2.0));
    CHECK(sol.values[0 * 2 + 1] == doctest::Approx(1.0));
    CHECK(sol.values[1 * 2 + 1] == doctest::Approx(2.0));
}

TEST_CASE("transportation: forced 1x1 flow") {
    TransportationInstance t;
    t.supplies = {4.0};
    t.demands = {4.0};
    t.values = {{2.5}};
    auto sol = solve_transportation(t);
    CHECK(sol.objective == doctest::Approx(10.0));
}

TEST_CASE("transportation: all-zero instance") {
    TransportationInstance t;
    t.supplies = {0.0, 0.0};
    t.demands = {0.0, 0.0};
    t.values = {{1.0, 2.0}, {3.0, 4.0}};
    auto sol = solve_transportation(t);
    CHECK(sol.objective == doctest::Approx(0.0));
    for (double v : sol.values) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("transportation rejects unbalanced input") {
    TransportationInstance t;
    t.supplies = {3.0};
    t.demands = {1.0};
    t.values = {{1.0}};
    CHECK_THROWS_AS(solve_transportation(t), std::invalid_argument);
}

TEST_CASE("transportation agrees with simplex on random balanced instances") {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> size(1, 6), amount(0, 60), cost(0, 40);
    for (int trial = 0; trial < 120; ++trial) {
        int m = size(rng), n = size(rng);
        TransportationInstance t;
        t.supplies.resize(m);
        t.demands.resize(n);
        t.values.assign(m, std::vector<double>(n, 0.0));
        for (int i = 0; i < m; ++i) t.supplies[i] = 0.25 * amount(rng);
        for (int j = 0; j < n; ++j) t.demands[j] = 0.25 * amount(rng);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) t.values[i][j] = 0.25 * cost(rng);
        t.maximize = trial % 3 == 0;
        t = balance(t);

        auto stepping = solve_transportation(t);
        auto simplex = solve_simplex(transportation_to_lp(t));
        REQUIRE(simplex.status == LpStatus::Optimal);
        double scale = std::max(1.0, std::fabs(simplex.objective));
        CHECK(std::fabs(stepping.objective - simplex.objective) / scale <= 1e-9);
    }
}
