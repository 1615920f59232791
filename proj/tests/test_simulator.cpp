#include <cmath>

#include "adopt/simulator.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace adopt;

namespace {

const FrameClock kClock{1772409600, 3600};  // 2026-03-02T00:00:00Z (Monday 00:00)

// Two campaigns, one creative each, one location; campaign 1 pays 1.0 with
// budget 10, campaign 2 pays 0.5 unbounded.
WorldConfig t1_world(int frames, double base_supply) {
    WorldConfig config;
    config.catalog = Catalog({{"1", "one"}, {"2", "two"}}, {{"1", {"1"}}, {"2", {"1"}}}, {"L1"},
                             frames, kClock);
    std::vector<Quad> quads;
    for (FrameIndex k = 1; k <= frames; ++k) {
        quads.push_back({"1", "1", k, "L1"});
        quads.push_back({"2", "1", k, "L1"});
    }
    config.schedule.admissible = AdmissibleSet(std::move(quads));
    SupplyProcess process;
    process.base = base_supply;
    config.supply["L1"] = process;
    config.profit[{"1", "1", "L1"}] = 1.0;
    config.profit[{"2", "1", "L1"}] = 0.5;
    config.budgets["1"] = 10.0;
    config.budgets["2"] = kUnboundedBudget;
    return config;
}

EngineConfig engine_defaults(double default_supply) {
    EngineConfig engine;
    engine.gamma = 1.0;
    engine.horizon = 24;
    engine.projection.n_min = 1;
    engine.projection.prior_profit = 0.0001;
    engine.default_supply = default_supply;
    return engine;
}

}  // namespace

TEST_CASE("generate_world: degenerate process is constant") {
    World world = generate_world(t1_world(48, 100.0));
    for (double s : world.true_supply.at("L1")) CHECK(s == doctest::Approx(100.0));
}

TEST_CASE("generate_world is deterministic per seed") {
    WorldConfig config = t1_world(48, 100.0);
    config.sigma = 0.3;
    World a = generate_world(config);
    World b = generate_world(config);
    CHECK(a.true_supply.at("L1") == b.true_supply.at("L1"));

    config.seed = 2;
    World c = generate_world(config);
    CHECK(a.true_supply.at("L1") != c.true_supply.at("L1"));
}

TEST_CASE("generate_world applies hour multipliers") {
    WorldConfig config = t1_world(24, 100.0);
    config.supply["L1"].hour_mult[12] = 2.0;
    World world = generate_world(config);
    // Frame 13 covers 12:00 with the Monday-midnight epoch.
    CHECK(world.true_supply.at("L1")[12] == doctest::Approx(200.0));
    CHECK(world.true_supply.at("L1")[0] == doctest::Approx(100.0));
}

TEST_CASE("deterministic engine loop realizes the T1 optimum") {
    // Drive the engine by hand, applying each frame's plan to exactly the
    // projected supply. Budget 10 at profit 1.0 caps total revenue at 10.
    Schedule schedule;
    schedule.admissible = testing::t1_instance().admissible;
    EngineState state = make_engine_state(kClock, {{"1", 10.0}, {"2", kUnboundedBudget}},
                                          engine_defaults(0.0));
    constexpr std::int64_t kWeek = 7 * 86400;
    for (int weeks : {2, 1}) {
        for (FrameIndex k : {1, 2}) {
            std::int64_t ts = kClock.frame_start(k) - weeks * kWeek;
            state.history.append({ts, "L1", "1", "1", 3, 3.0});
            state.history.append({ts, "L1", "2", "1", 2, 1.0});
        }
    }

    double revenue = 0.0;
    for (FrameIndex k = 1; k <= 2; ++k) {
        CycleResult cycle = plan_cycle(state, schedule);
        const auto* cell = cycle.next_frame.cell("L1", k);
        REQUIRE(cell != nullptr);
        FrameOutcomes outcomes;
        outcomes.frame = k;
        outcomes.observed_slots["L1"] = 5;
        for (const auto& [pair, p] : *cell) {
            auto impressions = static_cast<std::int64_t>(std::llround(5 * p));
            if (impressions == 0) continue;
            double profit = impressions * (pair.first == "1" ? 1.0 : 0.5);
            outcomes.delivered[{"L1", pair.first, pair.second}] = {impressions, profit};
            revenue += profit;
        }
        advance(state, outcomes);
    }
    CHECK(revenue == doctest::Approx(10.0));
    CHECK(state.remaining_budget.at("1") == doctest::Approx(0.0));
}

TEST_CASE("run_policy on an empty schedule delivers nothing") {
    WorldConfig config = t1_world(24, 50.0);
    config.schedule = Schedule{};
    World world = generate_world(config);
    auto uniform = make_uniform_policy(config.catalog, config.schedule, config.budgets);
    RunReport report = run_policy(world, *uniform, 24, 7);
    CHECK(report.revenue == 0.0);
    CHECK(report.impressions == 0);
    CHECK(report.supply_violations == 0);
}

TEST_CASE("uniform policy revenue matches the closed-form mean") {
    WorldConfig config = t1_world(100, 100.0);
    config.budgets["1"] = kUnboundedBudget;  // no budget stop: pure mixture
    World world = generate_world(config);
    auto uniform = make_uniform_policy(config.catalog, config.schedule, config.budgets);
    RunReport report = run_policy(world, *uniform, 100, 42);
    REQUIRE(report.impressions > 5000);
    double per_slot = report.revenue / static_cast<double>(report.impressions);
    // Per-slot profit is 1.0 or 0.5 with equal probability: mean 0.75,
    // std 0.25; allow 3 sigma of the sample mean.
    double bound = 3.0 * 0.25 / std::sqrt(static_cast<double>(report.impressions));
    CHECK(std::fabs(per_slot - 0.75) <= bound);
}

TEST_CASE("greedy policy: uniform learning phase") {
    WorldConfig config = t1_world(48, 50.0);
    auto greedy = make_greedy_policy(config.catalog, config.schedule, config.budgets);
    DeliveryPlan plan = greedy->plan_frame(1);
    const auto* cell = plan.cell("L1", 1);
    REQUIRE(cell != nullptr);
    CHECK(cell->at({"1", "1"}) == doctest::Approx(0.5));
    CHECK(cell->at({"2", "1"}) == doctest::Approx(0.5));
}

TEST_CASE("greedy policy: on pace keeps the plan unchanged") {
    WorldConfig config = t1_world(60, 50.0);
    config.budgets["1"] = kUnboundedBudget;  // never ahead of pace
    GreedyConfig greedy_config;
    greedy_config.learning_frames = 2;
    auto greedy = make_greedy_policy(config.catalog, config.schedule, config.budgets,
                                     greedy_config);
    DeliveryPlan a = greedy->plan_frame(10);
    DeliveryPlan b = greedy->plan_frame(11);
    const auto* cell_a = a.cell("L1", 10);
    const auto* cell_b = b.cell("L1", 11);
    REQUIRE(cell_a != nullptr);
    REQUIRE(cell_b != nullptr);
    CHECK(*cell_a == *cell_b);
}

TEST_CASE("greedy policy drops only the bottom-quantile node when ahead") {
    // One campaign over two locations with eCPMs 0.1 and 0.9; overspent
    // against its pace target, so the 0.1 node goes dark, the 0.9 one stays.
    WorldConfig config;
    config.catalog = Catalog({{"1", "one"}}, {{"1", {"1"}}}, {"A", "B"}, 100, kClock);
    std::vector<Quad> quads;
    for (FrameIndex k = 1; k <= 100; ++k) {
        quads.push_back({"1", "1", k, "A"});
        quads.push_back({"1", "1", k, "B"});
    }
    config.schedule.admissible = AdmissibleSet(std::move(quads));
    config.budgets["1"] = 1000.0;

    GreedyConfig greedy_config;
    greedy_config.learning_frames = 1;
    greedy_config.quantile = 0.25;
    auto greedy = make_greedy_policy(config.catalog, config.schedule, config.budgets,
                                     greedy_config);

    FrameOutcomes outcomes;
    outcomes.frame = 1;
    outcomes.delivered[{"A", "1", "1"}] = {100, 10.0};  // eCPM 0.1
    outcomes.delivered[{"B", "1", "1"}] = {100, 90.0};  // eCPM 0.9
    greedy->observe(outcomes);

    DeliveryPlan plan = greedy->plan_frame(3);  // spend 100 vs target ~2: far ahead
    const auto* at_a = plan.cell("A", 3);
    const auto* at_b = plan.cell("B", 3);
    REQUIRE(at_a != nullptr);
    REQUIRE(at_b != nullptr);
    CHECK(at_a->empty());  // dropped from the low-eCPM node only
    CHECK(at_b->empty() == false);
}

TEST_CASE("identical factories produce identical comparison rows") {
    WorldConfig config = t1_world(48, 30.0);
    World world = generate_world(config);
    PolicyFactory uniform = [&] {
        return make_uniform_policy(config.catalog, config.schedule, config.budgets);
    };
    Comparison result = compare(world, {uniform, uniform}, {1, 2, 3});
    REQUIRE(result.rows.size() == 2);
    CHECK(result.rows[0].mean_revenue == doctest::Approx(result.rows[1].mean_revenue));
    CHECK(result.rows[0].revenue_per_seed == result.rows[1].revenue_per_seed);
}

TEST_CASE("single-seed comparison has zero std") {
    WorldConfig config = t1_world(48, 30.0);
    World world = generate_world(config);
    PolicyFactory uniform = [&] {
        return make_uniform_policy(config.catalog, config.schedule, config.budgets);
    };
    Comparison result = compare(world, {uniform}, {5});
    CHECK(result.rows[0].std_revenue == 0.0);
}

TEST_CASE("all policies respect supply, plans and budgets on a small world") {
    WorldConfig config = t1_world(72, 40.0);
    config.sigma = 0.2;
    World world = generate_world(config);

    EngineConfig engine = engine_defaults(40.0);
    engine.horizon = 6;
    std::vector<PolicyFactory> factories = {
        [&] { return make_lp_policy(config.catalog, config.schedule, config.budgets, engine); },
        [&] { return make_greedy_policy(config.catalog, config.schedule, config.budgets); },
        [&] { return make_uniform_policy(config.catalog, config.schedule, config.budgets); },
    };
    double max_frame_profit = 40.0 * 4 * 1.0;  // generous one-frame bound
    for (const auto& factory : factories) {
        for (std::uint64_t seed : {1, 2}) {
            auto policy = factory();
            RunReport report = run_policy(world, *policy, 72, seed);
            CHECK(!report.aborted);
            CHECK(report.supply_violations == 0);
            CHECK(report.plan_violations == 0);
            for (const auto& [campaign, pair] : report.spend_vs_budget) {
                if (!std::isfinite(pair.second)) continue;
                CHECK(pair.first <= pair.second + max_frame_profit);
            }
        }
    }
}
