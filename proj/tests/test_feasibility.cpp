#include <set>

#include "adopt/feasibility.hpp"
#include "adopt/lp_model.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace adopt;

namespace {

// Set-enumeration oracle: recomputes both bounds straight from the quad
// list, no index structures involved.
double oracle_mu(const Instance& in, const CampaignId& i, FrameIndex k) {
    std::set<FrameIndex> frames;
    std::set<LocationId> locations_at_k;
    double m_cap = 0.0;
    for (const Quad& q : in.admissible.points()) m_cap = std::max(m_cap, in.profit.at(q));
    for (const Quad& q : in.admissible.points()) {
        if (q.campaign != i) continue;
        frames.insert(q.frame);
        if (q.frame == k) locations_at_k.insert(q.location);
    }
    REQUIRE(!locations_at_k.empty());
    double budget = in.budget(i);
    double bound = std::isfinite(budget) && m_cap > 0.0
                       ? budget / (static_cast<double>(frames.size()) * m_cap)
                       : std::numeric_limits<double>::infinity();
    for (const LocationId& t : locations_at_k) {
        std::set<CampaignId> campaigns;
        for (const Quad& q : in.admissible.points())
            if (q.frame == k && q.location == t) campaigns.insert(q.campaign);
        bound = std::min(bound, in.supply.at({t, k}) / static_cast<double>(campaigns.size()));
    }
    return bound;
}

double oracle_lambda(const Instance& in, const Quad& quad) {
    double m_cap = 0.0;
    for (const Quad& q : in.admissible.points()) m_cap = std::max(m_cap, in.profit.at(q));
    int points = 0;
    std::set<std::pair<CampaignId, CreativeId>> pairs;
    for (const Quad& q : in.admissible.points()) {
        if (q.campaign == quad.campaign) ++points;
        if (q.frame == quad.frame && q.location == quad.location)
            pairs.insert({q.campaign, q.creative});
    }
    double budget = in.budget(quad.campaign);
    double bound = std::isfinite(budget) && m_cap > 0.0
                       ? budget / (points * m_cap)
                       : std::numeric_limits<double>::infinity();
    return std::min(bound, in.supply.at({quad.location, quad.frame}) /
                               static_cast<double>(pairs.size()));
}

Instance at_bounds(Instance instance) {
    instance.flags.lasting = true;
    instance.flags.learning = true;
    std::set<CampaignFrameKey> keys;
    for (const Quad& q : instance.admissible.points()) keys.insert({q.campaign, q.frame});
    for (const auto& key : keys)
        instance.mu[key] = mu_bound(instance, key.campaign, key.frame);
    for (const Quad& q : instance.admissible.points())
        instance.lambda[q] = lambda_bound(instance, q);
    return instance;
}

}  // namespace

TEST_CASE("mu_bound on T1") {
    Instance t1 = testing::t1_instance();
    CHECK(profit_cap(t1) == doctest::Approx(1.0));
    CHECK(mu_bound(t1, "1", 1) == doctest::Approx(2.5));  // min(10/(2*1.0), 5/2)
    CHECK(mu_bound(t1, "2", 1) == doctest::Approx(2.5));  // min(inf, 5/2)
    CHECK_THROWS_AS(mu_bound(t1, "1", 99), std::domain_error);
}

TEST_CASE("lambda_bound on T1") {
    Instance t1 = testing::t1_instance();
    CHECK(lambda_bound(t1, {"2", "1", 1, "L1"}) == doctest::Approx(2.5));
    CHECK(lambda_bound(t1, {"1", "1", 2, "L1"}) == doctest::Approx(2.5));
    CHECK_THROWS_AS(lambda_bound(t1, {"1", "1", 3, "L1"}), std::domain_error);
}

TEST_CASE("bounds match the set-enumeration oracle") {
    std::mt19937_64 rng(808);
    int done = 0;
    while (done < 40) {
        Instance instance = testing::random_instance(rng);
        if (instance.admissible.empty()) continue;
        std::set<CampaignFrameKey> keys;
        for (const Quad& q : instance.admissible.points()) keys.insert({q.campaign, q.frame});
        for (const auto& key : keys) {
            double got = mu_bound(instance, key.campaign, key.frame);
            double want = oracle_mu(instance, key.campaign, key.frame);
            if (std::isfinite(want)) CHECK(got == doctest::Approx(want));
            else CHECK(!std::isfinite(got));
        }
        for (const Quad& q : instance.admissible.points()) {
            double got = lambda_bound(instance, q);
            double want = oracle_lambda(instance, q);
            if (std::isfinite(want)) CHECK(got == doctest::Approx(want));
            else CHECK(!std::isfinite(got));
        }
        ++done;
    }
}

TEST_CASE("bounds are homogeneous in supplies and budgets") {
    std::mt19937_64 rng(4141);
    Instance instance;
    do {
        instance = testing::random_instance(rng, false);  // finite budgets
    } while (instance.admissible.empty());
    Instance scaled = instance;
    const double s = 3.25;
    for (auto& [cell, v] : scaled.supply) v *= s;
    for (auto& [campaign, d] : scaled.demand) d *= s;

    for (const Quad& q : instance.admissible.points()) {
        CHECK(lambda_bound(scaled, q) == doctest::Approx(s * lambda_bound(instance, q)));
        CHECK(mu_bound(scaled, q.campaign, q.frame) ==
              doctest::Approx(s * mu_bound(instance, q.campaign, q.frame)));
    }
}

TEST_CASE("clamp_secondary on T1") {
    Instance t1 = testing::t1_instance();
    t1.flags.lasting = true;
    for (FrameIndex k : {1, 2}) {
        t1.mu[{"1", k}] = 100.0;
        t1.mu[{"2", k}] = 100.0;
    }
    Instance clamped = clamp_secondary(t1);
    for (const auto& [key, m] : clamped.mu) CHECK(m == doctest::Approx(2.5));

    Instance modest = testing::t1_instance();
    modest.flags.lasting = true;
    modest.mu[{"1", 1}] = 1.0;
    CHECK(clamp_secondary(modest).mu.at({"1", 1}) == doctest::Approx(1.0));

    Instance zero_lambda = testing::t1_instance();
    zero_lambda.flags.learning = true;
    for (const Quad& q : zero_lambda.admissible.points()) zero_lambda.lambda[q] = 0.0;
    Instance same = clamp_secondary(zero_lambda);
    for (const auto& [quad, l] : same.lambda) CHECK(l == 0.0);
    CHECK(check_feasible(same).feasible);
}

TEST_CASE("check_feasible verdicts on T1 variants") {
    Instance t1 = testing::t1_instance();
    t1.flags.lasting = true;
    t1.mu[{"1", 1}] = 100.0;
    t1.mu[{"1", 2}] = 100.0;
    Instance clamped = clamp_secondary(t1);
    auto verdict = check_feasible(clamped);
    CHECK(verdict.feasible);
    CHECK(check_constraints(clamped, verdict.witness.values()).empty());

    // The Fact-1 witness built by hand: mu placed on one admissible cell per
    // (campaign, frame) must satisfy the same system.
    std::map<Quad, double> witness;
    for (const auto& [key, m] : clamped.mu) {
        const auto& locations = clamped.admissible.locations_of(key.campaign, key.frame);
        REQUIRE(!locations.empty());
        witness[{key.campaign, "1", key.frame, *locations.begin()}] = m;
    }
    CHECK(check_constraints(clamped, witness).empty());

    Instance unclamped = testing::t1_instance();
    unclamped.flags.lasting = true;
    unclamped.mu[{"1", 1}] = 1000.0;
    CHECK(!check_feasible(unclamped).feasible);

    Instance plain = testing::t1_instance();  // all optional families off
    CHECK(check_feasible(plain).feasible);
}

// Both lower-bound families can fill a cell's supply on their own, so
// clamping each against its own cap is not enough when they are combined:
// one campaign with a single creative plus one with three, one shared cell,
// supply 4 and open budgets drive the raw caps to mu = 2 and lambda = 1 per
// quad, which needs 2 + 3 = 5 impressions out of 4. The joint clamp must
// catch this.
TEST_CASE("interacting lower bounds: raw caps clash, joint clamp repairs") {
    Instance in;
    std::vector<Quad> quads = {{"A", "1", 1, "L1"},
                               {"B", "1", 1, "L1"},
                               {"B", "2", 1, "L1"},
                               {"B", "3", 1, "L1"}};
    in.admissible = AdmissibleSet(quads);
    in.supply[{"L1", 1}] = 4.0;
    for (const Quad& q : quads) in.profit[q] = 0.001;
    in.demand["A"] = kUnboundedBudget;
    in.demand["B"] = kUnboundedBudget;
    in.flags.lasting = true;
    in.flags.learning = true;

    CHECK(mu_bound(in, "A", 1) == doctest::Approx(2.0));
    for (const Quad& q : quads) CHECK(lambda_bound(in, q) == doctest::Approx(1.0));

    Instance raw = in;
    raw.mu[{"A", 1}] = mu_bound(in, "A", 1);
    raw.mu[{"B", 1}] = mu_bound(in, "B", 1);
    for (const Quad& q : quads) raw.lambda[q] = lambda_bound(in, q);
    CHECK(!check_feasible(raw).feasible);  // the raw caps really do clash

    Instance clamped = clamp_secondary(raw);
    auto verdict = check_feasible(clamped);
    CHECK(verdict.feasible);
    for (const Quad& q : quads)
        CHECK(clamped.lambda.at(q) == doctest::Approx(1.0));  // lambda keeps its cap
    CHECK(clamped.mu.at({"A", 1}) <= 2.0);
    CHECK(check_constraints(clamped, verdict.witness.values()).empty());
}

TEST_CASE("feasibility fuzz: clamped bounds are always feasible") {
    std::mt19937_64 rng(20260811);
    int done = 0;
    while (done < 200) {
        Instance instance = testing::random_instance(rng);
        if (instance.admissible.empty()) continue;
        Instance clamped = clamp_secondary(at_bounds(instance));
        auto verdict = check_feasible(clamped);
        CHECK(verdict.feasible);
        if (verdict.feasible)
            CHECK(check_constraints(clamped, verdict.witness.values()).empty());
        ++done;
    }
}

TEST_CASE("monotonicity: shrinking the minima preserves feasibility") {
    std::mt19937_64 rng(606);
    int done = 0;
    while (done < 30) {
        Instance instance = testing::random_instance(rng);
        if (instance.admissible.empty()) continue;
        Instance clamped = clamp_secondary(at_bounds(instance));
        REQUIRE(check_feasible(clamped).feasible);
        Instance smaller = clamped;
        for (auto& [key, m] : smaller.mu) m *= 0.5;
        for (auto& [quad, l] : smaller.lambda) l *= 0.25;
        CHECK(check_feasible(smaller).feasible);
        ++done;
    }
}
