#pragma once

#include <array>
#include <functional>
#include <memory>
#include <random>

#include "adopt/delivery.hpp"

namespace adopt {

/// Multiplicative traffic model: base rate shaped by hour-of-day and
/// day-of-week factors, an optional linear trend over the span, and
/// lognormal noise.
struct SupplyProcess {
    double base = 0.0;
    std::array<double, 24> hour_mult;
    std::array<double, 7> dow_mult;

    SupplyProcess() {
        hour_mult.fill(1.0);
        dow_mult.fill(1.0);
    }
};

struct WorldConfig {
    Catalog catalog{{}, {}, {}, 1};
    Schedule schedule;
    std::map<LocationId, SupplyProcess> supply;
    std::map<std::tuple<CampaignId, CreativeId, LocationId>, double> profit;  // per impression
    std::map<CampaignId, double> budgets;  // may be +inf
    double sigma = 0.0;           // lognormal noise on supply
    double supply_trend = 0.0;    // relative supply change across the span
    double profit_drift = 0.0;    // relative profit change across the span
    double observability = 1.0;   // portion of traffic the server sees
    std::uint64_t seed = 1;
};

/// Materialized world: per-frame true supply (noise drawn once, so the world
/// is deterministic given its seed) and the true profit surface.
struct World {
    WorldConfig config;
    std::map<LocationId, std::vector<double>> true_supply;  // index frame-1

    int span() const { return config.catalog.frame_count(); }
    double true_profit(const CampaignId& c, const CreativeId& b, const LocationId& l,
                       FrameIndex k) const;
};

World generate_world(const WorldConfig& config);

/// A delivery policy under simulation: asked for the next frame's plan, then
/// shown what actually happened.
class Policy {
public:
    virtual ~Policy() = default;
    virtual std::string name() const = 0;
    virtual DeliveryPlan plan_frame(FrameIndex k) = 0;
    virtual void observe(const FrameOutcomes& outcomes) = 0;
};

using PolicyFactory = std::function<std::unique_ptr<Policy>()>;

/// Rolling-horizon LP engine wrapped as a policy.
std::unique_ptr<Policy> make_lp_policy(const Catalog& catalog, const Schedule& schedule,
                                       std::map<CampaignId, double> budgets, EngineConfig config);

struct GreedyConfig {
    int learning_frames = 24;   // uniform delivery before pacing kicks in
    double quantile = 0.25;     // share of lowest-eCPM nodes dropped when ahead
    double pace_tolerance = 0.05;  // "on pace" slack around the budget line
};

/// The baseline: uniform learning phase, then campaigns running ahead of
/// their budget pace stop serving at their lowest-eCPM locations.
std::unique_ptr<Policy> make_greedy_policy(const Catalog& catalog, const Schedule& schedule,
                                           std::map<CampaignId, double> budgets,
                                           GreedyConfig config = {});

/// Uniform delivery over every admissible creative, forever.
std::unique_ptr<Policy> make_uniform_policy(const Catalog& catalog, const Schedule& schedule,
                                            std::map<CampaignId, double> budgets);

struct RunReport {
    std::string policy;
    std::uint64_t seed = 0;
    double revenue = 0.0;
    std::int64_t impressions = 0;
    std::map<CampaignId, std::pair<double, double>> spend_vs_budget;
    int supply_violations = 0;
    int plan_violations = 0;
    std::vector<double> frame_revenue;
    bool aborted = false;
};

/// Per frame: Poisson arrivals at each location, observability thinning,
/// i.i.d. sampling of creatives from the policy's plan, true-profit
/// accounting, and feedback of the observed outcomes to the policy.
RunReport run_policy(const World& world, Policy& policy, int span, std::uint64_t seed);

struct ComparisonRow {
    std::string policy;
    double mean_revenue = 0.0;
    double std_revenue = 0.0;
    std::vector<double> revenue_per_seed;
};

struct Comparison {
    std::vector<ComparisonRow> rows;
    double uplift_abs = 0.0;  // lp-engine minus greedy mean revenue
    double uplift_pct = 0.0;
};

Comparison compare(const World& world, const std::vector<PolicyFactory>& policies,
                   const std::vector<std::uint64_t>& seeds, int span = 0);

}  // namespace adopt
