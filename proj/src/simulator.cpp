#include "adopt/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "adopt/errors.hpp"

namespace adopt {

namespace {

double ramp(double relative_change, FrameIndex k, int span) {
    if (span <= 1) return 1.0;
    return 1.0 + relative_change * static_cast<double>(k - 1) / static_cast<double>(span - 1);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

}  // namespace

double World::true_profit(const CampaignId& c, const CreativeId& b, const LocationId& l,
                          FrameIndex k) const {
    auto it = config.profit.find({c, b, l});
    if (it == config.profit.end()) return 0.0;
    return it->second * ramp(config.profit_drift, k, span());
}

World generate_world(const WorldConfig& config) {
    for (const LocationId& l : config.catalog.locations())
        if (!config.supply.count(l))
            throw std::invalid_argument("generate_world: no supply process for location '" + l + "'");
    if (config.observability <= 0.0 || config.observability > 1.0)
        throw std::invalid_argument("generate_world: observability must be in (0, 1]");
    if (config.sigma < 0.0) throw std::invalid_argument("generate_world: sigma must be >= 0");

    World world;
    world.config = config;
    const int span = config.catalog.frame_count();
    const FrameClock& clock = config.catalog.clock();
    std::mt19937_64 rng(mix_seed(config.seed, 0));
    std::normal_distribution<double> normal(0.0, 1.0);

    for (const auto& [location, process] : config.supply) {
        for (double m : process.hour_mult)
            if (m <= 0.0) throw std::invalid_argument("generate_world: multipliers must be > 0");
        for (double m : process.dow_mult)
            if (m <= 0.0) throw std::invalid_argument("generate_world: multipliers must be > 0");
        std::vector<double> series(span, 0.0);
        for (FrameIndex k = 1; k <= span; ++k) {
            std::int64_t ts = clock.frame_start(k);
            double mean = process.base * process.hour_mult[hour_of_day(ts)] *
                          process.dow_mult[day_of_week(ts)] * ramp(config.supply_trend, k, span);
            if (config.sigma > 0.0) mean *= std::exp(config.sigma * normal(rng));
            series[k - 1] = std::max(0.0, mean);
        }
        world.true_supply[location] = std::move(series);
    }
    return world;
}

namespace {

// ---------------------------------------------------------------------------
// LP engine policy

class LpEnginePolicy final : public Policy {
public:
    LpEnginePolicy(const Catalog& catalog, Schedule schedule, std::map<CampaignId, double> budgets,
                   EngineConfig config)
        : schedule_(std::move(schedule)),
          state_(make_engine_state(catalog.clock(), std::move(budgets), std::move(config))) {}

    std::string name() const override { return "lp-engine"; }

    DeliveryPlan plan_frame(FrameIndex k) override {
        if (k != state_.current_frame)
            throw std::invalid_argument("lp policy: frames must be planned in order");
        return plan_cycle(state_, schedule_).next_frame;
    }

    void observe(const FrameOutcomes& outcomes) override { advance(state_, outcomes); }

private:
    Schedule schedule_;
    EngineState state_;
};

// ---------------------------------------------------------------------------
// Greedy baseline

class GreedyPolicy final : public Policy {
public:
    GreedyPolicy(const Catalog& catalog, Schedule schedule, std::map<CampaignId, double> budgets,
                 GreedyConfig config)
        : schedule_(std::move(schedule)), budgets_(std::move(budgets)), config_(config) {
        (void)catalog;
        for (const Quad& q : schedule_.admissible.points()) {
            auto& window = campaign_window_[q.campaign];
            if (window.first == 0 || q.frame < window.first) window.first = q.frame;
            if (q.frame > window.second) window.second = q.frame;
        }
    }

    std::string name() const override { return "greedy"; }

    DeliveryPlan plan_frame(FrameIndex k) override {
        std::map<CampaignId, std::set<LocationId>> blocked;
        if (k > config_.learning_frames) {
            for (const auto& [campaign, window] : campaign_window_)
                if (ahead_of_pace(campaign, k)) blocked[campaign] = lowest_ecpm_nodes(campaign);
        }

        DeliveryPlan plan;
        std::set<LocationId> locations;
        for (const Quad& q : schedule_.admissible.points())
            if (q.frame == k) locations.insert(q.location);
        for (const LocationId& l : locations) {
            std::vector<std::pair<CampaignId, CreativeId>> eligible;
            for (const auto& pair : schedule_.admissible.pair_list_at(k, l)) {
                if (exhausted(pair.first)) continue;
                auto b = blocked.find(pair.first);
                if (b != blocked.end() && b->second.count(l)) continue;
                eligible.push_back(pair);
            }
            DeliveryPlan::Cell cell;
            for (const auto& pair : eligible)
                cell[pair] = 1.0 / static_cast<double>(eligible.size());
            plan.set(l, k, std::move(cell));
        }
        return plan;
    }

    void observe(const FrameOutcomes& outcomes) override {
        for (const auto& [key, outcome] : outcomes.delivered) {
            const auto& [location, campaign, creative] = key;
            spend_[campaign] += outcome.second;
            auto& node = node_stats_[{campaign, location}];
            node.first += outcome.first;
            node.second += outcome.second;
        }
    }

private:
    bool exhausted(const CampaignId& campaign) const {
        auto budget = budgets_.find(campaign);
        if (budget == budgets_.end() || !std::isfinite(budget->second)) return false;
        auto spent = spend_.find(campaign);
        return spent != spend_.end() && spent->second >= budget->second;
    }

    bool ahead_of_pace(const CampaignId& campaign, FrameIndex now) const {
        auto budget = budgets_.find(campaign);
        if (budget == budgets_.end() || !std::isfinite(budget->second)) return false;
        const auto& window = campaign_window_.at(campaign);
        double total = static_cast<double>(window.second - window.first + 1);
        double elapsed = std::clamp(static_cast<double>(now - window.first) / total, 0.0, 1.0);
        double target = budget->second * elapsed;
        auto spent = spend_.find(campaign);
        double realized = spent == spend_.end() ? 0.0 : spent->second;
        return realized > target * (1.0 + config_.pace_tolerance);
    }

    std::set<LocationId> lowest_ecpm_nodes(const CampaignId& campaign) const {
        std::vector<std::pair<double, LocationId>> nodes;
        for (const auto& [key, stats] : node_stats_) {
            if (key.first != campaign || stats.first <= 0) continue;
            nodes.emplace_back(stats.second / static_cast<double>(stats.first), key.second);
        }
        std::sort(nodes.begin(), nodes.end());
        auto drop = static_cast<std::size_t>(
            std::ceil(config_.quantile * static_cast<double>(nodes.size())));
        std::set<LocationId> out;
        for (std::size_t i = 0; i < nodes.size() && i < drop; ++i) out.insert(nodes[i].second);
        return out;
    }

    Schedule schedule_;
    std::map<CampaignId, double> budgets_;
    GreedyConfig config_;
    std::map<CampaignId, std::pair<FrameIndex, FrameIndex>> campaign_window_;
    std::map<CampaignId, double> spend_;
    std::map<std::pair<CampaignId, LocationId>, std::pair<std::int64_t, double>> node_stats_;
};

// ---------------------------------------------------------------------------
// Uniform baseline

class UniformPolicy final : public Policy {
public:
    UniformPolicy(Schedule schedule, std::map<CampaignId, double> budgets)
        : schedule_(std::move(schedule)), budgets_(std::move(budgets)) {}

    std::string name() const override { return "uniform"; }

    DeliveryPlan plan_frame(FrameIndex k) override {
        DeliveryPlan plan;
        std::set<LocationId> locations;
        for (const Quad& q : schedule_.admissible.points())
            if (q.frame == k) locations.insert(q.location);
        for (const LocationId& l : locations) {
            std::vector<std::pair<CampaignId, CreativeId>> eligible;
            for (const auto& pair : schedule_.admissible.pair_list_at(k, l)) {
                auto budget = budgets_.find(pair.first);
                bool finite = budget != budgets_.end() && std::isfinite(budget->second);
                auto spent = spend_.find(pair.first);
                if (finite && spent != spend_.end() && spent->second >= budget->second) continue;
                eligible.push_back(pair);
            }
            DeliveryPlan::Cell cell;
            for (const auto& pair : eligible)
                cell[pair] = 1.0 / static_cast<double>(eligible.size());
            plan.set(l, k, std::move(cell));
        }
        return plan;
    }

    void observe(const FrameOutcomes& outcomes) override {
        for (const auto& [key, outcome] : outcomes.delivered)
            spend_[std::get<1>(key)] += outcome.second;
    }

private:
    Schedule schedule_;
    std::map<CampaignId, double> budgets_;
    std::map<CampaignId, double> spend_;
};

}  // namespace

std::unique_ptr<Policy> make_lp_policy(const Catalog& catalog, const Schedule& schedule,
                                       std::map<CampaignId, double> budgets, EngineConfig config) {
    return std::make_unique<LpEnginePolicy>(catalog, schedule, std::move(budgets),
                                            std::move(config));
}

std::unique_ptr<Policy> make_greedy_policy(const Catalog& catalog, const Schedule& schedule,
                                           std::map<CampaignId, double> budgets,
                                           GreedyConfig config) {
    return std::make_unique<GreedyPolicy>(catalog, schedule, std::move(budgets), config);
}

std::unique_ptr<Policy> make_uniform_policy(const Catalog&, const Schedule& schedule,
                                            std::map<CampaignId, double> budgets) {
    return std::make_unique<UniformPolicy>(schedule, std::move(budgets));
}

RunReport run_policy(const World& world, Policy& policy, int span, std::uint64_t seed) {
    if (span < 1 || span > world.span())
        throw std::invalid_argument("run_policy: span must be within the world");
    RunReport report;
    report.policy = policy.name();
    report.seed = seed;
    for (const auto& [campaign, budget] : world.config.budgets)
        report.spend_vs_budget[campaign] = {0.0, budget};

    std::mt19937_64 arrivals_rng(mix_seed(seed, 1));
    std::mt19937_64 choice_rng(mix_seed(seed, 2));

    for (FrameIndex k = 1; k <= span; ++k) {
        DeliveryPlan plan = policy.plan_frame(k);
        auto violations = plan.violations();
        if (!violations.empty()) {
            report.plan_violations += static_cast<int>(violations.size());
            report.aborted = true;
            return report;
        }

        FrameOutcomes outcomes;
        outcomes.frame = k;
        double frame_revenue = 0.0;
        for (const auto& [location, series] : world.true_supply) {
            double mean = series[k - 1];
            std::int64_t arrivals = 0;
            if (mean > 0.0)
                arrivals = std::poisson_distribution<std::int64_t>(mean)(arrivals_rng);
            std::int64_t observed = arrivals;
            if (world.config.observability < 1.0 && arrivals > 0)
                observed = std::binomial_distribution<std::int64_t>(
                    arrivals, world.config.observability)(arrivals_rng);
            outcomes.observed_slots[location] = observed;

            const DeliveryPlan::Cell* cell = plan.cell(location, k);
            if (!cell || cell->empty() || observed == 0) continue;

            std::vector<std::pair<double, const std::pair<CampaignId, CreativeId>*>> cumulative;
            double acc = 0.0;
            for (const auto& [pair, p] : *cell) {
                acc += p;
                cumulative.emplace_back(acc, &pair);
            }
            std::uniform_real_distribution<double> uniform(0.0, 1.0);
            std::int64_t delivered_here = 0;
            for (std::int64_t slot = 0; slot < observed; ++slot) {
                double u = uniform(choice_rng);
                const std::pair<CampaignId, CreativeId>* chosen = nullptr;
                for (const auto& [edge, pair] : cumulative) {
                    if (u < edge) {
                        chosen = pair;
                        break;
                    }
                }
                if (!chosen) continue;  // residual: no ad
                auto& slot_outcome =
                    outcomes.delivered[{location, chosen->first, chosen->second}];
                slot_outcome.first += 1;
                double p = world.true_profit(chosen->first, chosen->second, location, k);
                slot_outcome.second += p;
                frame_revenue += p;
                ++delivered_here;
            }
            if (delivered_here > arrivals) ++report.supply_violations;
        }

        for (const auto& [key, outcome] : outcomes.delivered) {
            report.impressions += outcome.first;
            auto it = report.spend_vs_budget.find(std::get<1>(key));
            if (it != report.spend_vs_budget.end()) it->second.first += outcome.second;
        }
        report.revenue += frame_revenue;
        report.frame_revenue.push_back(frame_revenue);
        policy.observe(outcomes);
    }
    return report;
}

Comparison compare(const World& world, const std::vector<PolicyFactory>& policies,
                   const std::vector<std::uint64_t>& seeds, int span) {
    if (seeds.empty()) throw std::invalid_argument("compare: at least one seed required");
    if (span == 0) span = world.span();
    Comparison out;
    for (const auto& factory : policies) {
        ComparisonRow row;
        for (std::uint64_t seed : seeds) {
            auto policy = factory();
            if (row.policy.empty()) row.policy = policy->name();
            row.revenue_per_seed.push_back(run_policy(world, *policy, span, seed).revenue);
        }
        double mean = std::accumulate(row.revenue_per_seed.begin(), row.revenue_per_seed.end(), 0.0) /
                      static_cast<double>(row.revenue_per_seed.size());
        double var = 0.0;
        for (double r : row.revenue_per_seed) var += (r - mean) * (r - mean);
        var /= static_cast<double>(row.revenue_per_seed.size());
        row.mean_revenue = mean;
        row.std_revenue = std::sqrt(var);
        out.rows.push_back(std::move(row));
    }
    const ComparisonRow* lp = nullptr;
    const ComparisonRow* greedy = nullptr;
    for (const auto& row : out.rows) {
        if (row.policy == "lp-engine") lp = &row;
        if (row.policy == "greedy") greedy = &row;
    }
    if (lp && greedy) {
        out.uplift_abs = lp->mean_revenue - greedy->mean_revenue;
        if (greedy->mean_revenue > 0.0) out.uplift_pct = out.uplift_abs / greedy->mean_revenue;
    }
    return out;
}

}  // namespace adopt
