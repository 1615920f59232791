#include "adopt/delivery.hpp"

#include <algorithm>
#include <cmath>

#include "adopt/errors.hpp"
#include "adopt/lp_model.hpp"
#include "adopt/simplex.hpp"

namespace adopt {

void DeliveryPlan::set(const LocationId& l, FrameIndex k, Cell probabilities) {
    cells_[{l, k}] = std::move(probabilities);
}

const DeliveryPlan::Cell* DeliveryPlan::cell(const LocationId& l, FrameIndex k) const {
    auto it = cells_.find({l, k});
    return it == cells_.end() ? nullptr : &it->second;
}

double DeliveryPlan::residual(const LocationId& l, FrameIndex k) const {
    const Cell* c = cell(l, k);
    if (!c) return 1.0;
    double sum = 0.0;
    for (const auto& [pair, p] : *c) sum += p;
    return 1.0 - sum;
}

std::vector<std::string> DeliveryPlan::violations() const {
    std::vector<std::string> out;
    for (const auto& [key, cell] : cells_) {
        double sum = 0.0;
        for (const auto& [pair, p] : cell) {
            if (p < 0.0 || p > 1.0)
                out.push_back("probability out of range at (" + key.first + ", frame " +
                              std::to_string(key.second) + ")");
            sum += p;
        }
        if (sum > 1.0 + 1e-9)
            out.push_back("probabilities sum to " + std::to_string(sum) + " at (" + key.first +
                          ", frame " + std::to_string(key.second) + ")");
    }
    return out;
}

EngineState make_engine_state(const FrameClock& clock, std::map<CampaignId, double> budgets,
                              EngineConfig config) {
    EngineState state;
    state.clock = clock;
    state.initial_budget = budgets;
    state.remaining_budget = std::move(budgets);
    state.config = std::move(config);
    return state;
}

Instance apply_horizon(const Instance& instance, int horizon) {
    if (horizon < 1) throw std::invalid_argument("apply_horizon: horizon must be >= 1");
    const auto& frames = instance.admissible.frames();
    if (static_cast<int>(frames.size()) <= horizon) return instance;

    std::vector<FrameIndex> ordered(frames.begin(), frames.end());
    const FrameIndex aggregate = ordered[horizon];  // first merged frame keeps its index
    auto merged = [&](FrameIndex k) { return k >= aggregate; };

    Instance out;
    out.flags = instance.flags;
    out.demand = instance.demand;

    std::vector<Quad> quads;
    std::map<std::tuple<CampaignId, CreativeId, LocationId>, std::pair<double, double>> profit_acc;
    std::map<std::tuple<CampaignId, CreativeId, LocationId>, std::pair<double, int>> profit_plain;
    for (const Quad& q : instance.admissible.points()) {
        if (!merged(q.frame)) {
            quads.push_back(q);
            continue;
        }
        double s = instance.supply.at({q.location, q.frame});
        double p = instance.profit.at(q);
        auto key = std::make_tuple(q.campaign, q.creative, q.location);
        profit_acc[key].first += s * p;
        profit_acc[key].second += s;
        profit_plain[key].first += p;
        profit_plain[key].second += 1;
        quads.push_back({q.campaign, q.creative, aggregate, q.location});
    }
    out.admissible = AdmissibleSet(std::move(quads));

    for (const auto& [cell, s] : instance.supply) {
        if (!merged(cell.frame)) out.supply[cell] = s;
        else out.supply[{cell.location, aggregate}] += s;
    }
    for (const auto& [quad, p] : instance.profit) {
        if (!merged(quad.frame)) out.profit[quad] = p;
    }
    for (const auto& [key, acc] : profit_acc) {
        const auto& [campaign, creative, location] = key;
        Quad q{campaign, creative, aggregate, location};
        if (acc.second > 0.0) out.profit[q] = acc.first / acc.second;
        else out.profit[q] = profit_plain.at(key).first / profit_plain.at(key).second;
    }
    for (const auto& [key, m] : instance.mu) {
        if (!merged(key.frame)) out.mu[key] = m;
        else out.mu[{key.campaign, aggregate}] += m;
    }
    for (const auto& [quad, l] : instance.lambda) {
        if (!merged(quad.frame)) out.lambda[quad] = l;
        else out.lambda[{quad.campaign, quad.creative, aggregate, quad.location}] += l;
    }
    // Share caps merge with supply weights so cap * supply mass is conserved;
    // a zero-supply group falls back to the plain mean.
    struct CapAcc {
        double weighted = 0.0, weight = 0.0, plain = 0.0;
        int count = 0;
    };
    std::map<LocationId, CapAcc> cap_acc;
    for (const auto& [cell, frac] : instance.overflow_frac) {
        if (!merged(cell.frame)) {
            out.overflow_frac[cell] = frac;
            continue;
        }
        auto s = instance.supply.find(cell);
        double weight = s == instance.supply.end() ? 0.0 : std::max(s->second, 0.0);
        CapAcc& acc = cap_acc[cell.location];
        acc.weighted += frac * weight;
        acc.weight += weight;
        acc.plain += frac;
        acc.count += 1;
    }
    for (const auto& [location, acc] : cap_acc) {
        out.overflow_frac[{location, aggregate}] =
            acc.weight > 0.0 ? acc.weighted / acc.weight : acc.plain / acc.count;
    }
    return out;
}

DeliveryPlan to_probabilities(const Configuration& config,
                              const std::map<LocationFrameKey, double>& supply) {
    std::map<LocationFrameKey, double> used;
    for (const auto& [quad, x] : config.values()) {
        LocationFrameKey cell{quad.location, quad.frame};
        if (!supply.count(cell))
            throw InternalError("to_probabilities: no supply entry for (" + quad.location +
                                ", frame " + std::to_string(quad.frame) + ")");
        used[cell] += x;
    }
    for (const auto& [cell, total] : used) {
        double s = supply.at(cell);
        if (total > s + 1e-6 * std::max(1.0, s))
            throw InternalError("to_probabilities: assigned impressions exceed supply at (" +
                                cell.location + ", frame " + std::to_string(cell.frame) + ")");
    }

    DeliveryPlan plan;
    std::map<LocationFrameKey, DeliveryPlan::Cell> cells;
    for (const auto& [cell, s] : supply) cells[cell];  // zero cells exist too
    for (const auto& [quad, x] : config.values()) {
        double s = supply.at({quad.location, quad.frame});
        double p = s > 0.0 ? std::clamp(x / s, 0.0, 1.0) : 0.0;
        cells[{quad.location, quad.frame}][{quad.campaign, quad.creative}] = p;
    }
    for (auto& [cell, probabilities] : cells) {
        double sum = 0.0;
        for (const auto& [pair, p] : probabilities) sum += p;
        if (sum > 1.0) {  // possible only through rounding; rescale the noise away
            for (auto& [pair, p] : probabilities) p /= sum;
        }
        plan.set(cell.location, cell.frame, std::move(probabilities));
    }
    return plan;
}

namespace {

struct ProjectionCache {
    std::map<std::tuple<CampaignId, CreativeId, LocationId, int, int>, ProfitEstimate> entries;
};

ProfitEstimate cached_profit(ProjectionCache& cache, const HistoryLog& history, const Quad& quad,
                             const FrameClock& clock, const ProjectionParams& params) {
    std::int64_t ts = clock.frame_start(quad.frame);
    auto key = std::make_tuple(quad.campaign, quad.creative, quad.location, hour_of_day(ts),
                               day_of_week(ts));
    auto it = cache.entries.find(key);
    if (it != cache.entries.end()) return it->second;
    ProfitEstimate est = project_profit(history, quad, clock, params);
    cache.entries[key] = est;
    return est;
}

}  // namespace

CycleResult plan_cycle(const EngineState& state, const Schedule& schedule) {
    const EngineConfig& cfg = state.config;

    std::vector<Quad> window;
    for (const Quad& q : schedule.admissible.points())
        if (q.frame >= state.current_frame) window.push_back(q);
    if (window.empty())
        throw ModelError("plan_cycle: schedule has no admissible points in the remaining window");

    Instance instance;
    instance.flags = cfg.flags;
    instance.admissible = AdmissibleSet(std::move(window));
    instance.demand = state.remaining_budget;

    CycleResult result;
    ProjectionCache cache;
    for (const Quad& q : instance.admissible.points()) {
        ProfitEstimate est = cached_profit(cache, state.history, q, state.clock, cfg.projection);
        instance.profit[q] = est.value;
        result.diagnostics.ladder_histogram[est.level] += 1;
    }

    ForecastModel model;
    if (cfg.use_regressor) model = fit_supply_regressor(state.history);
    for (const auto& cell : instance.admissible.cells()) {
        double value = 0.0;
        if (cfg.use_regressor && model.trained(cell.location)) {
            value = predict_supply(model, cell.location, cell.frame, state.clock);
        } else {
            SupplyEstimate est = project_supply_weighted(state.history, cell.location, cell.frame,
                                                         state.clock, cfg.projection);
            value = est.no_data ? cfg.default_supply : est.value;
        }
        instance.supply[cell] = value;
    }

    if (cfg.flags.lasting && cfg.mu_request > 0.0) {
        std::set<CampaignFrameKey> keys;
        for (const Quad& q : instance.admissible.points()) keys.insert({q.campaign, q.frame});
        for (const auto& key : keys) instance.mu[key] = cfg.mu_request;
    }
    if (cfg.flags.overflow) {
        for (const auto& cell : instance.admissible.cells())
            instance.overflow_frac[cell] = cfg.overflow_request;
    }
    if (cfg.flags.learning && cfg.lambda_request > 0.0) {
        for (const Quad& q : instance.admissible.points()) {
            if (!schedule.new_quads.count(q)) continue;
            auto progress = state.new_quad_impressions.find({q.campaign, q.creative, q.location});
            if (progress != state.new_quad_impressions.end() &&
                progress->second >= cfg.projection.n_min)
                continue;  // learned enough; the floor is retired
            instance.lambda[q] = cfg.lambda_request;
        }
    }

    Instance final_instance = clamp_secondary(apply_horizon(instance, cfg.horizon));
    LpProblem lp = build_revenue_lp(final_instance);

    for (int j = 0; j < lp.num_vars; ++j) {
        int distance = lp.var_quads[j].frame - state.current_frame;
        lp.objective[j] *= std::pow(cfg.gamma, distance);
    }

    LpSolution sol = solve_simplex(lp, cfg.solver);
    if (sol.status == LpStatus::Infeasible) {
        if (!cfg.flags.overflow)
            throw InternalError("plan_cycle: clamped model infeasible without overflow caps");
        throw ModelError("plan_cycle: model infeasible (overflow caps active)");
    }
    if (sol.status == LpStatus::Unbounded)
        throw InternalError("plan_cycle: revenue model unbounded");

    // Every admissible quad gets a value (zeros included) so the emitted plan
    // carries explicit zero probabilities for undelivered creatives.
    std::map<Quad, double> values;
    double projected_revenue = 0.0;
    for (int j = 0; j < lp.num_vars; ++j) {
        double x = std::max(0.0, sol.values[j]);
        values[lp.var_quads[j]] = x;
        projected_revenue += final_instance.profit.at(lp.var_quads[j]) * x;
    }
    Configuration config(final_instance.admissible, std::move(values));
    result.full_plan = to_probabilities(config, final_instance.supply);

    for (const auto& [key, cell] : result.full_plan.cells())
        if (key.second == state.current_frame) result.next_frame.set(key.first, key.second, cell);

    result.diagnostics.objective = projected_revenue;
    result.diagnostics.discounted_objective = sol.objective;
    result.diagnostics.solver_iterations = sol.iterations;
    result.diagnostics.variables = lp.num_vars;
    result.diagnostics.rows = static_cast<int>(lp.rows.size());
    return result;
}

void advance(EngineState& state, const FrameOutcomes& realized) {
    if (realized.frame != state.current_frame)
        throw std::invalid_argument("advance: outcomes are not for the current frame");
    const std::int64_t ts = state.clock.frame_start(realized.frame);

    std::map<LocationId, std::int64_t> delivered_per_location;
    std::map<CampaignId, double> earned;
    for (const auto& [key, outcome] : realized.delivered) {
        const auto& [location, campaign, creative] = key;
        const auto& [impressions, profit] = outcome;
        if (impressions < 0 || profit < 0.0)
            throw std::invalid_argument("advance: negative outcome");
        state.history.append({ts, location, campaign, creative, impressions, profit});
        delivered_per_location[location] += impressions;
        earned[campaign] += profit;
        auto& progress = state.new_quad_impressions[{campaign, creative, location}];
        progress += impressions;
    }
    for (const auto& [location, slots] : realized.observed_slots) {
        std::int64_t filled = 0;
        auto it = delivered_per_location.find(location);
        if (it != delivered_per_location.end()) filled = it->second;
        if (slots < filled)
            throw std::invalid_argument("advance: delivered more than the observed slots");
        state.history.append({ts, location, "", "", slots - filled, 0.0});
    }
    for (const auto& [campaign, profit] : earned) {
        auto it = state.remaining_budget.find(campaign);
        if (it == state.remaining_budget.end()) continue;
        if (std::isfinite(it->second)) it->second = std::max(0.0, it->second - profit);
    }
    state.current_frame += 1;
}

}  // namespace adopt
