#include "adopt/feasibility.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "adopt/errors.hpp"
#include "adopt/lp_model.hpp"
#include "adopt/simplex.hpp"

namespace adopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double budget_term(double budget, int divisor, double m_cap) {
    if (!std::isfinite(budget) || m_cap <= 0.0) return kInf;
    return budget / (divisor * m_cap);
}

// Fact-1 style cap evaluated against arbitrary supply/budget maps, so the
// same code serves both the plain bound and the lambda-residual bound.
double mu_cap(const Instance& instance, const CampaignId& campaign, FrameIndex frame,
              const std::map<LocationFrameKey, double>& supply,
              const std::map<CampaignId, double>& demand, double m_cap) {
    const auto& locations = instance.admissible.locations_of(campaign, frame);
    if (locations.empty())
        throw std::domain_error("mu_bound: campaign '" + campaign + "' has no admissible point at frame " +
                                std::to_string(frame));
    auto d = demand.find(campaign);
    double budget = d == demand.end() ? kInf : d->second;
    double bound = budget_term(budget, instance.admissible.frames_of_campaign(campaign), m_cap);
    for (const LocationId& t : locations) {
        double s = supply.at({t, frame});
        int campaigns = instance.admissible.campaigns_at(frame, t);
        bound = std::min(bound, s / campaigns);
    }
    return bound;
}

}  // namespace

double profit_cap(const Instance& instance) {
    double m = 0.0;
    for (const Quad& q : instance.admissible.points()) {
        auto it = instance.profit.find(q);
        if (it == instance.profit.end())
            throw ModelError("profit_cap: missing profit for an admissible quad");
        m = std::max(m, it->second);
    }
    return m;
}

double mu_bound(const Instance& instance, const CampaignId& campaign, FrameIndex frame) {
    return mu_cap(instance, campaign, frame, instance.supply, instance.demand,
                  profit_cap(instance));
}

double lambda_bound(const Instance& instance, const Quad& quad) {
    if (!instance.admissible.contains(quad))
        throw std::domain_error("lambda_bound: quad is not admissible");
    double budget = instance.budget(quad.campaign);
    double m_cap = profit_cap(instance);
    double bound = budget_term(budget, instance.admissible.points_of_campaign(quad.campaign), m_cap);
    double s = instance.supply.at({quad.location, quad.frame});
    int pairs = instance.admissible.pairs_at(quad.frame, quad.location);
    return std::min(bound, s / pairs);
}

FeasibilityBounds feasibility_bounds(const Instance& instance) {
    FeasibilityBounds out;
    out.profit_cap = profit_cap(instance);
    std::set<CampaignFrameKey> keys;
    for (const Quad& q : instance.admissible.points()) keys.insert({q.campaign, q.frame});
    for (const auto& key : keys)
        out.mu_max[key] = mu_bound(instance, key.campaign, key.frame);
    for (const Quad& q : instance.admissible.points()) out.lambda_max[q] = lambda_bound(instance, q);
    return out;
}

Instance clamp_secondary(const Instance& instance) {
    Instance out = instance;
    const double m_cap = profit_cap(instance);

    for (auto& [quad, requested] : out.lambda) {
        if (!instance.admissible.contains(quad)) {
            requested = 0.0;
            continue;
        }
        requested = std::min(requested, lambda_bound(instance, quad));
    }

    // With both lower-bound families active the lasting cap is evaluated on
    // the instance left over after the lambda floors are paid for, which is
    // what makes the two families jointly satisfiable.
    bool joint = instance.flags.lasting && instance.flags.learning && !out.lambda.empty();
    std::map<LocationFrameKey, double> residual_supply;
    std::map<CampaignId, double> residual_demand;
    std::map<CampaignFrameKey, double> lambda_mass;
    if (joint) {
        residual_supply = instance.supply;
        residual_demand = instance.demand;
        for (const auto& [quad, floor] : out.lambda) {
            if (floor <= 0.0) continue;
            residual_supply[{quad.location, quad.frame}] -= floor;
            auto d = residual_demand.find(quad.campaign);
            if (d != residual_demand.end() && std::isfinite(d->second))
                d->second -= floor * instance.profit.at(quad);
            lambda_mass[{quad.campaign, quad.frame}] += floor;
        }
        for (auto& [cell, s] : residual_supply) s = std::max(s, 0.0);
        for (auto& [campaign, d] : residual_demand) d = std::max(d, 0.0);
    }

    for (auto& [key, requested] : out.mu) {
        if (instance.admissible.locations_of(key.campaign, key.frame).empty()) {
            requested = 0.0;  // no admissible point: only the empty sum exists
            continue;
        }
        double cap = mu_cap(instance, key.campaign, key.frame, instance.supply, instance.demand,
                            m_cap);
        if (joint) {
            double mass = 0.0;
            auto it = lambda_mass.find(key);
            if (it != lambda_mass.end()) mass = it->second;
            double residual_cap = mass + mu_cap(instance, key.campaign, key.frame, residual_supply,
                                                residual_demand, m_cap);
            cap = std::min(cap, residual_cap);
        }
        requested = std::min(requested, cap);
    }
    return out;
}

FeasibilityVerdict check_feasible(const Instance& instance, const SolverSettings& settings) {
    LpProblem p = build_revenue_lp(instance);
    LpSolution sol;
    try {
        sol = solve_phase1(p, settings);
    } catch (const IterationLimitError& e) {
        throw std::runtime_error(std::string("check_feasible: solver did not converge: ") +
                                 e.what());
    }
    FeasibilityVerdict verdict;
    verdict.iterations = sol.iterations;
    verdict.feasible = (sol.status == LpStatus::Optimal);
    if (verdict.feasible) {
        std::map<Quad, double> values;
        for (int j = 0; j < p.num_vars; ++j)
            if (sol.values[j] > 0.0) values[p.var_quads[j]] = sol.values[j];
        verdict.witness = Configuration(instance.admissible, std::move(values));
    }
    return verdict;
}

}  // namespace adopt
