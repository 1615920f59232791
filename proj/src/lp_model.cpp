#include "adopt/lp_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adopt/errors.hpp"
#include "adopt/simplex.hpp"

namespace adopt {

namespace {

std::string quad_name(const Quad& q) {
    return "(" + q.campaign + "," + q.creative + "," + std::to_string(q.frame) + "," + q.location +
           ")";
}

LpProblem problem_skeleton(const Instance& instance) {
    LpProblem p;
    p.var_quads = instance.admissible.points();  // sorted; defines the variable order
    p.num_vars = static_cast<int>(p.var_quads.size());
    return p;
}

void add_supply_rows(const Instance& instance, const std::map<Quad, int>& var_of,
                     std::vector<LpRow>& rows) {
    for (const auto& cell : instance.admissible.cells()) {
        auto s = instance.supply.find(cell);
        if (s == instance.supply.end())
            throw ModelError("missing supply for (" + cell.location + ", frame " +
                             std::to_string(cell.frame) + ")");
        LpRow row;
        row.rel = Relation::LessEq;
        row.rhs = s->second;
        row.label = "supply " + cell.location + " f" + std::to_string(cell.frame);
        for (const auto& [campaign, creative] :
             instance.admissible.pair_list_at(cell.frame, cell.location)) {
            Quad q{campaign, creative, cell.frame, cell.location};
            row.coeffs.emplace_back(var_of.at(q), 1.0);
        }
        rows.push_back(std::move(row));
    }
}

double profit_at(const Instance& instance, const Quad& q) {
    auto it = instance.profit.find(q);
    if (it == instance.profit.end()) throw ModelError("missing profit for quad " + quad_name(q));
    return it->second;
}

}  // namespace

int LpProblem::var_of(const Quad& q) const {
    auto it = std::lower_bound(var_quads.begin(), var_quads.end(), q);
    if (it == var_quads.end() || *it != q) return -1;
    return static_cast<int>(it - var_quads.begin());
}

LpProblem build_revenue_lp(const Instance& instance) {
    LpProblem p = problem_skeleton(instance);
    std::map<Quad, int> var_of;
    for (int j = 0; j < p.num_vars; ++j) var_of[p.var_quads[j]] = j;

    add_supply_rows(instance, var_of, p.rows);

    // Demand (budget) rows with profit coefficients; an unbounded budget
    // emits no row.
    std::map<CampaignId, LpRow> demand_rows;
    for (const Quad& q : instance.admissible.points()) {
        double budget = instance.budget(q.campaign);
        if (!std::isfinite(budget)) continue;
        LpRow& row = demand_rows[q.campaign];
        row.rel = Relation::LessEq;
        row.rhs = budget;
        row.label = "demand " + q.campaign;
        row.coeffs.emplace_back(var_of.at(q), profit_at(instance, q));
    }
    for (auto& [campaign, row] : demand_rows) p.rows.push_back(std::move(row));

    if (instance.flags.lasting) {
        for (const auto& [key, minimum] : instance.mu) {
            if (minimum <= 0.0) continue;
            const auto& locations = instance.admissible.locations_of(key.campaign, key.frame);
            if (locations.empty())
                throw ModelError("lasting minimum for (" + key.campaign + ", frame " +
                                 std::to_string(key.frame) + ") has no admissible points");
            LpRow row;
            row.rel = Relation::GreaterEq;
            row.rhs = minimum;
            row.label = "lasting " + key.campaign + " f" + std::to_string(key.frame);
            for (const Quad& q : instance.admissible.points())
                if (q.campaign == key.campaign && q.frame == key.frame)
                    row.coeffs.emplace_back(var_of.at(q), 1.0);
            p.rows.push_back(std::move(row));
        }
    }

    if (instance.flags.overflow) {
        // Only cells where at least two distinct (campaign, creative) pairs
        // are admissible get share caps; a missing fraction means no cap.
        for (const Quad& q : instance.admissible.points()) {
            if (instance.admissible.pairs_at(q.frame, q.location) < 2) continue;
            auto frac = instance.overflow_frac.find({q.location, q.frame});
            if (frac == instance.overflow_frac.end()) continue;
            auto s = instance.supply.find({q.location, q.frame});
            if (s == instance.supply.end())
                throw ModelError("missing supply for overflow row at " + quad_name(q));
            LpRow row;
            row.rel = Relation::LessEq;
            row.rhs = frac->second * s->second;
            row.label = "overflow " + quad_name(q);
            row.coeffs.emplace_back(var_of.at(q), 1.0);
            p.rows.push_back(std::move(row));
        }
    }

    if (instance.flags.learning) {
        for (const auto& [quad, minimum] : instance.lambda) {
            if (minimum <= 0.0) continue;
            if (!instance.admissible.contains(quad))
                throw ModelError("learning minimum for inadmissible quad " + quad_name(quad));
            LpRow row;
            row.rel = Relation::GreaterEq;
            row.rhs = minimum;
            row.label = "learning " + quad_name(quad);
            row.coeffs.emplace_back(var_of.at(quad), 1.0);
            p.rows.push_back(std::move(row));
        }
    }

    p.objective.resize(p.num_vars);
    for (int j = 0; j < p.num_vars; ++j) p.objective[j] = profit_at(instance, p.var_quads[j]);
    p.sense = Sense::Maximize;
    return p;
}

LpProblem build_min_impressions_lp(const Instance& instance,
                                   const std::map<CampaignId, double>& targets) {
    LpProblem p = problem_skeleton(instance);
    std::map<Quad, int> var_of;
    for (int j = 0; j < p.num_vars; ++j) var_of[p.var_quads[j]] = j;

    add_supply_rows(instance, var_of, p.rows);

    for (const auto& [campaign, target] : targets) {
        if (!std::isfinite(target) || target < 0.0)
            throw ModelError("impression target for '" + campaign + "' must be finite and >= 0");
        if (instance.admissible.points_of_campaign(campaign) == 0 && instance.demand.count(campaign) == 0)
            throw ModelError("impression target for unknown campaign '" + campaign + "'");
        LpRow row;
        row.rel = Relation::Equal;
        row.rhs = target;
        row.label = "target " + campaign;
        for (const Quad& q : instance.admissible.points())
            if (q.campaign == campaign)
                row.coeffs.emplace_back(var_of.at(q), profit_at(instance, q));
        p.rows.push_back(std::move(row));
    }

    p.objective.assign(p.num_vars, 1.0);
    p.sense = Sense::Minimize;
    return p;
}

double lexicographic_epsilon(double stage1_objective) {
    return 1e-7 * std::max(1.0, std::fabs(stage1_objective));
}

LexicographicLp build_lexicographic(const Instance& instance, const SolverSettings& settings) {
    LexicographicLp out;
    out.stage1 = build_revenue_lp(instance);
    out.stage1_solution = solve_simplex(out.stage1, settings);
    if (out.stage1_solution.status == LpStatus::Infeasible)
        throw ModelError("lexicographic: revenue stage is infeasible");
    if (out.stage1_solution.status == LpStatus::Unbounded)
        throw ModelError("lexicographic: revenue stage is unbounded");

    double f_star = out.stage1_solution.objective;
    out.revenue_floor = f_star - lexicographic_epsilon(f_star);

    out.stage2 = out.stage1;
    LpRow floor_row;
    floor_row.rel = Relation::GreaterEq;
    floor_row.rhs = out.revenue_floor;
    floor_row.label = "revenue floor";
    for (int j = 0; j < out.stage2.num_vars; ++j)
        floor_row.coeffs.emplace_back(j, out.stage1.objective[j]);
    out.stage2.rows.push_back(std::move(floor_row));
    out.stage2.objective.assign(out.stage2.num_vars, 1.0);
    out.stage2.sense = Sense::Minimize;
    return out;
}

bool TransportationInstance::balanced(double rel_tol) const {
    double s = std::accumulate(supplies.begin(), supplies.end(), 0.0);
    double d = std::accumulate(demands.begin(), demands.end(), 0.0);
    return std::fabs(s - d) <= rel_tol * std::max({1.0, std::fabs(s), std::fabs(d)});
}

TransportationInstance balance(const TransportationInstance& t) {
    for (double v : t.supplies)
        if (!std::isfinite(v)) throw std::invalid_argument("balance: supplies must be finite");
    for (double v : t.demands)
        if (!std::isfinite(v)) throw std::invalid_argument("balance: demands must be finite");
    TransportationInstance out = t;
    double s = std::accumulate(t.supplies.begin(), t.supplies.end(), 0.0);
    double d = std::accumulate(t.demands.begin(), t.demands.end(), 0.0);
    if (out.balanced()) return out;
    if (s > d) {
        out.demands.push_back(s - d);
        for (auto& row : out.values) row.push_back(0.0);
    } else {
        out.supplies.push_back(d - s);
        out.values.emplace_back(out.demands.size(), 0.0);
    }
    return out;
}

LpProblem transportation_to_lp(const TransportationInstance& t) {
    int m = static_cast<int>(t.supplies.size());
    int n = static_cast<int>(t.demands.size());
    LpProblem p;
    p.num_vars = m * n;
    p.objective.assign(p.num_vars, 0.0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) p.objective[i * n + j] = t.values[i][j];
    p.sense = t.maximize ? Sense::Maximize : Sense::Minimize;
    for (int i = 0; i < m; ++i) {
        LpRow row;
        row.rel = Relation::Equal;
        row.rhs = t.supplies[i];
        row.label = "supply " + std::to_string(i);
        for (int j = 0; j < n; ++j) row.coeffs.emplace_back(i * n + j, 1.0);
        p.rows.push_back(std::move(row));
    }
    for (int j = 0; j < n; ++j) {
        LpRow row;
        row.rel = Relation::Equal;
        row.rhs = t.demands[j];
        row.label = "demand " + std::to_string(j);
        for (int i = 0; i < m; ++i) row.coeffs.emplace_back(i * n + j, 1.0);
        p.rows.push_back(std::move(row));
    }
    return p;
}

std::vector<std::string> check_constraints(const Instance& instance,
                                           const std::map<Quad, double>& x,
                                           double tol) {
    std::vector<std::string> violations;
    auto value = [&](const Quad& q) {
        auto it = x.find(q);
        return it == x.end() ? 0.0 : it->second;
    };

    for (const auto& [quad, v] : x) {
        if (v < -tol) violations.push_back("negative value at " + quad_name(quad));
        if (!instance.admissible.contains(quad) && v > tol)
            violations.push_back("positive value at inadmissible quad " + quad_name(quad));
    }

    std::map<LocationFrameKey, double> used;
    std::map<CampaignId, double> spent;
    std::map<CampaignFrameKey, double> delivered;
    for (const Quad& q : instance.admissible.points()) {
        double v = value(q);
        used[{q.location, q.frame}] += v;
        spent[q.campaign] += v * instance.profit.at(q);
        delivered[{q.campaign, q.frame}] += v;
    }
    for (const auto& [cell, total] : used) {
        double s = instance.supply.at(cell);
        if (total > s + tol * std::max(1.0, s))
            violations.push_back("supply exceeded at (" + cell.location + ", frame " +
                                 std::to_string(cell.frame) + ")");
    }
    for (const auto& [campaign, total] : spent) {
        double budget = instance.budget(campaign);
        if (std::isfinite(budget) && total > budget + tol * std::max(1.0, budget))
            violations.push_back("budget exceeded for campaign " + campaign);
    }
    if (instance.flags.lasting) {
        for (const auto& [key, minimum] : instance.mu) {
            auto it = delivered.find(key);
            double got = it == delivered.end() ? 0.0 : it->second;
            if (got < minimum - tol * std::max(1.0, minimum))
                violations.push_back("lasting minimum missed for (" + key.campaign + ", frame " +
                                     std::to_string(key.frame) + ")");
        }
    }
    if (instance.flags.overflow) {
        for (const Quad& q : instance.admissible.points()) {
            if (instance.admissible.pairs_at(q.frame, q.location) < 2) continue;
            auto frac = instance.overflow_frac.find({q.location, q.frame});
            if (frac == instance.overflow_frac.end()) continue;
            double cap = frac->second * instance.supply.at({q.location, q.frame});
            if (value(q) > cap + tol * std::max(1.0, cap))
                violations.push_back("overflow cap exceeded at " + quad_name(q));
        }
    }
    if (instance.flags.learning) {
        for (const auto& [quad, minimum] : instance.lambda) {
            if (value(quad) < minimum - tol * std::max(1.0, minimum))
                violations.push_back("learning minimum missed at " + quad_name(quad));
        }
    }
    return violations;
}

}  // namespace adopt
