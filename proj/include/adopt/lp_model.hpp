#pragma once

#include <map>
#include <string>
#include <vector>

#include "adopt/instance.hpp"
#include "adopt/lp.hpp"

namespace adopt {

/// Revenue-maximization model: one variable per admissible quad, supply and
/// (finite-budget) demand rows always, lasting / overflow / learning rows
/// per the instance flags, objective maximize sum(p * x). Infinite budgets
/// emit no demand row.
LpProblem build_revenue_lp(const Instance& instance);

/// Minimum-impressions model: supply rows, one per-campaign equality on
/// generated profit for each target entry, objective minimize sum(x).
LpProblem build_min_impressions_lp(const Instance& instance,
                                   const std::map<CampaignId, double>& targets);

struct LexicographicLp {
    LpProblem stage1;
    LpSolution stage1_solution;
    LpProblem stage2;       // stage-1 region + revenue floor, minimize sum(x)
    double revenue_floor = 0.0;
};

/// Solves the revenue stage, then builds the impression-minimizing stage
/// whose revenue is held within eps_lex of the stage-1 optimum.
LexicographicLp build_lexicographic(const Instance& instance, const SolverSettings& settings = {});

/// Revenue floor slack used by the lexicographic stage 2.
double lexicographic_epsilon(double stage1_objective);

/// Classical transportation data. Rows index supplies, columns demands:
/// sum_j x[i][j] = supplies[i], sum_i x[i][j] = demands[j].
struct TransportationInstance {
    std::vector<double> supplies;
    std::vector<double> demands;
    std::vector<std::vector<double>> values;  // unit cost (or profit, see maximize)
    bool maximize = false;

    bool balanced(double rel_tol = 1e-9) const;
};

/// Appends a zero-value dummy supply or demand so totals match.
TransportationInstance balance(const TransportationInstance& t);

/// Equality-form LP equivalent of a balanced transportation instance
/// (variable index = supply_index * num_demands + demand_index).
LpProblem transportation_to_lp(const TransportationInstance& t);

/// Checks an assignment directly against the instance's constraint system,
/// without any LP machinery. Returns one message per violation.
std::vector<std::string> check_constraints(const Instance& instance,
                                           const std::map<Quad, double>& x,
                                           double tol = 1e-6);

}  // namespace adopt
