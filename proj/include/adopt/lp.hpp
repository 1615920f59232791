#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "adopt/catalog.hpp"

namespace adopt {

enum class Relation { LessEq, GreaterEq, Equal };
enum class Sense { Maximize, Minimize };

/// One linear constraint, sparse over variable indices.
struct LpRow {
    std::vector<std::pair<int, double>> coeffs;
    Relation rel = Relation::LessEq;
    double rhs = 0.0;
    std::string label;  // diagnostic only
};

/// A solver-facing linear program. All variables have lower bound 0 and no
/// upper bound; rows carry their relation explicitly.
struct LpProblem {
    int num_vars = 0;
    std::vector<LpRow> rows;
    std::vector<double> objective;  // size num_vars
    Sense sense = Sense::Maximize;
    std::vector<Quad> var_quads;  // variable index -> quad; empty for raw LPs

    int var_of(const Quad& q) const;  // -1 when absent
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> values;  // structural variables only
    double objective = 0.0;
    int iterations = 0;
    std::vector<int> basis;  // final basic column indices (internal numbering)
};

struct SolverSettings {
    double feas_tol = 1e-8;   // absolute, on scaled rows
    double opt_tol = 1e-9;    // reduced-cost threshold
    int max_iterations = 0;   // 0 = 50 * (num_vars + num_rows)
    std::string pivot_rule = "dantzig-bland";
};

/// Raised when the pivot budget is exhausted. Carries the best feasible
/// point seen, when one exists.
class IterationLimitError : public std::runtime_error {
public:
    IterationLimitError(const std::string& what, std::optional<LpSolution> best)
        : std::runtime_error(what), best_feasible(std::move(best)) {}
    std::optional<LpSolution> best_feasible;
};

}  // namespace adopt
