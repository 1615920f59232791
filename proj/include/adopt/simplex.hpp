#pragma once

#include "adopt/lp.hpp"

namespace adopt {

/// Two-phase primal simplex on a dense tableau. Dantzig pricing with a
/// switch to Bland's rule after 2*(n+m) consecutive degenerate pivots; rows
/// are scaled by their max-magnitude coefficient before solving; ratio-test
/// ties break on the lowest basic variable index.
LpSolution solve_simplex(const LpProblem& problem, const SolverSettings& settings = {});

/// Phase 1 only: decides feasibility of the constraint system and returns a
/// feasible point when one exists (objective fields refer to the original
/// objective evaluated at that point).
LpSolution solve_phase1(const LpProblem& problem, const SolverSettings& settings = {});

}  // namespace adopt
