#pragma once

#include "adopt/lp.hpp"
#include "adopt/lp_model.hpp"

namespace adopt {

/// Specialized solver for balanced transportation instances: northwest-corner
/// start, then stepping-stone improvement with MODI potentials. Degeneracy is
/// handled by an epsilon perturbation of the supplies; final flows are
/// re-derived from the unperturbed data on the optimal basis tree.
/// Solution values are indexed supply_index * num_demands + demand_index.
LpSolution solve_transportation(const TransportationInstance& t,
                                const SolverSettings& settings = {});

}  // namespace adopt
