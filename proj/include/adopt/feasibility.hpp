#pragma once

#include <map>

#include "adopt/instance.hpp"
#include "adopt/lp.hpp"

namespace adopt {

/// Safe caps for the lasting and learning minima, plus the profit cap M they
/// are computed against. Entries exist exactly where admissible points exist.
struct FeasibilityBounds {
    std::map<CampaignFrameKey, double> mu_max;
    std::map<Quad, double> lambda_max;
    double profit_cap = 0.0;
};

/// M: the largest profit over admissible points (0 for an empty set). The
/// budget terms of both bounds treat M = 0 as "no budget pressure".
double profit_cap(const Instance& instance);

/// Safe per-(campaign, frame) lasting cap:
///   min( D_i / (#frames_of_i * M),
///        min over admissible locations t at (i, k) of S_{t,k} / #campaigns_at(k, t) ).
/// Requires at least one admissible point at (campaign, frame).
double mu_bound(const Instance& instance, const CampaignId& campaign, FrameIndex frame);

/// Safe per-quad learning cap:
///   min( D_i / (#points_of_i * M), S_{l,k} / #pairs_at(k, l) ).
/// Requires the quad to be admissible.
double lambda_bound(const Instance& instance, const Quad& quad);

FeasibilityBounds feasibility_bounds(const Instance& instance);

/// Returns a copy whose lambda entries are capped by lambda_bound and whose
/// mu entries are capped by mu_bound. When both the lasting and learning
/// families are enabled, mu is additionally capped so that both lower-bound
/// families fit under supply and budgets together (the lambda floor is
/// subtracted out first and the lasting cap is recomputed on the residual
/// instance). The result always admits a feasible point of the supply,
/// demand, lasting and learning system.
Instance clamp_secondary(const Instance& instance);

struct FeasibilityVerdict {
    bool feasible = false;
    Configuration witness;  // phase-1 point when feasible
    int iterations = 0;
};

/// Phase-1 simplex over the instance's full (flag-selected) constraint
/// system.
FeasibilityVerdict check_feasible(const Instance& instance, const SolverSettings& settings = {});

}  // namespace adopt
