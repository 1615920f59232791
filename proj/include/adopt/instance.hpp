#pragma once

#include <limits>
#include <map>

#include "adopt/admissible.hpp"

namespace adopt {

constexpr double kUnboundedBudget = std::numeric_limits<double>::infinity();

/// Which optional constraint families enter the model. Supply, demand and
/// non-negativity are always on.
struct ConstraintFlags {
    bool lasting = false;   // per-(campaign, frame) delivery minimum
    bool overflow = false;  // single-creative share cap where alternatives exist
    bool learning = false;  // per-new-quad impression minimum
};

/// One optimization problem: the admissible set plus every coefficient the
/// constraint system needs. Budgets may be infinite; everything else is
/// finite.
struct Instance {
    AdmissibleSet admissible;
    std::map<LocationFrameKey, double> supply;     // S_{l,k}, impressions
    std::map<CampaignId, double> demand;           // D_i, currency; may be +inf
    std::map<Quad, double> profit;                 // p per impression
    std::map<CampaignFrameKey, double> mu;         // lasting minima, impressions
    std::map<LocationFrameKey, double> overflow_frac;  // P_{l,k} in [0,1]
    std::map<Quad, double> lambda;                 // learning minima for "new" quads
    ConstraintFlags flags;

    double budget(const CampaignId& c) const;  // defaults to unbounded
    void validate() const;                     // throws ModelError on gaps
};

}  // namespace adopt
