#include "adopt/instance.hpp"

#include <cmath>

#include "adopt/errors.hpp"

namespace adopt {

double Instance::budget(const CampaignId& c) const {
    auto it = demand.find(c);
    return it == demand.end() ? kUnboundedBudget : it->second;
}

void Instance::validate() const {
    for (const Quad& q : admissible.points()) {
        auto p = profit.find(q);
        if (p == profit.end())
            throw ModelError("instance: missing profit for quad (" + q.campaign + "," + q.creative +
                             "," + std::to_string(q.frame) + "," + q.location + ")");
        if (!std::isfinite(p->second) || p->second < 0.0)
            throw ModelError("instance: profit must be finite and >= 0");
    }
    for (const auto& cell : admissible.cells()) {
        auto s = supply.find(cell);
        if (s == supply.end())
            throw ModelError("instance: missing supply for (" + cell.location + ", frame " +
                             std::to_string(cell.frame) + ")");
        if (!std::isfinite(s->second) || s->second < 0.0)
            throw ModelError("instance: supply must be finite and >= 0");
    }
    for (const auto& [campaign, d] : demand) {
        if (std::isnan(d) || d < 0.0) throw ModelError("instance: budget must be >= 0 or inf");
    }
    for (const auto& [cell, p] : overflow_frac) {
        if (!(p >= 0.0 && p <= 1.0))
            throw ModelError("instance: overflow fraction must be in [0,1]");
    }
    for (const auto& [key, m] : mu) {
        if (!std::isfinite(m) || m < 0.0) throw ModelError("instance: mu must be finite and >= 0");
    }
    for (const auto& [quad, l] : lambda) {
        if (!std::isfinite(l) || l < 0.0)
            throw ModelError("instance: lambda must be finite and >= 0");
    }
}

}  // namespace adopt
