#include "adopt/admissible.hpp"

#include <algorithm>
#include <stdexcept>

namespace adopt {

AdmissibleSet::AdmissibleSet(std::vector<Quad> quads) : points_(std::move(quads)) {
    std::sort(points_.begin(), points_.end());
    points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
    for (const Quad& q : points_) {
        lookup_.insert(q);
        campaign_frames_[q.campaign].insert(q.frame);
        campaign_points_[q.campaign] += 1;
        campaign_frame_locations_[{q.campaign, q.frame}].insert(q.location);
        LocationFrameKey cell{q.location, q.frame};
        cell_campaigns_[cell].insert(q.campaign);
        cell_pairs_[cell].emplace_back(q.campaign, q.creative);
        cells_.insert(cell);
        frames_.insert(q.frame);
    }
    for (auto& [cell, pairs] : cell_pairs_) {
        std::sort(pairs.begin(), pairs.end());
        pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    }
}

int AdmissibleSet::frames_of_campaign(const CampaignId& c) const {
    auto it = campaign_frames_.find(c);
    return it == campaign_frames_.end() ? 0 : static_cast<int>(it->second.size());
}

int AdmissibleSet::points_of_campaign(const CampaignId& c) const {
    auto it = campaign_points_.find(c);
    return it == campaign_points_.end() ? 0 : it->second;
}

const std::set<LocationId>& AdmissibleSet::locations_of(const CampaignId& c, FrameIndex k) const {
    static const std::set<LocationId> kEmpty;
    auto it = campaign_frame_locations_.find({c, k});
    return it == campaign_frame_locations_.end() ? kEmpty : it->second;
}

int AdmissibleSet::campaigns_at(FrameIndex k, const LocationId& l) const {
    auto it = cell_campaigns_.find({l, k});
    return it == cell_campaigns_.end() ? 0 : static_cast<int>(it->second.size());
}

int AdmissibleSet::pairs_at(FrameIndex k, const LocationId& l) const {
    auto it = cell_pairs_.find({l, k});
    return it == cell_pairs_.end() ? 0 : static_cast<int>(it->second.size());
}

const std::vector<std::pair<CampaignId, CreativeId>>& AdmissibleSet::pair_list_at(
    FrameIndex k, const LocationId& l) const {
    static const std::vector<std::pair<CampaignId, CreativeId>> kEmpty;
    auto it = cell_pairs_.find({l, k});
    return it == cell_pairs_.end() ? kEmpty : it->second;
}

AdmissibleSet full_grid(const Catalog& catalog) {
    std::vector<Quad> quads;
    for (const auto& [campaign, list] : catalog.creatives())
        for (const auto& creative : list)
            for (FrameIndex k = 1; k <= catalog.frame_count(); ++k)
                for (const auto& location : catalog.locations())
                    quads.push_back({campaign, creative, k, location});
    return AdmissibleSet(std::move(quads));
}

namespace {

FieldValue component_of(const Quad& q, int position) {
    switch (position) {
        case 1: return q.campaign;
        case 2: return q.creative;
        case 3: return static_cast<std::int64_t>(q.frame);
        case 4: return q.location;
    }
    throw std::invalid_argument("project: position must be in 1..4");
}

}  // namespace

std::set<ReducedTuple> project(const AdmissibleSet& set, const std::vector<TupleBinding>& bindings) {
    bool bound[5] = {false, false, false, false, false};
    for (const auto& b : bindings) {
        if (b.position < 1 || b.position > 4)
            throw std::invalid_argument("project: position must be in 1..4");
        if (bound[b.position]) throw std::invalid_argument("project: duplicate position");
        bound[b.position] = true;
        if (b.value) {
            bool want_int = (b.position == 3);
            bool is_int = std::holds_alternative<std::int64_t>(*b.value);
            if (want_int != is_int)
                throw std::invalid_argument("project: binding value type does not match position");
        }
    }

    std::set<ReducedTuple> out;
    for (const Quad& q : set.points()) {
        bool match = true;
        for (const auto& b : bindings) {
            if (b.value && component_of(q, b.position) != *b.value) {
                match = false;
                break;
            }
        }
        if (!match) continue;
        ReducedTuple t;
        for (int pos = 1; pos <= 4; ++pos)
            if (!bound[pos]) t.push_back(component_of(q, pos));
        out.insert(std::move(t));
    }
    return out;
}

std::vector<std::string> validate_catalog(const Catalog& catalog, const AdmissibleSet& set) {
    std::vector<std::string> violations;
    for (const Quad& q : set.points()) {
        std::string where = "(" + q.campaign + "," + q.creative + "," + std::to_string(q.frame) +
                            "," + q.location + ")";
        if (!catalog.has_campaign(q.campaign))
            violations.push_back(where + ": unknown campaign '" + q.campaign + "'");
        else if (!catalog.has_creative(q.campaign, q.creative))
            violations.push_back(where + ": creative '" + q.creative + "' not in campaign '" +
                                 q.campaign + "'");
        if (!catalog.has_location(q.location))
            violations.push_back(where + ": unknown location '" + q.location + "'");
        if (!catalog.has_frame(q.frame))
            violations.push_back(where + ": frame " + std::to_string(q.frame) + " out of range");
    }
    return violations;
}

Configuration::Configuration(const AdmissibleSet& admissible, std::map<Quad, double> values)
    : values_(std::move(values)) {
    for (const auto& [quad, x] : values_) {
        if (!admissible.contains(quad))
            throw std::invalid_argument("configuration: quad not admissible");
        if (!(x >= 0.0)) throw std::invalid_argument("configuration: negative impression value");
    }
}

double Configuration::at(const Quad& q) const {
    auto it = values_.find(q);
    return it == values_.end() ? 0.0 : it->second;
}

double Configuration::total() const {
    double t = 0.0;
    for (const auto& [quad, x] : values_) t += x;
    return t;
}

}  // namespace adopt
