#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <unordered_set>
#include <variant>
#include <vector>

#include "adopt/catalog.hpp"

namespace adopt {

/// A component of a (campaign, creative, frame, location) tuple: frames are
/// integers, everything else is an opaque string id.
using FieldValue = std::variant<std::int64_t, std::string>;
using ReducedTuple = std::vector<FieldValue>;

/// One position binding for project(): a concrete value filters, an empty
/// optional is the wildcard that removes the component unconditionally.
struct TupleBinding {
    int position = 0;  // 1 = campaign, 2 = creative, 3 = frame, 4 = location
    std::optional<FieldValue> value;
};

/// The set of grid points permitted by the campaign schedules. Immutable;
/// keeps secondary indexes so the cardinalities used by the feasibility
/// bounds are O(1) lookups.
class AdmissibleSet {
public:
    AdmissibleSet() = default;
    explicit AdmissibleSet(std::vector<Quad> quads);

    const std::vector<Quad>& points() const { return points_; }
    bool contains(const Quad& q) const { return lookup_.count(q) > 0; }
    bool empty() const { return points_.empty(); }
    std::size_t size() const { return points_.size(); }

    // Index lookups, named for the set projections they answer.
    /// Number of distinct frames in which the campaign has admissible points.
    int frames_of_campaign(const CampaignId& c) const;
    /// Number of admissible points of the campaign.
    int points_of_campaign(const CampaignId& c) const;
    /// Locations with an admissible point for the campaign at the frame.
    const std::set<LocationId>& locations_of(const CampaignId& c, FrameIndex k) const;
    /// Distinct campaigns with an admissible point at (frame, location).
    int campaigns_at(FrameIndex k, const LocationId& l) const;
    /// Distinct (campaign, creative) pairs admissible at (frame, location).
    int pairs_at(FrameIndex k, const LocationId& l) const;
    const std::vector<std::pair<CampaignId, CreativeId>>& pair_list_at(FrameIndex k,
                                                                       const LocationId& l) const;
    /// All (frame, location) cells with at least one admissible point.
    const std::set<LocationFrameKey>& cells() const { return cells_; }
    const std::set<FrameIndex>& frames() const { return frames_; }
    FrameIndex max_frame() const { return frames_.empty() ? 0 : *frames_.rbegin(); }

private:
    std::vector<Quad> points_;  // sorted, unique
    std::unordered_set<Quad, QuadHash> lookup_;
    std::map<CampaignId, std::set<FrameIndex>> campaign_frames_;
    std::map<CampaignId, int> campaign_points_;
    std::map<CampaignFrameKey, std::set<LocationId>> campaign_frame_locations_;
    std::map<LocationFrameKey, std::set<CampaignId>> cell_campaigns_;
    std::map<LocationFrameKey, std::vector<std::pair<CampaignId, CreativeId>>> cell_pairs_;
    std::set<LocationFrameKey> cells_;
    std::set<FrameIndex> frames_;
};

/// Every (campaign, creative) pair x frame x location of the catalog.
AdmissibleSet full_grid(const Catalog& catalog);

/// Tuple-set projection with concrete and wildcard bindings: a concrete
/// binding keeps only matching quads before removing the component, a
/// wildcard removes the component from every quad. Bound positions must be
/// distinct and in 1..4; results are deduplicated.
std::set<ReducedTuple> project(const AdmissibleSet& set, const std::vector<TupleBinding>& bindings);

/// Lists every admissible quad that references an id or frame unknown to the
/// catalog. Empty result means the pair is consistent.
std::vector<std::string> validate_catalog(const Catalog& catalog, const AdmissibleSet& set);

/// Impression counts per admissible point (the decision variables, real
/// relaxed). Construction rejects keys outside the admissible set and
/// negative values.
class Configuration {
public:
    Configuration() = default;
    Configuration(const AdmissibleSet& admissible, std::map<Quad, double> values);

    const std::map<Quad, double>& values() const { return values_; }
    double at(const Quad& q) const;
    double total() const;

private:
    std::map<Quad, double> values_;
};

}  // namespace adopt
