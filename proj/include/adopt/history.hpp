#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "adopt/catalog.hpp"

namespace adopt {

/// One pre-aggregated log row. Rows with empty campaign and creative ids are
/// traffic rows: they record observed slots that no creative filled, so that
/// per-(location, frame) totals add up to the traffic seen by the server.
struct HistoryRecord {
    std::int64_t timestamp = 0;  // frame start, UTC seconds
    LocationId location;
    CampaignId campaign;
    CreativeId creative;
    std::int64_t impressions = 0;
    double profit = 0.0;

    bool is_traffic() const { return campaign.empty() && creative.empty(); }
};

/// Append-only log with the secondary indexes the projection ladder needs.
/// Appends must be non-decreasing in time within each (location, campaign,
/// creative) stream; readers see immutable snapshots.
class HistoryLog {
public:
    void append(HistoryRecord r);

    const std::vector<HistoryRecord>& records() const { return records_; }
    bool empty() const { return records_.empty(); }
    std::size_t size() const { return records_.size(); }

    // Index vectors hold record positions in timestamp order. Traffic rows
    // are only visible through the supply series.
    const std::vector<int>& by_creative_location(const CampaignId& c, const CreativeId& b,
                                                 const LocationId& l) const;
    const std::vector<int>& by_creative(const CampaignId& c, const CreativeId& b) const;
    const std::vector<int>& by_campaign(const CampaignId& c) const;
    const std::vector<int>& by_location(const LocationId& l) const;

    /// Total observed impressions (delivered + unfilled) per timestamp.
    const std::map<std::int64_t, double>& supply_series(const LocationId& l) const;

private:
    std::vector<HistoryRecord> records_;
    std::map<std::tuple<CampaignId, CreativeId, LocationId>, std::vector<int>> by_cbl_;
    std::map<std::pair<CampaignId, CreativeId>, std::vector<int>> by_cb_;
    std::map<CampaignId, std::vector<int>> by_c_;
    std::map<LocationId, std::vector<int>> by_l_;
    std::map<LocationId, std::map<std::int64_t, double>> supply_;
    std::map<std::tuple<LocationId, CampaignId, CreativeId>, std::int64_t> last_ts_;
};

}  // namespace adopt
