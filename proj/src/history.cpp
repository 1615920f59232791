#include "adopt/history.hpp"

#include <stdexcept>

namespace adopt {

void HistoryLog::append(HistoryRecord r) {
    if (r.impressions < 0) throw std::invalid_argument("history: impressions must be >= 0");
    if (r.profit < 0.0) throw std::invalid_argument("history: profit must be >= 0");
    if (r.campaign.empty() != r.creative.empty())
        throw std::invalid_argument("history: campaign and creative must be both set or both empty");
    auto stream = std::make_tuple(r.location, r.campaign, r.creative);
    auto last = last_ts_.find(stream);
    if (last != last_ts_.end() && r.timestamp < last->second)
        throw std::invalid_argument("history: timestamps must be non-decreasing per stream");
    last_ts_[stream] = r.timestamp;

    int idx = static_cast<int>(records_.size());
    supply_[r.location][r.timestamp] += static_cast<double>(r.impressions);
    if (!r.is_traffic()) {
        by_cbl_[{r.campaign, r.creative, r.location}].push_back(idx);
        by_cb_[{r.campaign, r.creative}].push_back(idx);
        by_c_[r.campaign].push_back(idx);
        by_l_[r.location].push_back(idx);
    }
    records_.push_back(std::move(r));
}

namespace {
const std::vector<int> kNoRecords;
const std::map<std::int64_t, double> kNoSeries;
}  // namespace

const std::vector<int>& HistoryLog::by_creative_location(const CampaignId& c, const CreativeId& b,
                                                         const LocationId& l) const {
    auto it = by_cbl_.find({c, b, l});
    return it == by_cbl_.end() ? kNoRecords : it->second;
}

const std::vector<int>& HistoryLog::by_creative(const CampaignId& c, const CreativeId& b) const {
    auto it = by_cb_.find({c, b});
    return it == by_cb_.end() ? kNoRecords : it->second;
}

const std::vector<int>& HistoryLog::by_campaign(const CampaignId& c) const {
    auto it = by_c_.find(c);
    return it == by_c_.end() ? kNoRecords : it->second;
}

const std::vector<int>& HistoryLog::by_location(const LocationId& l) const {
    auto it = by_l_.find(l);
    return it == by_l_.end() ? kNoRecords : it->second;
}

const std::map<std::int64_t, double>& HistoryLog::supply_series(const LocationId& l) const {
    auto it = supply_.find(l);
    return it == supply_.end() ? kNoSeries : it->second;
}

}  // namespace adopt
