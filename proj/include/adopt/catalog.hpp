#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace adopt {

using CampaignId = std::string;
using CreativeId = std::string;
using LocationId = std::string;
using FrameIndex = int;  // contiguous, 1-based

/// One cell of the (campaign, creative) x frame x location grid.
struct Quad {
    CampaignId campaign;
    CreativeId creative;
    FrameIndex frame = 0;
    LocationId location;

    auto operator<=>(const Quad&) const = default;
};

struct QuadHash {
    std::size_t operator()(const Quad& q) const;
};

struct LocationFrameKey {
    LocationId location;
    FrameIndex frame = 0;
    auto operator<=>(const LocationFrameKey&) const = default;
};

struct CampaignFrameKey {
    CampaignId campaign;
    FrameIndex frame = 0;
    auto operator<=>(const CampaignFrameKey&) const = default;
};

/// Maps frame indices to wall-clock UTC intervals: frame k covers
/// [epoch + (k-1)*frame_seconds, epoch + k*frame_seconds).
struct FrameClock {
    std::int64_t epoch_utc = 0;        // seconds since Unix epoch
    std::int64_t frame_seconds = 3600;

    std::int64_t frame_start(FrameIndex k) const {
        return epoch_utc + static_cast<std::int64_t>(k - 1) * frame_seconds;
    }
    FrameIndex frame_of(std::int64_t ts) const;
};

/// Calendar helpers on UTC timestamps (no time zones anywhere).
int hour_of_day(std::int64_t ts);
int day_of_week(std::int64_t ts);  // 0 = Sunday .. 6 = Saturday

/// The static universe: campaigns, their creatives, locations and the frame
/// range. Immutable after construction; construction validates uniqueness.
class Catalog {
public:
    Catalog(std::map<CampaignId, std::string> campaigns,
            std::map<CampaignId, std::vector<CreativeId>> creatives,
            std::vector<LocationId> locations,
            int frame_count,
            FrameClock clock = {});

    const std::map<CampaignId, std::string>& campaigns() const { return campaigns_; }
    const std::map<CampaignId, std::vector<CreativeId>>& creatives() const { return creatives_; }
    const std::vector<LocationId>& locations() const { return locations_; }
    int frame_count() const { return frame_count_; }
    const FrameClock& clock() const { return clock_; }

    bool has_campaign(const CampaignId& c) const { return campaigns_.count(c) > 0; }
    bool has_creative(const CampaignId& c, const CreativeId& b) const;
    bool has_location(const LocationId& l) const;
    bool has_frame(FrameIndex k) const { return k >= 1 && k <= frame_count_; }

private:
    std::map<CampaignId, std::string> campaigns_;
    std::map<CampaignId, std::vector<CreativeId>> creatives_;
    std::vector<LocationId> locations_;
    int frame_count_ = 0;
    FrameClock clock_;
};

}  // namespace adopt
