#include "adopt/catalog.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace adopt {

namespace {
void hash_combine(std::size_t& seed, std::size_t v) {
    seed ^= v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
}
}  // namespace

std::size_t QuadHash::operator()(const Quad& q) const {
    std::size_t h = std::hash<std::string>{}(q.campaign);
    hash_combine(h, std::hash<std::string>{}(q.creative));
    hash_combine(h, std::hash<int>{}(q.frame));
    hash_combine(h, std::hash<std::string>{}(q.location));
    return h;
}

FrameIndex FrameClock::frame_of(std::int64_t ts) const {
    std::int64_t delta = ts - epoch_utc;
    std::int64_t k = delta / frame_seconds;
    if (delta < 0 && delta % frame_seconds != 0) --k;
    return static_cast<FrameIndex>(k + 1);
}

int hour_of_day(std::int64_t ts) {
    std::int64_t sec = ts % 86400;
    if (sec < 0) sec += 86400;
    return static_cast<int>(sec / 3600);
}

int day_of_week(std::int64_t ts) {
    std::int64_t days = ts / 86400;
    if (ts % 86400 < 0) --days;
    int dow = static_cast<int>((days + 4) % 7);  // 1970-01-01 was a Thursday
    if (dow < 0) dow += 7;
    return dow;
}

Catalog::Catalog(std::map<CampaignId, std::string> campaigns,
                 std::map<CampaignId, std::vector<CreativeId>> creatives,
                 std::vector<LocationId> locations,
                 int frame_count,
                 FrameClock clock)
    : campaigns_(std::move(campaigns)),
      creatives_(std::move(creatives)),
      locations_(std::move(locations)),
      frame_count_(frame_count),
      clock_(clock) {
    if (frame_count_ < 1) throw std::invalid_argument("catalog: frame count must be >= 1");
    if (clock_.frame_seconds <= 0) throw std::invalid_argument("catalog: frame duration must be positive");
    for (const auto& [campaign, list] : creatives_) {
        if (!campaigns_.count(campaign))
            throw std::invalid_argument("catalog: creatives listed for unknown campaign '" + campaign + "'");
        std::set<CreativeId> seen;
        for (const auto& b : list)
            if (!seen.insert(b).second)
                throw std::invalid_argument("catalog: duplicate creative '" + b + "' in campaign '" + campaign + "'");
    }
    std::set<LocationId> seen_loc;
    for (const auto& l : locations_)
        if (!seen_loc.insert(l).second)
            throw std::invalid_argument("catalog: duplicate location '" + l + "'");
}

bool Catalog::has_creative(const CampaignId& c, const CreativeId& b) const {
    auto it = creatives_.find(c);
    if (it == creatives_.end()) return false;
    return std::find(it->second.begin(), it->second.end(), b) != it->second.end();
}

bool Catalog::has_location(const LocationId& l) const {
    return std::find(locations_.begin(), locations_.end(), l) != locations_.end();
}

}  // namespace adopt
