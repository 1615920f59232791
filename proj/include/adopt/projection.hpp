#pragma once

#include <map>
#include <string>
#include <vector>

#include "adopt/history.hpp"

namespace adopt {

struct ProjectionParams {
    std::int64_t n_min = 50;          // impressions that count as "enough"
    double half_life_days = 7.0;      // recency weight exp(-age / half_life)
    bool similar_hour = true;         // similar time = same hour of day ...
    bool similar_dow = true;          // ... and same day of week
    double w_loc = 0.5;               // location-side weight in blended levels
    int lookback_days = 28;
    double prior_profit = 0.0;        // terminal fallback
    bool campaign_first = true;       // level-4 order: campaign then location
    double week1_weight = 0.6;        // supply weighted average
    double week2_weight = 0.4;
};

enum class LadderLevel {
    CreativeAtLocation = 1,   // same creative, same location, similar time
    LocationCreativeBlend = 2,  // location-wide x creative-anywhere blend
    SiblingBlend = 3,         // location-wide x sibling-creative blend
    CampaignOrLocation = 4,   // same campaign (or same location), any time
    Prior = 5,
};

std::string to_string(LadderLevel level);

struct ProfitEstimate {
    double value = 0.0;
    LadderLevel level = LadderLevel::Prior;
};

/// Hierarchical profit projection: walks the fallback ladder in order and
/// returns the first level that accumulates enough impressions, weighting
/// per-impression profit by recency.
ProfitEstimate project_profit(const HistoryLog& history, const Quad& quad,
                              const FrameClock& clock, const ProjectionParams& params);

struct SupplyEstimate {
    double value = 0.0;
    bool no_data = false;
};

/// Weighted average of the observations one and two weeks before the frame;
/// missing observations renormalize the weights, then fall back to the
/// same-hour mean over the lookback window.
SupplyEstimate project_supply_weighted(const HistoryLog& history, const LocationId& location,
                                       FrameIndex frame, const FrameClock& clock,
                                       const ProjectionParams& params);

struct FeatureSpec {
    bool intercept = true;
    bool hour_of_day = true;
    bool day_of_week = true;
    bool trend = true;

    int dimension() const;
};

/// Per-location ridge regression of supply on periodic calendar features.
struct ForecastModel {
    FeatureSpec features;
    std::map<LocationId, std::vector<double>> weights;
    std::map<LocationId, std::int64_t> reference_ts;  // trend origin
    std::map<LocationId, double> in_sample_mape;
    std::vector<LocationId> excluded;  // not enough observations

    bool trained(const LocationId& l) const { return weights.count(l) > 0; }
};

ForecastModel fit_supply_regressor(const HistoryLog& history, const FeatureSpec& spec = {});

/// Model prediction for a future frame, clamped below at zero. Throws
/// std::domain_error for locations the model was not trained on.
double predict_supply(const ForecastModel& model, const LocationId& location, FrameIndex frame,
                      const FrameClock& clock);

}  // namespace adopt
