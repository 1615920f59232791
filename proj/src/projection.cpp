#include "adopt/projection.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace adopt {

namespace {

constexpr std::int64_t kWeek = 7 * 86400;

struct Accumulator {
    double weighted_profit = 0.0;
    double weighted_impressions = 0.0;
    std::int64_t impressions = 0;

    bool enough(std::int64_t n_min) const { return impressions >= n_min; }
    double estimate() const { return weighted_profit / weighted_impressions; }
};

bool similar_time(std::int64_t ts, std::int64_t target, const ProjectionParams& params) {
    if (params.similar_hour && hour_of_day(ts) != hour_of_day(target)) return false;
    if (params.similar_dow && day_of_week(ts) != day_of_week(target)) return false;
    return true;
}

}  // namespace

std::string to_string(LadderLevel level) {
    switch (level) {
        case LadderLevel::CreativeAtLocation: return "1";
        case LadderLevel::LocationCreativeBlend: return "2";
        case LadderLevel::SiblingBlend: return "3";
        case LadderLevel::CampaignOrLocation: return "4";
        case LadderLevel::Prior: return "prior";
    }
    return "?";
}

namespace {

// Accumulates matching records nearest-in-time first, stopping once enough
// impressions are gathered. `filter` may reject records (e.g. sibling
// creatives only); `want_similar` restricts to the similar-time classes.
template <typename Filter>
Accumulator gather(const HistoryLog& history, const std::vector<int>& index, std::int64_t target,
                   bool want_similar, const ProjectionParams& params, Filter filter) {
    std::vector<std::pair<std::int64_t, int>> candidates;  // (|distance|, record)
    for (int idx : index) {
        const HistoryRecord& r = history.records()[idx];
        if (r.impressions <= 0) continue;
        if (want_similar && !similar_time(r.timestamp, target, params)) continue;
        if (!filter(r)) continue;
        candidates.emplace_back(std::llabs(target - r.timestamp), idx);
    }
    std::sort(candidates.begin(), candidates.end());
    Accumulator acc;
    const double half_life = params.half_life_days * 86400.0;
    for (const auto& [distance, idx] : candidates) {
        const HistoryRecord& r = history.records()[idx];
        double age = std::max<double>(0.0, static_cast<double>(target - r.timestamp));
        double w = std::exp(-age / half_life);
        acc.weighted_profit += w * r.profit;
        acc.weighted_impressions += w * static_cast<double>(r.impressions);
        acc.impressions += r.impressions;
        if (acc.enough(params.n_min)) break;
    }
    return acc;
}

const auto kAny = [](const HistoryRecord&) { return true; };

}  // namespace

ProfitEstimate project_profit(const HistoryLog& history, const Quad& quad, const FrameClock& clock,
                              const ProjectionParams& params) {
    const std::int64_t target = clock.frame_start(quad.frame);

    // 1: the exact creative at the exact location, at similar times.
    auto exact = gather(history, history.by_creative_location(quad.campaign, quad.creative, quad.location),
                        target, true, params, kAny);
    if (exact.enough(params.n_min))
        return {exact.estimate(), LadderLevel::CreativeAtLocation};

    // 2: blend location-wide (any creative) with creative-anywhere.
    auto location_side =
        gather(history, history.by_location(quad.location), target, true, params, kAny);
    auto creative_side = gather(history, history.by_creative(quad.campaign, quad.creative), target,
                                true, params, kAny);
    if (location_side.enough(params.n_min) && creative_side.enough(params.n_min)) {
        double blended = params.w_loc * location_side.estimate() +
                         (1.0 - params.w_loc) * creative_side.estimate();
        return {blended, LadderLevel::LocationCreativeBlend};
    }

    // 3: as 2, but the creative side comes from siblings of the campaign.
    auto sibling_side = gather(history, history.by_campaign(quad.campaign), target, true, params,
                               [&](const HistoryRecord& r) { return r.creative != quad.creative; });
    if (location_side.enough(params.n_min) && sibling_side.enough(params.n_min)) {
        double blended = params.w_loc * location_side.estimate() +
                         (1.0 - params.w_loc) * sibling_side.estimate();
        return {blended, LadderLevel::SiblingBlend};
    }

    // 4: same campaign only / same location only, any time.
    auto campaign_any = [&] {
        return gather(history, history.by_campaign(quad.campaign), target, false, params, kAny);
    };
    auto location_any = [&] {
        return gather(history, history.by_location(quad.location), target, false, params, kAny);
    };
    auto first = params.campaign_first ? campaign_any() : location_any();
    if (first.enough(params.n_min)) return {first.estimate(), LadderLevel::CampaignOrLocation};
    auto second = params.campaign_first ? location_any() : campaign_any();
    if (second.enough(params.n_min)) return {second.estimate(), LadderLevel::CampaignOrLocation};

    return {params.prior_profit, LadderLevel::Prior};
}

SupplyEstimate project_supply_weighted(const HistoryLog& history, const LocationId& location,
                                       FrameIndex frame, const FrameClock& clock,
                                       const ProjectionParams& params) {
    const std::int64_t target = clock.frame_start(frame);
    const auto& series = history.supply_series(location);

    double weights[2] = {params.week1_weight, params.week2_weight};
    double value = 0.0, weight_sum = 0.0;
    for (int a = 1; a <= 2; ++a) {
        auto it = series.find(target - a * kWeek);
        if (it == series.end()) continue;
        value += weights[a - 1] * it->second;
        weight_sum += weights[a - 1];
    }
    if (weight_sum > 0.0) return {value / weight_sum, false};

    // Same hour across the whole lookback window.
    double total = 0.0;
    int count = 0;
    const std::int64_t window_start = target - static_cast<std::int64_t>(params.lookback_days) * 86400;
    for (auto it = series.lower_bound(window_start); it != series.end() && it->first < target; ++it) {
        if (hour_of_day(it->first) != hour_of_day(target)) continue;
        total += it->second;
        ++count;
    }
    if (count > 0) return {total / count, false};
    return {0.0, true};
}

int FeatureSpec::dimension() const {
    return (intercept ? 1 : 0) + (hour_of_day ? 24 : 0) + (day_of_week ? 7 : 0) + (trend ? 1 : 0);
}

namespace {

std::vector<double> feature_vector(const FeatureSpec& spec, std::int64_t ts, std::int64_t ref) {
    std::vector<double> phi;
    phi.reserve(spec.dimension());
    if (spec.intercept) phi.push_back(1.0);
    if (spec.hour_of_day) {
        int h = hour_of_day(ts);
        for (int i = 0; i < 24; ++i) phi.push_back(i == h ? 1.0 : 0.0);
    }
    if (spec.day_of_week) {
        int d = day_of_week(ts);
        for (int i = 0; i < 7; ++i) phi.push_back(i == d ? 1.0 : 0.0);
    }
    if (spec.trend) phi.push_back(static_cast<double>(ts - ref) / kWeek);
    return phi;
}

}  // namespace

ForecastModel fit_supply_regressor(const HistoryLog& history, const FeatureSpec& spec) {
    ForecastModel model;
    model.features = spec;
    const int dim = spec.dimension();

    std::set<LocationId> locations;
    for (const HistoryRecord& r : history.records()) locations.insert(r.location);

    for (const LocationId& l : locations) {
        const auto& series = history.supply_series(l);
        if (static_cast<int>(series.size()) < 2 * dim) {
            model.excluded.push_back(l);
            continue;
        }
        const std::int64_t ref = series.begin()->first;

        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dim, dim);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
        for (const auto& [ts, supply] : series) {
            std::vector<double> phi = feature_vector(spec, ts, ref);
            Eigen::Map<const Eigen::VectorXd> x(phi.data(), dim);
            double y = supply;
            gram.noalias() += x * x.transpose();
            rhs.noalias() += y * x;
        }
        gram.diagonal().array() += 1e-6;  // ridge damping
        Eigen::VectorXd w = gram.ldlt().solve(rhs);

        double mape = 0.0;
        int counted = 0;
        for (const auto& [ts, supply] : series) {
            if (supply <= 0.0) continue;
            std::vector<double> phi = feature_vector(spec, ts, ref);
            Eigen::Map<const Eigen::VectorXd> x(phi.data(), dim);
            double pred = std::max(0.0, w.dot(x));
            mape += std::fabs(pred - supply) / supply;
            ++counted;
        }
        model.weights[l] = std::vector<double>(w.data(), w.data() + dim);
        model.reference_ts[l] = ref;
        model.in_sample_mape[l] = counted > 0 ? mape / counted : 0.0;
    }
    return model;
}

double predict_supply(const ForecastModel& model, const LocationId& location, FrameIndex frame,
                      const FrameClock& clock) {
    auto w = model.weights.find(location);
    if (w == model.weights.end())
        throw std::domain_error("predict_supply: model not trained for location '" + location + "'");
    std::vector<double> phi =
        feature_vector(model.features, clock.frame_start(frame), model.reference_ts.at(location));
    double y = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) y += phi[i] * w->second[i];
    return std::max(0.0, y);
}

}  // namespace adopt
