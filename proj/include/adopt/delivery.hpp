#pragma once

#include <map>
#include <set>
#include <tuple>

#include "adopt/feasibility.hpp"
#include "adopt/history.hpp"
#include "adopt/instance.hpp"
#include "adopt/lp.hpp"
#include "adopt/projection.hpp"

namespace adopt {

/// Per (location, frame) delivery probabilities; the residual mass serves no
/// ad.
class DeliveryPlan {
public:
    using Cell = std::map<std::pair<CampaignId, CreativeId>, double>;

    void set(const LocationId& l, FrameIndex k, Cell probabilities);
    const std::map<std::pair<LocationId, FrameIndex>, Cell>& cells() const { return cells_; }
    const Cell* cell(const LocationId& l, FrameIndex k) const;
    double residual(const LocationId& l, FrameIndex k) const;

    /// Empty when every probability is in [0,1] and each cell sums to at
    /// most 1 + 1e-9.
    std::vector<std::string> violations() const;

private:
    std::map<std::pair<LocationId, FrameIndex>, Cell> cells_;
};

/// Admissible set plus the quads the caller flagged as new (learning phase).
struct Schedule {
    AdmissibleSet admissible;
    std::set<Quad> new_quads;
};

struct EngineConfig {
    int horizon = 24;              // frames kept before aggregation
    double gamma = 0.95;           // per-frame risk discount on the objective
    ProjectionParams projection;
    SolverSettings solver;
    ConstraintFlags flags;
    double mu_request = 0.0;       // requested lasting minimum per (campaign, frame)
    double lambda_request = 0.0;   // requested learning minimum per new quad
    double overflow_request = 0.95;  // requested share cap where alternatives exist
    double default_supply = 0.0;   // used when the projection reports no data
    bool use_regressor = false;    // supply projection via the fitted model
};

/// Mutable loop state: one owner, advanced frame by frame.
struct EngineState {
    FrameClock clock;
    FrameIndex current_frame = 1;
    std::map<CampaignId, double> initial_budget;   // D_i, may be +inf
    std::map<CampaignId, double> remaining_budget;
    HistoryLog history;
    std::map<std::tuple<CampaignId, CreativeId, LocationId>, std::int64_t> new_quad_impressions;
    EngineConfig config;
};

EngineState make_engine_state(const FrameClock& clock, std::map<CampaignId, double> budgets,
                              EngineConfig config);

/// Keeps frames current..current+H-1 and merges everything beyond into one
/// aggregate frame: supply and lasting minima add up, profits average with
/// supply weights, learning minima add up, share caps average with supply
/// weights.
Instance apply_horizon(const Instance& instance, int horizon);

/// Converts impression counts into per-cell delivery probabilities,
/// x / S clamped to [0,1]; zero supply gives an all-zero cell. Throws
/// InternalError when the counts exceed supply beyond tolerance.
DeliveryPlan to_probabilities(const Configuration& config,
                              const std::map<LocationFrameKey, double>& supply);

struct CycleDiagnostics {
    double objective = 0.0;             // undiscounted projected revenue of the solution
    double discounted_objective = 0.0;  // what the solver maximized
    int solver_iterations = 0;
    std::map<LadderLevel, int> ladder_histogram;
    int variables = 0;
    int rows = 0;
};

struct CycleResult {
    DeliveryPlan next_frame;  // cells of the current frame only
    DeliveryPlan full_plan;   // every frame of the solved window
    CycleDiagnostics diagnostics;
};

/// One pass of the optimization loop: project, build, aggregate, clamp,
/// solve, convert. Only the next frame of the returned plan is meant to be
/// applied.
CycleResult plan_cycle(const EngineState& state, const Schedule& schedule);

/// Realized outcomes of one frame. observed_slots counts every slot the
/// server saw per location; delivered maps (location, campaign, creative) to
/// impressions and profit.
struct FrameOutcomes {
    FrameIndex frame = 0;
    std::map<LocationId, std::int64_t> observed_slots;
    std::map<std::tuple<LocationId, CampaignId, CreativeId>, std::pair<std::int64_t, double>>
        delivered;
};

/// Appends the outcomes to the history (delivered rows plus one traffic row
/// per location for the unfilled slots), charges realized profit against the
/// remaining budgets (floored at zero) and advances the frame.
void advance(EngineState& state, const FrameOutcomes& realized);

}  // namespace adopt
