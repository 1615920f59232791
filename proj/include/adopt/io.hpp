#pragma once

#include <map>
#include <string>

#include "adopt/delivery.hpp"
#include "adopt/history.hpp"
#include "adopt/simulator.hpp"

namespace adopt {

/// Strict ISO-8601 UTC ("YYYY-MM-DDTHH:MM:SSZ"); anything else is rejected.
std::int64_t parse_iso8601_utc(const std::string& text);
std::string format_iso8601_utc(std::int64_t ts);

/// Line-based `key = value` file; '#' starts a comment.
std::map<std::string, std::string> parse_config_file(const std::string& path);

/// Everything one optimization run needs, resolved from a config file plus
/// command-line overrides.
struct RunConfig {
    std::string history_path;
    std::string schedule_path;
    std::string campaigns_path;
    std::string output_path = "plan.csv";
    std::int64_t epoch_utc = 0;
    std::int64_t frame_seconds = 3600;
    int frames = 0;  // 0 = derive from the schedule
    FrameIndex current_frame = 1;
    EngineConfig engine;
};

RunConfig run_config_from(const std::map<std::string, std::string>& values,
                          const std::string& base_dir = "");

/// history.csv: timestamp_utc,location_id,campaign_id,creative_id,impressions,profit.
/// Rows are sorted by timestamp on load; malformed rows raise ParseError with
/// their line number. Empty campaign and creative ids mark traffic rows.
HistoryLog load_history(const std::string& path);
void emit_history(const HistoryLog& history, const std::string& path);

/// campaigns.csv: campaign_id,budget ("inf" for unbounded).
std::map<CampaignId, double> load_campaigns(const std::string& path);

/// schedule.csv: campaign_id,creative_id,location_id,frame_start,frame_end,new_flag.
/// Rows expand to one quad per frame; overlapping rows union.
Schedule load_schedule(const std::string& path, const Catalog& catalog);
void emit_schedule(const Schedule& schedule, const std::string& path);

/// Builds the catalog implied by the campaign and schedule files: creatives
/// and locations are discovered from the schedule, the frame count is the
/// largest frame mentioned (or the override when larger).
Catalog catalog_from_files(const std::string& schedule_path,
                           const std::map<CampaignId, double>& budgets, FrameClock clock,
                           int frames_override = 0);

/// plan.csv: frame,location_id,campaign_id,creative_id,probability with six
/// decimal places, sorted by (frame, location, campaign, creative).
/// Writes are atomic and byte-stable for identical plans.
void emit_plan(const DeliveryPlan& plan, const std::string& path);

void emit_run_report(const RunReport& report, const std::string& path);
void emit_comparison(const Comparison& comparison, const std::string& path);

/// World description for the simulator: key = value text referencing the
/// schedule and campaign files; see the README for the key list.
WorldConfig load_world_config(const std::string& path);

}  // namespace adopt
