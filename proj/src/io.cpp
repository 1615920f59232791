#include "adopt/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "adopt/errors.hpp"

namespace adopt {

namespace {

// Days-from-civil (Howard Hinnant's algorithm); proleptic Gregorian.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::int64_t parse_int(const std::string& text, int line) {
    std::size_t used = 0;
    try {
        std::int64_t v = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ParseError("expected an integer, got '" + text + "'", line);
    }
}

double parse_double(const std::string& text, int line) {
    std::size_t used = 0;
    try {
        double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ParseError("expected a number, got '" + text + "'", line);
    }
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return in;
}

// Atomic text write: temp file in place, then rename.
void write_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
        out << content;
        if (!out.good()) throw std::runtime_error("write failed for '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot rename '" + tmp + "' to '" + path + "'");
}

std::string format_probability(double p) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", p);
    return buf;
}

std::string format_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

std::int64_t parse_iso8601_utc(const std::string& text) {
    int y, mo, d, h, mi, s;
    char tail;
    if (std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &y, &mo, &d, &h, &mi, &s, &tail) !=
            7 ||
        tail != 'Z' || text.size() != 20)
        throw ParseError("timestamp '" + text + "' is not ISO-8601 UTC (YYYY-MM-DDTHH:MM:SSZ)");
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59 || s < 0 ||
        s > 60)
        throw ParseError("timestamp '" + text + "' has out-of-range fields");
    return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
}

std::string format_iso8601_utc(std::int64_t ts) {
    std::int64_t days = ts / 86400;
    std::int64_t rem = ts % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", y, m, d,
                  static_cast<int>(rem / 3600), static_cast<int>((rem % 3600) / 60),
                  static_cast<int>(rem % 60));
    return buf;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::map<std::string, std::string> out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected 'key = value'", line_no);
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError("empty key", line_no);
        out[key] = value;
    }
    return out;
}

namespace {

std::string join_path(const std::string& base, const std::string& path) {
    if (base.empty() || path.empty() || path.front() == '/') return path;
    return base + "/" + path;
}

struct ConfigReader {
    const std::map<std::string, std::string>& values;

    std::string str(const std::string& key, const std::string& fallback = "") const {
        auto it = values.find(key);
        return it == values.end() ? fallback : it->second;
    }
    double number(const std::string& key, double fallback) const {
        auto it = values.find(key);
        if (it == values.end()) return fallback;
        if (it->second == "inf") return kUnboundedBudget;
        return parse_double(it->second, 0);
    }
    std::int64_t integer(const std::string& key, std::int64_t fallback) const {
        auto it = values.find(key);
        return it == values.end() ? fallback : parse_int(it->second, 0);
    }
    bool flag(const std::string& key, bool fallback) const {
        auto it = values.find(key);
        if (it == values.end()) return fallback;
        if (it->second == "1" || it->second == "true") return true;
        if (it->second == "0" || it->second == "false") return false;
        throw ParseError("boolean key '" + key + "' must be 0/1/true/false");
    }
};

}  // namespace

RunConfig run_config_from(const std::map<std::string, std::string>& values,
                          const std::string& base_dir) {
    ConfigReader cfg{values};
    RunConfig out;
    out.history_path = join_path(base_dir, cfg.str("history"));
    out.schedule_path = join_path(base_dir, cfg.str("schedule"));
    out.campaigns_path = join_path(base_dir, cfg.str("campaigns"));
    out.output_path = join_path(base_dir, cfg.str("output", "plan.csv"));
    if (values.count("epoch")) out.epoch_utc = parse_iso8601_utc(values.at("epoch"));
    out.frame_seconds = cfg.integer("frame_seconds", 3600);
    if (out.frame_seconds <= 0) throw ParseError("frame_seconds must be positive");
    out.frames = static_cast<int>(cfg.integer("frames", 0));
    out.current_frame = static_cast<FrameIndex>(cfg.integer("current_frame", 1));

    EngineConfig& engine = out.engine;
    engine.horizon = static_cast<int>(cfg.integer("horizon", 24));
    engine.gamma = cfg.number("gamma", 0.95);
    if (engine.gamma <= 0.0 || engine.gamma > 1.0) throw ParseError("gamma must be in (0, 1]");
    engine.flags.lasting = cfg.flag("lasting", false);
    engine.flags.overflow = cfg.flag("overflow", false);
    engine.flags.learning = cfg.flag("learning", false);
    engine.mu_request = cfg.number("mu_request", 0.0);
    engine.lambda_request = cfg.number("lambda_request", 0.0);
    engine.overflow_request = cfg.number("overflow_request", 0.95);
    engine.default_supply = cfg.number("default_supply", 0.0);
    engine.use_regressor = cfg.flag("use_regressor", false);

    ProjectionParams& proj = engine.projection;
    proj.n_min = cfg.integer("n_min", 50);
    if (proj.n_min < 1) throw ParseError("n_min must be >= 1");
    proj.half_life_days = cfg.number("half_life_days", 7.0);
    proj.similar_hour = cfg.flag("similar_hour", true);
    proj.similar_dow = cfg.flag("similar_dow", true);
    proj.w_loc = cfg.number("w_loc", 0.5);
    if (proj.w_loc < 0.0 || proj.w_loc > 1.0) throw ParseError("w_loc must be in [0, 1]");
    proj.lookback_days = static_cast<int>(cfg.integer("lookback_days", 28));
    proj.prior_profit = cfg.number("prior_profit", 0.0);
    proj.campaign_first = cfg.flag("campaign_first", true);
    proj.week1_weight = cfg.number("week1_weight", 0.6);
    proj.week2_weight = cfg.number("week2_weight", 0.4);

    SolverSettings& solver = engine.solver;
    solver.feas_tol = cfg.number("feas_tol", 1e-8);
    solver.opt_tol = cfg.number("opt_tol", 1e-9);
    solver.max_iterations = static_cast<int>(cfg.integer("max_iterations", 0));
    return out;
}

HistoryLog load_history(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty history file '" + path + "'");
    ++line_no;
    if (trim(line) != "timestamp_utc,location_id,campaign_id,creative_id,impressions,profit")
        throw ParseError("unexpected history header", line_no);

    std::vector<HistoryRecord> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_csv(line);
        if (fields.size() != 6) throw ParseError("expected 6 fields", line_no);
        HistoryRecord r;
        try {
            r.timestamp = parse_iso8601_utc(trim(fields[0]));
        } catch (const ParseError& e) {
            throw ParseError(e.what(), line_no);
        }
        r.location = trim(fields[1]);
        r.campaign = trim(fields[2]);
        r.creative = trim(fields[3]);
        if (r.location.empty()) throw ParseError("empty location id", line_no);
        if (r.campaign.empty() != r.creative.empty())
            throw ParseError("campaign and creative ids must be both set or both empty", line_no);
        r.impressions = parse_int(trim(fields[4]), line_no);
        if (r.impressions < 0) throw ParseError("impressions must be >= 0", line_no);
        r.profit = parse_double(trim(fields[5]), line_no);
        if (!(r.profit >= 0.0) || !std::isfinite(r.profit))
            throw ParseError("profit must be finite and >= 0", line_no);
        rows.push_back(std::move(r));
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const HistoryRecord& a, const HistoryRecord& b) {
                         return a.timestamp < b.timestamp;
                     });
    HistoryLog log;
    for (auto& r : rows) log.append(std::move(r));
    return log;
}

void emit_history(const HistoryLog& history, const std::string& path) {
    std::ostringstream out;
    out << "timestamp_utc,location_id,campaign_id,creative_id,impressions,profit\n";
    for (const HistoryRecord& r : history.records()) {
        out << format_iso8601_utc(r.timestamp) << ',' << r.location << ',' << r.campaign << ','
            << r.creative << ',' << r.impressions << ',' << format_number(r.profit) << '\n';
    }
    write_atomic(path, out.str());
}

std::map<CampaignId, double> load_campaigns(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty campaigns file '" + path + "'");
    ++line_no;
    if (trim(line) != "campaign_id,budget") throw ParseError("unexpected campaigns header", line_no);

    std::map<CampaignId, double> out;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_csv(line);
        if (fields.size() != 2) throw ParseError("expected 2 fields", line_no);
        CampaignId id = trim(fields[0]);
        if (id.empty()) throw ParseError("empty campaign id", line_no);
        if (out.count(id)) throw ParseError("duplicate campaign '" + id + "'", line_no);
        std::string budget = trim(fields[1]);
        double value;
        if (budget == "inf") {
            value = kUnboundedBudget;
        } else {
            value = parse_double(budget, line_no);
            if (!(value > 0.0)) throw ParseError("budget must be > 0 or 'inf'", line_no);
        }
        out[id] = value;
    }
    return out;
}

Schedule load_schedule(const std::string& path, const Catalog& catalog) {
    std::ifstream in = open_or_throw(path);
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty schedule file '" + path + "'");
    ++line_no;
    if (trim(line) != "campaign_id,creative_id,location_id,frame_start,frame_end,new_flag")
        throw ParseError("unexpected schedule header", line_no);

    std::vector<Quad> quads;
    std::set<Quad> new_quads;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_csv(line);
        if (fields.size() != 6) throw ParseError("expected 6 fields", line_no);
        CampaignId campaign = trim(fields[0]);
        CreativeId creative = trim(fields[1]);
        LocationId location = trim(fields[2]);
        if (!catalog.has_campaign(campaign))
            throw ParseError("unknown campaign '" + campaign + "'", line_no);
        if (!catalog.has_creative(campaign, creative))
            throw ParseError("unknown creative '" + creative + "' in campaign '" + campaign + "'",
                             line_no);
        if (!catalog.has_location(location))
            throw ParseError("unknown location '" + location + "'", line_no);
        auto start = parse_int(trim(fields[3]), line_no);
        auto end = parse_int(trim(fields[4]), line_no);
        if (start > end) throw ParseError("frame_start > frame_end", line_no);
        if (start < 1 || end > catalog.frame_count())
            throw ParseError("frame range outside the catalog", line_no);
        auto flag = parse_int(trim(fields[5]), line_no);
        if (flag != 0 && flag != 1) throw ParseError("new_flag must be 0 or 1", line_no);
        for (auto k = start; k <= end; ++k) {
            Quad q{campaign, creative, static_cast<FrameIndex>(k), location};
            quads.push_back(q);
            if (flag == 1) new_quads.insert(q);
        }
    }
    Schedule schedule;
    schedule.admissible = AdmissibleSet(std::move(quads));
    schedule.new_quads = std::move(new_quads);
    return schedule;
}

void emit_schedule(const Schedule& schedule, const std::string& path) {
    std::ostringstream out;
    out << "campaign_id,creative_id,location_id,frame_start,frame_end,new_flag\n";
    for (const Quad& q : schedule.admissible.points()) {
        out << q.campaign << ',' << q.creative << ',' << q.location << ',' << q.frame << ','
            << q.frame << ',' << (schedule.new_quads.count(q) ? 1 : 0) << '\n';
    }
    write_atomic(path, out.str());
}

Catalog catalog_from_files(const std::string& schedule_path,
                           const std::map<CampaignId, double>& budgets, FrameClock clock,
                           int frames_override) {
    std::ifstream in = open_or_throw(schedule_path);
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty schedule file '" + schedule_path + "'");
    ++line_no;
    if (trim(line) != "campaign_id,creative_id,location_id,frame_start,frame_end,new_flag")
        throw ParseError("unexpected schedule header", line_no);

    std::map<CampaignId, std::string> campaigns;
    for (const auto& [id, budget] : budgets) campaigns[id] = id;
    std::map<CampaignId, std::set<CreativeId>> creatives;
    std::set<LocationId> locations;
    int max_frame = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_csv(line);
        if (fields.size() != 6) throw ParseError("expected 6 fields", line_no);
        CampaignId campaign = trim(fields[0]);
        if (!campaigns.count(campaign))
            throw ParseError("schedule references campaign '" + campaign +
                                 "' missing from the campaigns file",
                             line_no);
        creatives[campaign].insert(trim(fields[1]));
        locations.insert(trim(fields[2]));
        max_frame = std::max(max_frame, static_cast<int>(parse_int(trim(fields[4]), line_no)));
    }
    std::map<CampaignId, std::vector<CreativeId>> creative_lists;
    for (const auto& [campaign, set] : creatives)
        creative_lists[campaign] = {set.begin(), set.end()};
    return Catalog(std::move(campaigns), std::move(creative_lists),
                   {locations.begin(), locations.end()}, std::max(max_frame, frames_override),
                   clock);
}

void emit_plan(const DeliveryPlan& plan, const std::string& path) {
    struct Row {
        FrameIndex frame;
        LocationId location;
        CampaignId campaign;
        CreativeId creative;
        double probability;
    };
    std::vector<Row> rows;
    for (const auto& [key, cell] : plan.cells())
        for (const auto& [pair, p] : cell)
            rows.push_back({key.second, key.first, pair.first, pair.second, p});
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
        return std::tie(a.frame, a.location, a.campaign, a.creative) <
               std::tie(b.frame, b.location, b.campaign, b.creative);
    });
    std::ostringstream out;
    out << "frame,location_id,campaign_id,creative_id,probability\n";
    for (const Row& r : rows)
        out << r.frame << ',' << r.location << ',' << r.campaign << ',' << r.creative << ','
            << format_probability(r.probability) << '\n';
    write_atomic(path, out.str());
}

void emit_run_report(const RunReport& report, const std::string& path) {
    std::ostringstream out;
    out << "key,value\n";
    out << "policy," << report.policy << '\n';
    out << "seed," << report.seed << '\n';
    out << "revenue," << format_number(report.revenue) << '\n';
    out << "impressions," << report.impressions << '\n';
    out << "supply_violations," << report.supply_violations << '\n';
    out << "plan_violations," << report.plan_violations << '\n';
    out << "aborted," << (report.aborted ? 1 : 0) << '\n';
    for (const auto& [campaign, pair] : report.spend_vs_budget)
        out << "spend." << campaign << ',' << format_number(pair.first) << '\n';
    for (const auto& [campaign, pair] : report.spend_vs_budget)
        out << "budget." << campaign << ',' << format_number(pair.second) << '\n';
    for (std::size_t i = 0; i < report.frame_revenue.size(); ++i)
        out << "frame_revenue." << (i + 1) << ',' << format_number(report.frame_revenue[i]) << '\n';
    write_atomic(path, out.str());
}

void emit_comparison(const Comparison& comparison, const std::string& path) {
    std::ostringstream out;
    out << "policy,mean_revenue,std_revenue,seeds\n";
    for (const auto& row : comparison.rows) {
        out << row.policy << ',' << format_number(row.mean_revenue) << ','
            << format_number(row.std_revenue) << ',' << row.revenue_per_seed.size() << '\n';
    }
    out << "uplift_abs," << format_number(comparison.uplift_abs) << ",,\n";
    out << "uplift_pct," << format_number(comparison.uplift_pct) << ",,\n";
    write_atomic(path, out.str());
}

WorldConfig load_world_config(const std::string& path) {
    auto values = parse_config_file(path);
    ConfigReader cfg{values};
    std::string base_dir;
    auto slash = path.find_last_of('/');
    if (slash != std::string::npos) base_dir = path.substr(0, slash);

    FrameClock clock;
    if (values.count("epoch")) clock.epoch_utc = parse_iso8601_utc(values.at("epoch"));
    clock.frame_seconds = cfg.integer("frame_seconds", 3600);

    auto budgets = load_campaigns(join_path(base_dir, cfg.str("campaigns")));
    int frames = static_cast<int>(cfg.integer("frames", 0));
    Catalog catalog =
        catalog_from_files(join_path(base_dir, cfg.str("schedule")), budgets, clock, frames);
    Schedule schedule = load_schedule(join_path(base_dir, cfg.str("schedule")), catalog);

    WorldConfig world;
    world.catalog = catalog;
    world.schedule = std::move(schedule);
    world.budgets = std::move(budgets);
    world.sigma = cfg.number("sigma", 0.0);
    world.supply_trend = cfg.number("supply_trend", 0.0);
    world.profit_drift = cfg.number("profit_drift", 0.0);
    world.observability = cfg.number("observability", 1.0);
    world.seed = static_cast<std::uint64_t>(cfg.integer("seed", 1));

    for (const LocationId& l : catalog.locations()) {
        SupplyProcess process;
        process.base = cfg.number("supply." + l + ".base", 0.0);
        for (int h = 0; h < 24; ++h)
            process.hour_mult[h] = cfg.number("supply." + l + ".hour." + std::to_string(h), 1.0);
        for (int d = 0; d < 7; ++d)
            process.dow_mult[d] = cfg.number("supply." + l + ".dow." + std::to_string(d), 1.0);
        world.supply[l] = process;
    }
    for (const auto& [campaign, list] : catalog.creatives())
        for (const CreativeId& creative : list)
            for (const LocationId& l : catalog.locations()) {
                std::string key = "profit." + campaign + "." + creative + "." + l;
                if (values.count(key))
                    world.profit[{campaign, creative, l}] = cfg.number(key, 0.0);
            }
    return world;
}

}  // namespace adopt
