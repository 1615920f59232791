#include <cstdio>
#include <fstream>

#include "adopt/errors.hpp"
#include "adopt/io.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace adopt;

namespace {

const std::string kFixtures = ADOPT_FIXTURE_DIR;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) : path("io_test_" + name) {}
    ~TempFile() { std::remove(path.c_str()); }
    void write(const std::string& content) {
        std::ofstream out(path, std::ios::trunc);
        out << content;
    }
};

}  // namespace

TEST_CASE("iso-8601 timestamps") {
    CHECK(parse_iso8601_utc("1970-01-01T00:00:00Z") == 0);
    CHECK(parse_iso8601_utc("2026-03-02T00:00:00Z") == 1772409600);
    CHECK(format_iso8601_utc(1772409600) == "2026-03-02T00:00:00Z");
    for (std::int64_t ts : {0L, 1772409600L, 1234567890L, 86399L})
        CHECK(parse_iso8601_utc(format_iso8601_utc(ts)) == ts);

    CHECK_THROWS_AS(parse_iso8601_utc("2026-03-02T00:00:00+01:00"), ParseError);
    CHECK_THROWS_AS(parse_iso8601_utc("2026-03-02 00:00:00Z"), ParseError);
    CHECK_THROWS_AS(parse_iso8601_utc("2026-13-02T00:00:00Z"), ParseError);
    CHECK_THROWS_AS(parse_iso8601_utc("garbage"), ParseError);
}

TEST_CASE("load_history: happy path and validation") {
    HistoryLog log = load_history(kFixtures + "/t1/history.csv");
    CHECK(log.size() == 8);
    CHECK(log.supply_series("L1").at(parse_iso8601_utc("2026-02-23T00:00:00Z")) ==
          doctest::Approx(5.0));

    TempFile bad("neg_impressions.csv");
    bad.write(
        "timestamp_utc,location_id,campaign_id,creative_id,impressions,profit\n"
        "2026-01-01T00:00:00Z,L1,1,1,-1,0\n");
    try {
        load_history(bad.path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }

    TempFile header_only("empty.csv");
    header_only.write("timestamp_utc,location_id,campaign_id,creative_id,impressions,profit\n");
    CHECK(load_history(header_only.path).empty());

    TempFile unsorted("unsorted.csv");
    unsorted.write(
        "timestamp_utc,location_id,campaign_id,creative_id,impressions,profit\n"
        "2026-01-02T00:00:00Z,L1,1,1,5,1\n"
        "2026-01-01T00:00:00Z,L1,1,1,5,1\n");
    HistoryLog sorted = load_history(unsorted.path);
    CHECK(sorted.records()[0].timestamp < sorted.records()[1].timestamp);

    TempFile half_traffic("half.csv");
    half_traffic.write(
        "timestamp_utc,location_id,campaign_id,creative_id,impressions,profit\n"
        "2026-01-01T00:00:00Z,L1,1,,5,1\n");
    CHECK_THROWS_AS(load_history(half_traffic.path), ParseError);
}

TEST_CASE("load_campaigns") {
    auto budgets = load_campaigns(kFixtures + "/t1/campaigns.csv");
    CHECK(budgets.at("1") == doctest::Approx(10.0));
    CHECK(!std::isfinite(budgets.at("2")));

    TempFile bad("campaigns.csv");
    bad.write("campaign_id,budget\n1,0\n");
    CHECK_THROWS_AS(load_campaigns(bad.path), ParseError);
    bad.write("campaign_id,budget\n1,5\n1,6\n");
    CHECK_THROWS_AS(load_campaigns(bad.path), ParseError);
}

TEST_CASE("load_schedule expands, unions and validates") {
    auto budgets = load_campaigns(kFixtures + "/t1/campaigns.csv");
    Catalog catalog = catalog_from_files(kFixtures + "/t1/schedule.csv", budgets, {}, 0);
    Schedule schedule = load_schedule(kFixtures + "/t1/schedule.csv", catalog);
    CHECK(schedule.admissible.size() == 4);  // two rows, two frames each
    CHECK(schedule.new_quads.empty());

    TempFile overlapping("sched.csv");
    overlapping.write(
        "campaign_id,creative_id,location_id,frame_start,frame_end,new_flag\n"
        "1,1,L1,1,2,0\n"
        "1,1,L1,2,2,1\n");
    Schedule merged = load_schedule(overlapping.path, catalog);
    CHECK(merged.admissible.size() == 2);  // union, no duplicates
    CHECK(merged.new_quads.count({"1", "1", 2, "L1"}) == 1);

    overlapping.write(
        "campaign_id,creative_id,location_id,frame_start,frame_end,new_flag\n"
        "1,1,L1,2,1,0\n");
    CHECK_THROWS_AS(load_schedule(overlapping.path, catalog), ParseError);

    overlapping.write(
        "campaign_id,creative_id,location_id,frame_start,frame_end,new_flag\n"
        "9,1,L1,1,1,0\n");
    CHECK_THROWS_AS(load_schedule(overlapping.path, catalog), ParseError);
}

TEST_CASE("emit_plan formatting, ordering and determinism") {
    DeliveryPlan plan;
    plan.set("L1", 1, {{{"1", "1"}, 1.0}, {{"2", "1"}, 0.0}});
    TempFile out("plan.csv");
    emit_plan(plan, out.path);
    CHECK(slurp(out.path) == slurp(kFixtures + "/t1/golden_plan.csv"));

    emit_plan(plan, out.path);
    CHECK(slurp(out.path) == slurp(kFixtures + "/t1/golden_plan.csv"));  // byte-identical

    DeliveryPlan empty;
    emit_plan(empty, out.path);
    CHECK(slurp(out.path) == "frame,location_id,campaign_id,creative_id,probability\n");
}

TEST_CASE("emit_plan rounds to six decimals") {
    DeliveryPlan plan;
    plan.set("L1", 1, {{{"1", "1"}, 1.0 / 3.0}});
    TempFile out("plan_round.csv");
    emit_plan(plan, out.path);
    CHECK(slurp(out.path).find("0.333333") != std::string::npos);
}

TEST_CASE("history and schedule round-trip through their CSVs") {
    HistoryLog history = load_history(kFixtures + "/t1/history.csv");
    TempFile out("roundtrip_history.csv");
    emit_history(history, out.path);
    HistoryLog again = load_history(out.path);
    REQUIRE(again.size() == history.size());
    for (std::size_t i = 0; i < history.size(); ++i) {
        const HistoryRecord& a = history.records()[i];
        const HistoryRecord& b = again.records()[i];
        CHECK(a.timestamp == b.timestamp);
        CHECK(a.location == b.location);
        CHECK(a.campaign == b.campaign);
        CHECK(a.creative == b.creative);
        CHECK(a.impressions == b.impressions);
        CHECK(a.profit == b.profit);
    }

    auto budgets = load_campaigns(kFixtures + "/t1/campaigns.csv");
    Catalog catalog = catalog_from_files(kFixtures + "/t1/schedule.csv", budgets, {}, 0);
    Schedule schedule = load_schedule(kFixtures + "/t1/schedule.csv", catalog);
    TempFile sched_out("roundtrip_schedule.csv");
    emit_schedule(schedule, sched_out.path);
    Schedule again_sched = load_schedule(sched_out.path, catalog);
    CHECK(again_sched.admissible.points() == schedule.admissible.points());
    CHECK(again_sched.new_quads == schedule.new_quads);
}

TEST_CASE("config files parse and resolve") {
    TempFile cfg("run.cfg");
    cfg.write(
        "# comment\n"
        "history = h.csv\n"
        "gamma = 0.9\n"
        "lasting = 1\n"
        "n_min = 7\n");
    auto values = parse_config_file(cfg.path);
    RunConfig config = run_config_from(values, "/base");
    CHECK(config.history_path == "/base/h.csv");
    CHECK(config.engine.gamma == doctest::Approx(0.9));
    CHECK(config.engine.flags.lasting);
    CHECK(config.engine.projection.n_min == 7);
    CHECK(config.engine.projection.w_loc == doctest::Approx(0.5));  // default

    cfg.write("gamma = 1.5\n");
    CHECK_THROWS_AS(run_config_from(parse_config_file(cfg.path), ""), ParseError);
    cfg.write("this line has no equals\n");
    CHECK_THROWS_AS(parse_config_file(cfg.path), ParseError);
}

TEST_CASE("run config drives a full in-memory plan cycle") {
    auto values = parse_config_file(kFixtures + "/t1/adopt.cfg");
    RunConfig config = run_config_from(values, kFixtures + "/t1");
    auto budgets = load_campaigns(config.campaigns_path);
    FrameClock clock{config.epoch_utc, config.frame_seconds};
    Catalog catalog = catalog_from_files(config.schedule_path, budgets, clock, config.frames);
    Schedule schedule = load_schedule(config.schedule_path, catalog);
    HistoryLog history = load_history(config.history_path);

    EngineState state = make_engine_state(clock, budgets, config.engine);
    state.current_frame = config.current_frame;
    for (const HistoryRecord& r : history.records()) state.history.append(r);

    CycleResult cycle = plan_cycle(state, schedule);
    CHECK(cycle.diagnostics.objective == doctest::Approx(10.0));
    const auto* cell = cycle.next_frame.cell("L1", 1);
    REQUIRE(cell != nullptr);
    CHECK(cell->at({"1", "1"}) == doctest::Approx(1.0));
}
