// adopt: ad-delivery allocation optimizer CLI.
//
// Exit codes: 0 success, 1 infeasible model, 2 input error, 3 internal
// invariant violation.

#include <cstdlib>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "adopt/errors.hpp"
#include "adopt/io.hpp"
#include "adopt/simulator.hpp"

namespace {

using namespace adopt;

struct LoadedRun {
    RunConfig config;
    std::map<CampaignId, double> budgets;
    Catalog catalog{{}, {}, {}, 1};
    Schedule schedule;
    HistoryLog history;
};

std::string config_dir(const std::string& path) {
    auto slash = path.find_last_of('/');
    return slash == std::string::npos ? std::string() : path.substr(0, slash);
}

LoadedRun load_run(const std::string& config_path) {
    LoadedRun out;
    out.config = run_config_from(parse_config_file(config_path), config_dir(config_path));
    out.budgets = load_campaigns(out.config.campaigns_path);
    FrameClock clock{out.config.epoch_utc, out.config.frame_seconds};
    out.catalog = catalog_from_files(out.config.schedule_path, out.budgets, clock,
                                     out.config.frames);
    out.schedule = load_schedule(out.config.schedule_path, out.catalog);
    if (!out.config.history_path.empty()) out.history = load_history(out.config.history_path);
    return out;
}

EngineState engine_state_for(const LoadedRun& run) {
    EngineState state = make_engine_state(run.catalog.clock(), run.budgets, run.config.engine);
    state.current_frame = run.config.current_frame;
    for (const HistoryRecord& r : run.history.records()) state.history.append(r);
    return state;
}

std::string format_value(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

int cmd_validate(const std::string& config_path) {
    LoadedRun run = load_run(config_path);
    auto violations = validate_catalog(run.catalog, run.schedule.admissible);
    std::cout << "campaigns: " << run.budgets.size() << "\n";
    std::cout << "locations: " << run.catalog.locations().size() << "\n";
    std::cout << "frames: " << run.catalog.frame_count() << "\n";
    std::cout << "admissible points: " << run.schedule.admissible.size() << "\n";
    std::cout << "new quads: " << run.schedule.new_quads.size() << "\n";
    std::cout << "history records: " << run.history.size() << "\n";
    std::cout << "catalog violations: " << violations.size() << "\n";
    for (const auto& v : violations) std::cout << "  " << v << "\n";
    if (!violations.empty()) return 2;
    std::cout << "ok\n";
    return 0;
}

int cmd_plan(const std::string& config_path) {
    LoadedRun run = load_run(config_path);
    EngineState state = engine_state_for(run);
    CycleResult cycle = plan_cycle(state, run.schedule);
    emit_plan(cycle.next_frame, run.config.output_path);
    std::cout << "objective = " << format_value(cycle.diagnostics.objective) << "\n";
    std::cout << "discounted_objective = " << format_value(cycle.diagnostics.discounted_objective)
              << "\n";
    std::cout << "solver_iterations = " << cycle.diagnostics.solver_iterations << "\n";
    std::cout << "variables = " << cycle.diagnostics.variables << "\n";
    std::cout << "rows = " << cycle.diagnostics.rows << "\n";
    for (const auto& [level, count] : cycle.diagnostics.ladder_histogram)
        std::cout << "ladder_level." << to_string(level) << " = " << count << "\n";
    std::cout << "plan written to " << run.config.output_path << "\n";
    return 0;
}

int cmd_project(const std::string& config_path, const std::string& out_path) {
    LoadedRun run = load_run(config_path);
    EngineState state = engine_state_for(run);
    std::ostringstream out;
    out << "kind,frame,location_id,campaign_id,creative_id,value,detail\n";
    for (const auto& cell : run.schedule.admissible.cells()) {
        if (cell.frame < state.current_frame) continue;
        SupplyEstimate est = project_supply_weighted(state.history, cell.location, cell.frame,
                                                     state.clock, state.config.projection);
        out << "supply," << cell.frame << ',' << cell.location << ",,," << est.value << ','
            << (est.no_data ? "no-data" : "ok") << "\n";
    }
    for (const Quad& q : run.schedule.admissible.points()) {
        if (q.frame < state.current_frame) continue;
        ProfitEstimate est =
            project_profit(state.history, q, state.clock, state.config.projection);
        out << "profit," << q.frame << ',' << q.location << ',' << q.campaign << ',' << q.creative
            << ',' << est.value << ",level-" << to_string(est.level) << "\n";
    }
    if (out_path.empty()) {
        std::cout << out.str();
    } else {
        std::ofstream f(out_path, std::ios::trunc);
        f << out.str();
        if (!f.good()) throw std::runtime_error("cannot write '" + out_path + "'");
        std::cout << "projections written to " << out_path << "\n";
    }
    return 0;
}

PolicyFactory policy_factory(const std::string& name, const WorldConfig& world,
                             const EngineConfig& engine, const GreedyConfig& greedy) {
    if (name == "lp" || name == "lp-engine")
        return [&world, engine] {
            return make_lp_policy(world.catalog, world.schedule, world.budgets, engine);
        };
    if (name == "greedy")
        return [&world, greedy] {
            return make_greedy_policy(world.catalog, world.schedule, world.budgets, greedy);
        };
    if (name == "uniform")
        return
            [&world] { return make_uniform_policy(world.catalog, world.schedule, world.budgets); };
    throw std::invalid_argument("unknown policy '" + name + "' (expected lp|greedy|uniform)");
}

EngineConfig engine_config_for_world(const std::string& world_path) {
    // Engine knobs may ride in the world file; same keys as the run config.
    auto values = parse_config_file(world_path);
    values.erase("history");
    values.erase("schedule");
    values.erase("campaigns");
    return run_config_from(values, "").engine;
}

GreedyConfig greedy_config_for_world(const std::string& world_path) {
    auto values = parse_config_file(world_path);
    GreedyConfig cfg;
    if (values.count("greedy_learning_frames"))
        cfg.learning_frames = std::stoi(values.at("greedy_learning_frames"));
    if (values.count("greedy_quantile")) cfg.quantile = std::stod(values.at("greedy_quantile"));
    if (values.count("greedy_pace_tolerance"))
        cfg.pace_tolerance = std::stod(values.at("greedy_pace_tolerance"));
    return cfg;
}

int cmd_simulate(const std::string& world_path, const std::string& policy_name,
                 std::uint64_t seed, int span, const std::string& out_path) {
    WorldConfig config = load_world_config(world_path);
    World world = generate_world(config);
    EngineConfig engine = engine_config_for_world(world_path);
    GreedyConfig greedy = greedy_config_for_world(world_path);
    auto factory = policy_factory(policy_name, config, engine, greedy);
    auto policy = factory();
    if (span == 0) span = world.span();
    RunReport report = run_policy(world, *policy, span, seed);
    if (!out_path.empty()) emit_run_report(report, out_path);
    std::cout << "policy = " << report.policy << "\n";
    std::cout << "seed = " << report.seed << "\n";
    std::cout << "revenue = " << format_value(report.revenue) << "\n";
    std::cout << "impressions = " << report.impressions << "\n";
    std::cout << "supply_violations = " << report.supply_violations << "\n";
    std::cout << "plan_violations = " << report.plan_violations << "\n";
    return report.aborted ? 3 : 0;
}

int cmd_compare(const std::string& world_path, const std::vector<std::string>& policy_names,
                const std::vector<std::uint64_t>& seeds, int span, const std::string& out_path) {
    WorldConfig config = load_world_config(world_path);
    World world = generate_world(config);
    EngineConfig engine = engine_config_for_world(world_path);
    GreedyConfig greedy = greedy_config_for_world(world_path);
    std::vector<PolicyFactory> factories;
    for (const auto& name : policy_names)
        factories.push_back(policy_factory(name, config, engine, greedy));
    Comparison result = compare(world, factories, seeds, span);
    for (const auto& row : result.rows)
        std::cout << row.policy << ": mean " << format_value(row.mean_revenue) << " +- "
                  << format_value(row.std_revenue) << " over " << row.revenue_per_seed.size()
                  << " seeds\n";
    std::cout << "uplift_abs = " << format_value(result.uplift_abs) << "\n";
    std::cout << "uplift_pct = " << format_value(result.uplift_pct) << "\n";
    if (!out_path.empty()) emit_comparison(result, out_path);
    return 0;
}

int cmd_run(const std::string& config_path, const std::string& world_path,
            const std::string& replay_path, int span, std::uint64_t seed,
            const std::string& plans_dir, const std::string& report_path) {
    LoadedRun run = load_run(config_path);

    if (!world_path.empty()) {
        WorldConfig config = load_world_config(world_path);
        World world = generate_world(config);
        auto policy = make_lp_policy(config.catalog, config.schedule, config.budgets,
                                     run.config.engine);
        if (span == 0) span = world.span();
        RunReport report = run_policy(world, *policy, span, seed);
        if (!report_path.empty()) emit_run_report(report, report_path);
        std::cout << "revenue = " << format_value(report.revenue) << "\n";
        std::cout << "impressions = " << report.impressions << "\n";
        return report.aborted ? 3 : 0;
    }
    if (replay_path.empty())
        throw std::invalid_argument("run: provide --world or --replay");

    // Replay: arrivals per (location, frame) come from the log's totals; a
    // delivered impression earns the logged per-impression profit of its
    // (campaign, creative, location, frame), 0 when the log never saw it.
    HistoryLog replay = load_history(replay_path);
    EngineState state = engine_state_for(run);
    FrameClock clock = run.catalog.clock();
    if (span == 0) span = run.catalog.frame_count() - state.current_frame + 1;
    std::mt19937_64 choice_rng(seed);
    double revenue = 0.0;
    std::int64_t impressions = 0;

    std::map<std::tuple<CampaignId, CreativeId, LocationId, std::int64_t>, std::pair<double, double>>
        unit_profit;  // (profit, impressions)
    for (const HistoryRecord& r : replay.records()) {
        if (r.is_traffic()) continue;
        auto& acc = unit_profit[{r.campaign, r.creative, r.location, r.timestamp}];
        acc.first += r.profit;
        acc.second += static_cast<double>(r.impressions);
    }

    for (int step = 0; step < span; ++step) {
        FrameIndex k = state.current_frame;
        CycleResult cycle = plan_cycle(state, run.schedule);
        if (!plans_dir.empty())
            emit_plan(cycle.next_frame, plans_dir + "/plan_" + std::to_string(k) + ".csv");
        std::int64_t ts = clock.frame_start(k);

        FrameOutcomes outcomes;
        outcomes.frame = k;
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        for (const LocationId& l : run.catalog.locations()) {
            const auto& series = replay.supply_series(l);
            auto obs = series.find(ts);
            std::int64_t slots =
                obs == series.end() ? 0 : static_cast<std::int64_t>(obs->second);
            outcomes.observed_slots[l] = slots;
            const DeliveryPlan::Cell* cell = cycle.next_frame.cell(l, k);
            if (!cell || cell->empty() || slots == 0) continue;
            for (std::int64_t slot = 0; slot < slots; ++slot) {
                double u = uniform(choice_rng);
                double acc = 0.0;
                for (const auto& [pair, p] : *cell) {
                    acc += p;
                    if (u < acc) {
                        auto it = unit_profit.find({pair.first, pair.second, l, ts});
                        double per_impression =
                            (it != unit_profit.end() && it->second.second > 0.0)
                                ? it->second.first / it->second.second
                                : 0.0;
                        auto& entry = outcomes.delivered[{l, pair.first, pair.second}];
                        entry.first += 1;
                        entry.second += per_impression;
                        revenue += per_impression;
                        ++impressions;
                        break;
                    }
                }
            }
        }
        advance(state, outcomes);
    }
    std::cout << "revenue = " << format_value(revenue) << "\n";
    std::cout << "impressions = " << impressions << "\n";
    (void)report_path;
    return 0;
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        auto dash = token.find('-');
        if (dash != std::string::npos) {
            std::uint64_t lo = std::stoull(token.substr(0, dash));
            std::uint64_t hi = std::stoull(token.substr(dash + 1));
            for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
        } else if (!token.empty()) {
            seeds.push_back(std::stoull(token));
        }
    }
    return seeds;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ad-delivery allocation optimizer"};
    app.require_subcommand(1);

    std::string default_config;
    if (const char* env = std::getenv("ADOPT_CONFIG")) default_config = env;

    std::string config_path = default_config;
    std::string world_path, replay_path, out_path, plans_dir, policy_name = "lp";
    std::string policies_text = "lp,greedy", seeds_text = "1";
    std::uint64_t seed = 1;
    int span = 0;

    auto* validate = app.add_subcommand("validate", "load all inputs and report consistency");
    validate->add_option("--config", config_path, "run config file");

    auto* plan = app.add_subcommand("plan", "one optimization cycle, emits the plan CSV");
    plan->add_option("--config", config_path, "run config file");

    auto* project = app.add_subcommand("project", "dump supply and profit projections");
    project->add_option("--config", config_path, "run config file");
    project->add_option("--out", out_path, "output CSV (default stdout)");

    auto* run = app.add_subcommand("run", "rolling-horizon loop against a world or a replayed log");
    run->add_option("--config", config_path, "run config file");
    run->add_option("--world", world_path, "world config file");
    run->add_option("--replay", replay_path, "history CSV to replay");
    run->add_option("--span", span, "frames to run (default: whole span)");
    run->add_option("--seed", seed, "sampling seed");
    run->add_option("--plans-dir", plans_dir, "directory for per-frame plan CSVs (replay mode)");
    run->add_option("--report", out_path, "report CSV path");

    auto* simulate = app.add_subcommand("simulate", "run one policy in a synthetic world");
    simulate->add_option("--world", world_path, "world config file")->required();
    simulate->add_option("--policy", policy_name, "lp|greedy|uniform");
    simulate->add_option("--seed", seed, "run seed");
    simulate->add_option("--span", span, "frames to run");
    simulate->add_option("--out", out_path, "report CSV path");

    auto* compare_cmd = app.add_subcommand("compare", "compare policies across seeds");
    compare_cmd->add_option("--world", world_path, "world config file")->required();
    compare_cmd->add_option("--policies", policies_text, "comma list: lp,greedy,uniform");
    compare_cmd->add_option("--seeds", seeds_text, "comma list or ranges, e.g. 1-20");
    compare_cmd->add_option("--span", span, "frames to run");
    compare_cmd->add_option("--out", out_path, "table CSV path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(config_path);
        if (plan->parsed()) return cmd_plan(config_path);
        if (project->parsed()) return cmd_project(config_path, out_path);
        if (run->parsed())
            return cmd_run(config_path, world_path, replay_path, span, seed, plans_dir, out_path);
        if (simulate->parsed())
            return cmd_simulate(world_path, policy_name, seed, span, out_path);
        if (compare_cmd->parsed()) {
            std::vector<std::string> names;
            std::stringstream ss(policies_text);
            std::string token;
            while (std::getline(ss, token, ',')) names.push_back(token);
            return cmd_compare(world_path, names, parse_seeds(seeds_text), span, out_path);
        }
    } catch (const adopt::InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    } catch (const adopt::ModelError& e) {
        std::cerr << "model error: " << e.what() << "\n";
        return 1;
    } catch (const adopt::ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
