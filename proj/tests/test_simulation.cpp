#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <gtest/gtest.h>

#include "nfv/nfv.hpp"

using namespace nfv;

namespace {

RunConfig small_config(PolicyKind policy = PolicyKind::greedy)
{
    RunConfig c = config_from_json(nlohmann::json::parse(R"({
        "seed": 5, "repetitions": 2, "horizon": 60, "arrival_mean": 3, "lifetime_mean": 20,
        "topology": {"nodes": 6, "target_degree": 2.5},
        "dqn": {"hidden_units": 16}
    })"));
    c.policy = policy;
    return c;
}

RunConfig two_node_ample()
{
    return config_from_json(nlohmann::json::parse(R"({
        "seed": 1, "repetitions": 3, "horizon": 300, "arrival_mean": 5, "lifetime_mean": 240,
        "topology": {"nodes": 2, "target_degree": 1, "vm_min": 2, "vm_max": 2,
                     "vm_capacity_min": 1e6, "vm_capacity_max": 1e6,
                     "link_capacity_min": 1e6, "link_capacity_max": 1e6},
        "policy": "greedy"
    })"));
}

std::vector<std::vector<std::string>> parse_csv(std::string const& text)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            cells.push_back(cell);
        }
        rows.push_back(cells);
    }
    return rows;
}

} // namespace

TEST(Seeds, RepetitionSeedsDiffer)
{
    EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
    EXPECT_NE(repetition_seed(1, 0), repetition_seed(1, 1));
    EXPECT_NE(repetition_seed(1, 0), repetition_seed(2, 0));
    EXPECT_EQ(repetition_seed(9, 3), repetition_seed(9, 3));
}

TEST(Simulation, TwoNodeAmpleGreedyAcceptsEverything)
{
    for (PolicyKind p : {PolicyKind::greedy, PolicyKind::oracle}) {
        RunConfig c = two_node_ample();
        c.policy = p;
        if (p == PolicyKind::oracle) {
            // The exhaustive oracle handles chains of up to three functions.
            c.catalog_inline = nlohmann::json::parse(R"([
                {"name": "Web", "chain": ["NAT", "FW", "IDPS"], "cycles_per_bit": [4, 6, 8],
                 "bandwidth_mbps": 1, "latency_budget_ms": 500},
                {"name": "VoIP", "chain": ["NAT", "FW"], "cycles_per_bit": [60, 90],
                 "bandwidth_mbps": 0.064, "latency_budget_ms": 100}])");
        }
        auto r = run_simulation(c);
        for (auto const& run : r.runs) {
            EXPECT_GT(run.summary.offered, 0u);
            EXPECT_EQ(run.summary.accepted, run.summary.offered) << to_string(p);
            for (auto const& m : run.metrics) {
                EXPECT_EQ(m.aar, 1.0);
            }
        }
    }
}

TEST(Simulation, ZeroArrivalsGiveEmptySeries)
{
    RunConfig c = small_config();
    c.arrival_mean = 0.0;
    auto r = run_simulation(c);
    for (auto const& run : r.runs) {
        EXPECT_EQ(run.summary.offered, 0u);
        EXPECT_TRUE(run.metrics.empty());
        EXPECT_EQ(run.summary.slots, c.horizon);
    }
    EXPECT_EQ(metrics_csv(r), "seed,iteration,aar,anuc,epsilon,buffer_size\n");
}

TEST(Simulation, SameSeedSameBytes)
{
    for (PolicyKind p : {PolicyKind::greedy, PolicyKind::tabu, PolicyKind::dqn}) {
        RunConfig c = small_config(p);
        std::string const a = metrics_csv(run_simulation(c));
        std::string const b = metrics_csv(run_simulation(c));
        EXPECT_EQ(a, b) << to_string(p);
        c.seed = 6;
        EXPECT_NE(a, metrics_csv(run_simulation(c))) << to_string(p);
    }
}

TEST(Simulation, WindowMatchesEpisodeLog)
{
    RunConfig c = small_config(PolicyKind::tabu);
    c.window = 7;
    auto r = run_simulation(c);
    for (auto const& run : r.runs) {
        ASSERT_EQ(run.metrics.size(), run.episodes.size());
        for (std::size_t i = 0; i < run.metrics.size(); ++i) {
            std::size_t const lo = i + 1 >= c.window ? i + 1 - c.window : 0;
            std::size_t acc = 0;
            double cost = 0.0;
            for (std::size_t k = lo; k <= i; ++k) {
                if (run.episodes[k].outcome.accepted) {
                    ++acc;
                    cost += run.episodes[k].outcome.cost;
                }
            }
            EXPECT_EQ(run.metrics[i].aar, static_cast<double>(acc) / static_cast<double>(i + 1 - lo));
            EXPECT_EQ(run.metrics[i].anuc, acc ? cost / static_cast<double>(acc) : 0.0);
            EXPECT_GE(run.metrics[i].aar, 0.0);
            EXPECT_LE(run.metrics[i].aar, 1.0);
        }
    }
}

TEST(Simulation, EpisodeCapAndPerSlotCost)
{
    RunConfig c = small_config();
    c.episodes = 25;
    c.anuc = AnucMode::per_slot;
    auto r = run_simulation(c);
    for (auto const& run : r.runs) {
        EXPECT_EQ(run.summary.offered, 25u);
        EXPECT_EQ(run.episodes.size(), 25u);
    }
}

TEST(Outputs, CsvReaggregatesToSummary)
{
    RunConfig c = small_config(PolicyKind::dqn);
    auto r = run_simulation(c);
    auto dir = std::filesystem::temp_directory_path() / "nfv_outputs_test";
    std::filesystem::remove_all(dir);
    emit_outputs(r, dir);
    std::ifstream in(dir / "metrics.csv");
    std::stringstream text;
    text << in.rdbuf();
    auto rows = parse_csv(text.str());
    ASSERT_EQ(rows[0], (std::vector<std::string>{"seed", "iteration", "aar", "anuc", "epsilon", "buffer_size"}));
    std::map<std::string, std::pair<double, double>> last;
    std::vector<std::string> order;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (!last.contains(rows[i][0])) {
            order.push_back(rows[i][0]);
        }
        last[rows[i][0]] = {std::stod(rows[i][2]), std::stod(rows[i][3])};
    }
    std::vector<double> aar, anuc;
    for (auto const& seed : order) {
        aar.push_back(last[seed].first);
        anuc.push_back(last[seed].second);
    }
    std::ifstream sj(dir / "summary.json");
    auto summary = nlohmann::json::parse(sj);
    EXPECT_EQ(summary.at("final_aar").at("mean").get<double>(), mean_std(aar).mean);
    EXPECT_EQ(summary.at("final_aar").at("std").get<double>(), mean_std(aar).std);
    EXPECT_EQ(summary.at("final_anuc").at("mean").get<double>(), mean_std(anuc).mean);
    EXPECT_EQ(summary.at("config_hash"), config_hash(c));

    std::ifstream ej(dir / "episodes.jsonl");
    std::size_t lines = 0;
    std::string line;
    while (std::getline(ej, line)) {
        auto e = nlohmann::json::parse(line);
        EXPECT_TRUE(e.contains("hops"));
        ++lines;
    }
    EXPECT_EQ(lines, rows.size() - 1);
    EXPECT_FALSE(plot_directory(dir).empty());
    EXPECT_TRUE(std::filesystem::exists(dir / "aar.svg"));
    std::filesystem::remove_all(dir);
}

TEST(Outputs, OptionalFiles)
{
    RunConfig c = small_config(PolicyKind::dqn);
    c.repetitions = 1;
    c.trace = true;
    c.ledger_snapshot_interval = 10;
    c.save_checkpoint = true;
    auto r = run_simulation(c);
    auto dir = std::filesystem::temp_directory_path() / "nfv_optional_test";
    std::filesystem::remove_all(dir);
    emit_outputs(r, dir);
    EXPECT_TRUE(std::filesystem::exists(dir / "trace.jsonl"));
    EXPECT_TRUE(std::filesystem::exists(dir / "ledger.csv"));
    auto ck = dir / ("checkpoint_" + std::to_string(r.runs[0].summary.seed) + ".json");
    ASSERT_TRUE(std::filesystem::exists(ck));

    // A saved checkpoint loads back into a run with the same shape.
    RunConfig again = c;
    again.checkpoint_in = ck.string();
    again.save_checkpoint = false;
    EXPECT_NO_THROW(run_simulation(again));
    std::filesystem::remove_all(dir);
}

TEST(Config, RejectsBadInput)
{
    auto bad = [](char const* text) { return config_from_json(nlohmann::json::parse(text)); };
    EXPECT_THROW(bad(R"({"sede": 1})"), ConfigError);
    EXPECT_THROW(bad(R"({"policy": "random"})"), ConfigError);
    EXPECT_THROW(bad(R"({"seed": "one"})"), ConfigError);
    EXPECT_THROW(bad(R"({"engine": {"w_cost": 1, "typo": 2}})"), ConfigError);
    EXPECT_THROW(validate(bad(R"({"lifetime_mean": -1})")), ConfigError);
    EXPECT_THROW(validate(bad(R"({"repetitions": 0})")), ConfigError);
    EXPECT_THROW(validate(bad(R"({"dqn": {"discount": 1.5}})")), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
    RunConfig one_node = bad(R"({"topology": {"nodes": 1}})");
    EXPECT_THROW(build_scenario(one_node), ConfigError);
}

TEST(Config, CanonicalRoundTrip)
{
    RunConfig c = small_config(PolicyKind::tabu);
    auto j = config_to_json(c);
    RunConfig back = config_from_json(j);
    EXPECT_EQ(config_to_json(back).dump(), j.dump());
    EXPECT_EQ(config_hash(back), config_hash(c));
    EXPECT_EQ(config_hash(c).size(), 16u);
}

TEST(Config, SweepParameters)
{
    RunConfig c = small_config();
    EXPECT_EQ(with_param(c, "arrival_mean", 12).arrival_mean, 12.0);
    EXPECT_EQ(with_param(c, "w_cost", 0.5).engine.w_cost, 0.5);
    EXPECT_EQ(with_param(c, "engine.w_cost", 0.25).engine.w_cost, 0.25);
    EXPECT_EQ(with_param(c, "nodes", 9).generator.nodes, 9u);
    EXPECT_THROW(with_param(c, "no_such_field", 1), ConfigError);
    EXPECT_THROW(with_param(c, "engine", 1), ConfigError);
    EXPECT_THROW(sweep(c, "arrival_mean", {}), ConfigError);
}

TEST(Sweep, OneRowPerValue)
{
    RunConfig c = small_config();
    c.repetitions = 1;
    auto points = sweep(c, "lifetime_mean", {10, 40});
    ASSERT_EQ(points.size(), 2u);
    auto rows = parse_csv(sweep_csv("lifetime_mean", points));
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[1][1], "10");
    EXPECT_EQ(rows[2][1], "40");
}

TEST(Plot, RendersSeries)
{
    std::string svg = svg_line_chart("t", "x", "y", {PlotSeries{"s", {0, 1, 2}, {1, 0.5, 0.25}}});
    EXPECT_NE(svg.find("<polyline"), std::string::npos);
    EXPECT_THROW(plot_directory(std::filesystem::temp_directory_path() / "nfv_no_such_dir"), std::runtime_error);
}
