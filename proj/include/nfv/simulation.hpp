#ifndef NFV_SIMULATION_HPP
#define NFV_SIMULATION_HPP

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "delay_cost.hpp"
#include "dqn.hpp"
#include "ledger.hpp"
#include "placement.hpp"
#include "policies.hpp"
#include "service.hpp"
#include "topology.hpp"

namespace nfv {

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of Monte Carlo repetition `rep` under `master`.
inline std::uint64_t repetition_seed(std::uint64_t master, std::size_t rep)
{
    return splitmix64(master + 0x632be59bd9b4e019ULL * (static_cast<std::uint64_t>(rep) + 1));
}

/// Topology, cost weights and catalog shared by all repetitions of a run.
struct Scenario
{
    Topology topology;
    CostWeights weights;
    std::vector<ServiceSpec> catalog;
};

inline std::filesystem::path resolve(RunConfig const& c, std::string const& p)
{
    std::filesystem::path path(p);
    return path.is_absolute() || c.base_dir.empty() ? path : c.base_dir / path;
}

inline Scenario build_scenario(RunConfig const& c)
{
    std::uint64_t const s = c.scenario_seed.value_or(c.seed);
    Topology topo = c.topology_file ? load_topology(resolve(c, *c.topology_file))
                                    : generate_random_connected(c.generator, s);
    if (topo.node_count() < 2) {
        throw ConfigError("a scenario needs at least two nodes for distinct ingress and egress");
    }
    std::mt19937_64 rng(splitmix64(s));
    CostWeights weights = CostWeights::random(topo, rng, c.weight_min, c.weight_max);
    std::vector<ServiceSpec> catalog;
    if (c.catalog_file) {
        std::ifstream in(resolve(c, *c.catalog_file));
        if (!in) {
            throw ConfigError("cannot open catalog file " + *c.catalog_file);
        }
        nlohmann::json j;
        try {
            in >> j;
        } catch (nlohmann::json::exception const& e) {
            throw ConfigError(*c.catalog_file + ": " + e.what());
        }
        catalog = catalog_from_json(j, topo, rng, c.extra_functions);
    } else if (c.catalog_inline) {
        catalog = catalog_from_json(*c.catalog_inline, topo, rng, c.extra_functions);
    } else {
        catalog = default_catalog(topo, rng);
    }
    return Scenario{std::move(topo), std::move(weights), std::move(catalog)};
}

struct EpisodeRecord
{
    std::size_t iteration = 0; ///< 1-based request counter within the run
    std::size_t slot = 0;
    UserId user = 0;
    ServiceId service = 0;
    PlacementOutcome outcome;
    double epsilon = 0.0;
    std::size_t buffer_size = 0;
};

struct MetricRow
{
    std::uint64_t seed = 0;
    std::size_t iteration = 0;
    double aar = 0.0;
    double anuc = 0.0;
    double epsilon = 0.0;
    std::size_t buffer_size = 0;
};

struct RunSummary
{
    std::uint64_t seed = 0;
    std::size_t offered = 0;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t slots = 0;
    double aar_total = 0.0;  ///< accepted / offered over the whole run
    double anuc_total = 0.0; ///< mean cost per accepted request over the whole run
    double final_aar = 0.0;  ///< last metrics row
    double final_anuc = 0.0;
    double aar_head = 0.0; ///< acceptance over the first 10% of episodes
    double aar_tail = 0.0; ///< acceptance over the last 10% of episodes
    double anuc_tail = 0.0;
};

struct RunResult
{
    RunSummary summary;
    std::vector<EpisodeRecord> episodes;
    std::vector<MetricRow> metrics;
    std::vector<std::string> trace_lines;
    std::string ledger_csv;
    std::optional<nlohmann::json> checkpoint;
};

/// Sliding-window acceptance and cost, recomputed from the window each time.
class MetricWindow
{
public:
    explicit MetricWindow(std::size_t size) : size_(size) {}

    void push(bool accepted, double cost)
    {
        items_.emplace_back(accepted, cost);
        if (items_.size() > size_) {
            items_.pop_front();
        }
    }

    double aar() const
    {
        if (items_.empty()) {
            return 0.0;
        }
        std::size_t acc = 0;
        for (auto const& [a, c] : items_) {
            acc += a ? 1 : 0;
        }
        return static_cast<double>(acc) / static_cast<double>(items_.size());
    }

    double anuc() const
    {
        std::size_t acc = 0;
        double sum = 0.0;
        for (auto const& [a, c] : items_) {
            if (a) {
                ++acc;
                sum += c;
            }
        }
        return acc == 0 ? 0.0 : sum / static_cast<double>(acc);
    }

private:
    std::size_t size_;
    std::deque<std::pair<bool, double>> items_;
};

inline std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Head/tail acceptance and tail cost over the first and last `fraction` of episodes.
inline void fill_head_tail(RunSummary& s, std::vector<EpisodeRecord> const& eps, double fraction = 0.1)
{
    std::size_t const n = eps.size();
    if (n == 0) {
        return;
    }
    std::size_t const k = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n))));
    std::size_t head = 0;
    std::size_t tail = 0;
    std::size_t tail_acc = 0;
    double tail_cost = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        head += eps[i].outcome.accepted ? 1 : 0;
        auto const& o = eps[n - k + i].outcome;
        if (o.accepted) {
            ++tail;
            ++tail_acc;
            tail_cost += o.cost;
        }
    }
    s.aar_head = static_cast<double>(head) / static_cast<double>(k);
    s.aar_tail = static_cast<double>(tail) / static_cast<double>(k);
    s.anuc_tail = tail_acc == 0 ? 0.0 : tail_cost / static_cast<double>(tail_acc);
}

inline std::unique_ptr<Policy> make_policy(RunConfig const& c, PolicyEnv const& env, DqnAgent* agent,
                                           std::uint64_t seed)
{
    switch (c.policy) {
    case PolicyKind::greedy: {
        auto p = std::make_unique<GreedyPolicy>(env, c.greedy_route);
        p->set_trace(c.trace);
        return p;
    }
    case PolicyKind::tabu: {
        auto p = std::make_unique<TabuPolicy>(env, c.tabu, splitmix64(seed ^ 0x7ab0ULL));
        p->set_trace(c.trace);
        return p;
    }
    case PolicyKind::oracle: {
        OracleLimits limits;
        limits.max_hops = c.oracle_max_hops;
        auto p = std::make_unique<OraclePolicy>(env, limits);
        p->set_trace(c.trace);
        return p;
    }
    case PolicyKind::dqn: {
        DqnPolicyOptions o;
        o.reject_zeroes_episode = c.reject_zeroes_episode;
        o.levels = c.levels;
        auto p = std::make_unique<DqnPolicy>(env, *agent, o);
        p->set_trace(c.trace);
        return p;
    }
    }
    throw ConfigError("unknown policy");
}

/**
 * One Monte Carlo repetition. Each slot releases departed users, draws the
 * slot's arrivals and runs one episode per request in arrival order;
 * accepted placements are committed to the ledger. Throws
 * InvariantViolation if an audit fails.
 */
inline RunResult run_repetition(RunConfig const& c, Scenario const& sc, std::size_t rep)
{
    std::uint64_t const seed = repetition_seed(c.seed, rep);
    Topology const& topo = sc.topology;
    ResourceLedger ledger(topo);
    Workload workload(sc.catalog.size(), c.arrival_mean, c.lifetime_mean, c.arrival_process, splitmix64(seed ^ 1));
    PolicyEnv env{&topo, &sc.weights, c.engine, sc.catalog.size()};

    std::unique_ptr<DqnAgent> agent;
    if (c.policy == PolicyKind::dqn) {
        agent = std::make_unique<DqnAgent>(state_size(topo),
                                           action_space_size(topo, c.engine.node_vm_action_space), c.dqn,
                                           splitmix64(seed ^ 2));
        if (c.checkpoint_in) {
            std::ifstream in(resolve(c, *c.checkpoint_in));
            if (!in) {
                throw ConfigError("cannot open checkpoint " + *c.checkpoint_in);
            }
            nlohmann::json j;
            try {
                in >> j;
            } catch (nlohmann::json::exception const& e) {
                throw ConfigError(*c.checkpoint_in + ": " + e.what());
            }
            agent->load_checkpoint(j);
        }
    }
    auto policy = make_policy(c, env, agent.get(), seed);

    RunResult out;
    RunSummary& s = out.summary;
    s.seed = seed;
    MetricWindow window(c.window);
    double accepted_cost = 0.0;
    std::ostringstream ledger_csv;
    bool ledger_header = rep == 0;
    std::size_t const limit = c.episodes.value_or(static_cast<std::size_t>(-1));

    for (std::size_t slot = 0; slot < c.horizon && s.offered < limit; ++slot) {
        ledger.apply_departures(slot);
        for (Request const& req : workload.arrivals(slot)) {
            if (s.offered >= limit) {
                break;
            }
            ServiceSpec const& spec = sc.catalog.at(req.service);
            LedgerSnapshot const before = c.audit ? ledger.snapshot() : LedgerSnapshot{};
            Decision d = policy->place(spec, ledger);
            ++s.offered;
            if (d.outcome.accepted) {
                if (c.audit) {
                    auto issues = replay_check(topo, spec, before, d.outcome);
                    if (!issues.empty()) {
                        throw InvariantViolation("replay check failed for user " + std::to_string(req.user) + ": "
                                                 + issues.front());
                    }
                }
                ledger.charge(req.user, std::move(d.allocation), req.departure_slot(), d.outcome.cost);
                ++s.accepted;
                accepted_cost += d.outcome.cost;
            } else {
                ++s.rejected;
                if (c.audit && !(ledger.snapshot() == before)) {
                    throw InvariantViolation("rejected episode changed the ledger");
                }
            }
            window.push(d.outcome.accepted, d.outcome.cost);

            EpisodeRecord rec;
            rec.iteration = s.offered;
            rec.slot = slot;
            rec.user = req.user;
            rec.service = req.service;
            rec.epsilon = agent ? agent->epsilon() : 0.0;
            rec.buffer_size = agent ? agent->replay().size() : 0;
            MetricRow row{seed, s.offered, window.aar(),
                          c.anuc == AnucMode::per_request ? window.anuc() : ledger.live_cost(), rec.epsilon,
                          rec.buffer_size};
            out.metrics.push_back(row);
            if (c.trace) {
                for (auto const& st : d.trace) {
                    nlohmann::json t = {{"seed", seed},
                                        {"slot", slot},
                                        {"user", req.user},
                                        {"j", st.j},
                                        {"action", st.action ? nlohmann::json(*st.action) : nlohmann::json(nullptr)},
                                        {"kind", to_string(st.kind)},
                                        {"node", st.node},
                                        {"vm", st.vm},
                                        {"t_o", st.elapsed},
                                        {"phi", st.cost},
                                        {"reward", st.reward},
                                        {"status", to_string(st.status)}};
                    out.trace_lines.push_back(t.dump());
                }
            }
            rec.outcome = std::move(d.outcome);
            out.episodes.push_back(std::move(rec));
        }
        if (c.audit && !ledger.conserved()) {
            throw InvariantViolation("ledger conservation broken at slot " + std::to_string(slot));
        }
        if (c.ledger_snapshot_interval > 0 && slot % c.ledger_snapshot_interval == 0) {
            ledger.write_snapshot_csv(ledger_csv, slot, ledger_header);
            ledger_header = false;
        }
        s.slots = slot + 1;
    }

    // End-of-run audit: once every lifetime has elapsed the network is empty again.
    ledger.apply_departures(static_cast<std::size_t>(-1));
    if (!ledger.at_full_capacity() || ledger.live_count() != 0) {
        throw InvariantViolation("ledger did not return to full capacity after all departures");
    }

    s.aar_total = s.offered ? static_cast<double>(s.accepted) / static_cast<double>(s.offered) : 0.0;
    s.anuc_total = s.accepted ? accepted_cost / static_cast<double>(s.accepted) : 0.0;
    if (!out.metrics.empty()) {
        s.final_aar = out.metrics.back().aar;
        s.final_anuc = out.metrics.back().anuc;
    }
    fill_head_tail(s, out.episodes);
    out.ledger_csv = ledger_csv.str();
    if (agent && c.save_checkpoint) {
        out.checkpoint = agent->checkpoint();
    }
    return out;
}

struct Stat
{
    double mean = 0.0;
    double std = 0.0; ///< sample standard deviation, 0 for a single value
};

inline Stat mean_std(std::vector<double> const& v)
{
    Stat s;
    if (v.empty()) {
        return s;
    }
    for (double x : v) {
        s.mean += x;
    }
    s.mean /= static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) {
            ss += (x - s.mean) * (x - s.mean);
        }
        s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return s;
}

struct SimulationResult
{
    RunConfig config;
    std::vector<RunResult> runs;

    std::vector<double> column(double RunSummary::*field) const
    {
        std::vector<double> v;
        for (auto const& r : runs) {
            v.push_back(r.summary.*field);
        }
        return v;
    }

    Stat stat(double RunSummary::*field) const { return mean_std(column(field)); }
};

/// All repetitions of one configuration, sequentially and deterministically.
inline SimulationResult run_simulation(RunConfig const& c)
{
    validate(c);
    Scenario const sc = build_scenario(c);
    SimulationResult res;
    res.config = c;
    for (std::size_t rep = 0; rep < c.repetitions; ++rep) {
        res.runs.push_back(run_repetition(c, sc, rep));
    }
    return res;
}

inline std::string metrics_csv(SimulationResult const& r)
{
    std::string out = "seed,iteration,aar,anuc,epsilon,buffer_size\n";
    for (auto const& run : r.runs) {
        for (auto const& m : run.metrics) {
            out += std::to_string(m.seed) + "," + std::to_string(m.iteration) + "," + format_double(m.aar) + ","
                   + format_double(m.anuc) + "," + format_double(m.epsilon) + "," + std::to_string(m.buffer_size)
                   + "\n";
        }
    }
    return out;
}

inline nlohmann::json summary_json(SimulationResult const& r)
{
    nlohmann::json runs = nlohmann::json::array();
    for (auto const& run : r.runs) {
        auto const& s = run.summary;
        runs.push_back({{"seed", s.seed},
                        {"offered", s.offered},
                        {"accepted", s.accepted},
                        {"rejected", s.rejected},
                        {"slots", s.slots},
                        {"aar_total", s.aar_total},
                        {"anuc_total", s.anuc_total},
                        {"final_aar", s.final_aar},
                        {"final_anuc", s.final_anuc},
                        {"aar_head", s.aar_head},
                        {"aar_tail", s.aar_tail},
                        {"anuc_tail", s.anuc_tail}});
    }
    auto stat_json = [&](double RunSummary::*f) {
        Stat const s = r.stat(f);
        return nlohmann::json{{"mean", s.mean}, {"std", s.std}};
    };
    return {{"config", config_to_json(r.config)},
            {"config_hash", config_hash(r.config)},
            {"policy", to_string(r.config.policy)},
            {"runs", runs},
            {"aar_total", stat_json(&RunSummary::aar_total)},
            {"anuc_total", stat_json(&RunSummary::anuc_total)},
            {"final_aar", stat_json(&RunSummary::final_aar)},
            {"final_anuc", stat_json(&RunSummary::final_anuc)},
            {"aar_head", stat_json(&RunSummary::aar_head)},
            {"aar_tail", stat_json(&RunSummary::aar_tail)},
            {"anuc_tail", stat_json(&RunSummary::anuc_tail)}};
}

inline nlohmann::json episode_json(std::uint64_t seed, EpisodeRecord const& e)
{
    auto const& o = e.outcome;
    nlohmann::json placements = nlohmann::json::array();
    for (auto const& p : o.placements) {
        placements.push_back({{"function", p.function}, {"vm", p.vm}, {"node", p.node}});
    }
    return {{"seed", seed},
            {"iteration", e.iteration},
            {"slot", e.slot},
            {"user", e.user},
            {"service", e.service},
            {"accepted", o.accepted},
            {"reason", std::string(to_string(o.reason))},
            {"hops", o.hops},
            {"placements", placements},
            {"segments", o.segments},
            {"delay", o.delay.total()},
            {"cost", o.cost},
            {"reward", o.reward},
            {"steps", o.steps}};
}

inline void write_file(std::filesystem::path const& p, std::string const& text)
{
    std::ofstream out(p, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + p.string());
    }
    out << text;
    if (!out) {
        throw std::runtime_error("write failed for " + p.string());
    }
}

/// metrics.csv, episodes.jsonl, summary.json and the optional trace, ledger and checkpoint files.
inline void emit_outputs(SimulationResult const& r, std::filesystem::path const& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
    }
    write_file(dir / "metrics.csv", metrics_csv(r));
    std::string eps;
    for (auto const& run : r.runs) {
        for (auto const& e : run.episodes) {
            eps += episode_json(run.summary.seed, e).dump() + "\n";
        }
    }
    write_file(dir / "episodes.jsonl", eps);
    write_file(dir / "summary.json", summary_json(r).dump(2) + "\n");
    if (r.config.trace) {
        std::string t;
        for (auto const& run : r.runs) {
            for (auto const& line : run.trace_lines) {
                t += line + "\n";
            }
        }
        write_file(dir / "trace.jsonl", t);
    }
    if (r.config.ledger_snapshot_interval > 0) {
        std::string l;
        for (std::size_t i = 0; i < r.runs.size(); ++i) {
            l += r.runs[i].ledger_csv;
        }
        write_file(dir / "ledger.csv", l);
    }
    for (auto const& run : r.runs) {
        if (run.checkpoint) {
            write_file(dir / ("checkpoint_" + std::to_string(run.summary.seed) + ".json"), run.checkpoint->dump() + "\n");
        }
    }
}

struct SweepPoint
{
    nlohmann::json value;
    SimulationResult result;
};

/// One full simulation per value of `param`.
inline std::vector<SweepPoint> sweep(RunConfig const& base, std::string const& param,
                                     std::vector<nlohmann::json> const& values,
                                     std::function<void(SweepPoint const&)> const& on_point = {})
{
    if (values.empty()) {
        throw ConfigError("sweep needs at least one value");
    }
    std::vector<RunConfig> configs;
    for (auto const& v : values) {
        configs.push_back(with_param(base, param, v));
    }
    std::vector<SweepPoint> out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out.push_back(SweepPoint{values[i], run_simulation(configs[i])});
        if (on_point) {
            on_point(out.back());
        }
    }
    return out;
}

inline std::string sweep_csv(std::string const& param, std::vector<SweepPoint> const& points)
{
    std::string out = "param,value,aar_mean,aar_std,anuc_mean,anuc_std,final_aar_mean,final_anuc_mean\n";
    for (auto const& p : points) {
        Stat const aar = p.result.stat(&RunSummary::aar_total);
        Stat const anuc = p.result.stat(&RunSummary::anuc_total);
        out += param + "," + p.value.dump() + "," + format_double(aar.mean) + "," + format_double(aar.std) + ","
               + format_double(anuc.mean) + "," + format_double(anuc.std) + ","
               + format_double(p.result.stat(&RunSummary::final_aar).mean) + ","
               + format_double(p.result.stat(&RunSummary::final_anuc).mean) + "\n";
    }
    return out;
}

} // namespace nfv

#endif // NFV_SIMULATION_HPP
