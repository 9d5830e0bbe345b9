#ifndef NFV_CONFIG_HPP
#define NFV_CONFIG_HPP

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "dqn.hpp"
#include "errors.hpp"
#include "placement.hpp"
#include "policies.hpp"
#include "service.hpp"
#include "topology.hpp"

namespace nfv {

enum class AnucMode
{
    per_request, ///< mean cost of the accepted requests in the window
    per_slot     ///< cost of every live allocation in the network at that moment
};

enum class PolicyKind
{
    dqn,
    greedy,
    tabu,
    oracle
};

inline std::string to_string(PolicyKind p)
{
    switch (p) {
    case PolicyKind::dqn: return "dqn";
    case PolicyKind::greedy: return "greedy";
    case PolicyKind::tabu: return "tabu";
    case PolicyKind::oracle: return "oracle";
    }
    return "unknown";
}

inline PolicyKind parse_policy(std::string const& s)
{
    if (s == "dqn") return PolicyKind::dqn;
    if (s == "greedy") return PolicyKind::greedy;
    if (s == "tabu") return PolicyKind::tabu;
    if (s == "oracle") return PolicyKind::oracle;
    throw ConfigError("unknown policy '" + s + "' (expected dqn, greedy, tabu or oracle)");
}

/// Everything a run depends on. Relative file paths resolve against base_dir.
struct RunConfig
{
    std::uint64_t seed = 1;
    /// Seeds the topology, cost weights and service endpoints; defaults to seed.
    std::optional<std::uint64_t> scenario_seed;
    std::size_t repetitions = 10;
    std::size_t horizon = 2000;
    /// Stop after this many requests even if slots remain.
    std::optional<std::size_t> episodes;
    double arrival_mean = 5.0;
    ArrivalProcess arrival_process = ArrivalProcess::uniform;
    double lifetime_mean = 240.0;
    PolicyKind policy = PolicyKind::dqn;

    std::optional<std::string> topology_file;
    GeneratorParams generator;
    std::optional<std::string> catalog_file;
    std::optional<nlohmann::json> catalog_inline;
    std::vector<std::string> extra_functions;
    double weight_min = 25.0;
    double weight_max = 75.0;

    EngineConfig engine;
    std::uint32_t levels = 1000;
    DqnConfig dqn;
    bool reject_zeroes_episode = true;
    std::optional<std::string> checkpoint_in;
    TabuConfig tabu;
    RouteWeight greedy_route = RouteWeight::propagation_delay;
    std::size_t oracle_max_hops = 5;

    std::size_t window = 100;
    AnucMode anuc = AnucMode::per_request;
    bool audit = true;

    bool trace = false;
    std::size_t ledger_snapshot_interval = 0;
    bool save_checkpoint = false;

    std::filesystem::path base_dir;
};

namespace detail {

inline void check_keys(nlohmann::json const& j, std::set<std::string> const& allowed, std::string const& where)
{
    if (!j.is_object()) {
        throw ConfigError(where + " must be a JSON object");
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.contains(it.key())) {
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
        }
    }
}

template <class T>
void read(nlohmann::json const& j, char const* key, T& out, std::string const& where)
{
    if (!j.contains(key)) {
        return;
    }
    try {
        out = j.at(key).get<T>();
    } catch (nlohmann::json::exception const& e) {
        throw ConfigError(where + "." + key + ": " + e.what());
    }
}

template <class T>
void read_opt(nlohmann::json const& j, char const* key, std::optional<T>& out, std::string const& where)
{
    if (!j.contains(key) || j.at(key).is_null()) {
        return;
    }
    T v{};
    read(j, key, v, where);
    out = v;
}

inline void require(bool ok, std::string const& what)
{
    if (!ok) {
        throw ConfigError(what);
    }
}

} // namespace detail

/// Range checks beyond the schema.
inline void validate(RunConfig const& c)
{
    using detail::require;
    require(c.repetitions >= 1, "repetitions must be at least 1");
    require(c.horizon >= 1, "horizon must be at least 1 slot");
    require(!c.episodes || *c.episodes >= 1, "episodes must be at least 1");
    require(c.arrival_mean >= 0.0 && std::isfinite(c.arrival_mean), "arrival_mean must be non-negative");
    require(c.lifetime_mean > 0.0 && std::isfinite(c.lifetime_mean), "lifetime_mean must be positive");
    require(c.weight_min > 0.0 && c.weight_min <= c.weight_max, "weights need 0 < min <= max");
    require(c.engine.max_steps >= 1, "engine.max_steps must be at least 1");
    require(std::isfinite(c.engine.w_acc) && std::isfinite(c.engine.w_cost) && c.engine.w_cost >= 0.0
                && std::isfinite(c.engine.acceptance_bonus),
            "engine.w_acc and engine.acceptance_bonus must be finite and engine.w_cost non-negative");
    require(c.levels >= 1, "engine.levels must be at least 1");
    require(c.dqn.hidden_units >= 1, "dqn.hidden_units must be at least 1");
    require(c.dqn.learning_rate > 0.0, "dqn.learning_rate must be positive");
    require(c.dqn.discount >= 0.0 && c.dqn.discount <= 1.0, "dqn.discount must lie in [0, 1]");
    require(c.dqn.epsilon_min >= 0.0 && c.dqn.epsilon_min <= c.dqn.epsilon_start && c.dqn.epsilon_start <= 1.0,
            "dqn epsilon values need 0 <= min <= start <= 1");
    require(c.dqn.epsilon_decay > 0.0 && c.dqn.epsilon_decay <= 1.0, "dqn.epsilon_decay must lie in (0, 1]");
    require(c.dqn.replay_capacity >= 1 && c.dqn.batch_size >= 1, "dqn replay capacity and batch size must be positive");
    require(c.tabu.iterations >= 1 && c.tabu.k_paths >= 1, "tabu iterations and k_paths must be positive");
    require(c.window >= 1, "metrics.window must be at least 1");
    require(!(c.catalog_file && c.catalog_inline), "give either catalog.file or an inline catalog, not both");
}

inline RunConfig config_from_json(nlohmann::json const& j, std::filesystem::path const& base_dir = {})
{
    using detail::check_keys;
    using detail::read;
    using detail::read_opt;
    RunConfig c;
    c.base_dir = base_dir;
    check_keys(j,
               {"seed", "scenario_seed", "repetitions", "horizon", "episodes", "arrival_mean", "arrival_process",
                "lifetime_mean", "policy", "topology", "catalog", "weights", "engine", "dqn", "tabu", "greedy",
                "oracle", "metrics", "output"},
               "config");
    read(j, "seed", c.seed, "config");
    read_opt(j, "scenario_seed", c.scenario_seed, "config");
    read(j, "repetitions", c.repetitions, "config");
    read(j, "horizon", c.horizon, "config");
    read_opt(j, "episodes", c.episodes, "config");
    read(j, "arrival_mean", c.arrival_mean, "config");
    read(j, "lifetime_mean", c.lifetime_mean, "config");
    if (j.contains("arrival_process")) {
        std::string p;
        read(j, "arrival_process", p, "config");
        if (p == "uniform") {
            c.arrival_process = ArrivalProcess::uniform;
        } else if (p == "poisson") {
            c.arrival_process = ArrivalProcess::poisson;
        } else {
            throw ConfigError("arrival_process must be 'uniform' or 'poisson'");
        }
    }
    if (j.contains("policy")) {
        std::string p;
        read(j, "policy", p, "config");
        c.policy = parse_policy(p);
    }
    if (j.contains("topology")) {
        auto const& t = j.at("topology");
        check_keys(t,
                   {"file", "nodes", "target_degree", "vm_min", "vm_max", "vm_capacity_min", "vm_capacity_max",
                    "link_capacity_min", "link_capacity_max", "prop_delay_min_ms", "prop_delay_max_ms"},
                   "topology");
        read_opt(t, "file", c.topology_file, "topology");
        auto& g = c.generator;
        read(t, "nodes", g.nodes, "topology");
        read(t, "target_degree", g.target_degree, "topology");
        read(t, "vm_min", g.vm_min, "topology");
        read(t, "vm_max", g.vm_max, "topology");
        read(t, "vm_capacity_min", g.vm_capacity_min, "topology");
        read(t, "vm_capacity_max", g.vm_capacity_max, "topology");
        read(t, "link_capacity_min", g.link_capacity_min, "topology");
        read(t, "link_capacity_max", g.link_capacity_max, "topology");
        read(t, "prop_delay_min_ms", g.prop_delay_min_ms, "topology");
        read(t, "prop_delay_max_ms", g.prop_delay_max_ms, "topology");
    }
    if (j.contains("catalog")) {
        auto const& cat = j.at("catalog");
        if (cat.is_array()) {
            c.catalog_inline = cat;
        } else {
            check_keys(cat, {"file", "services", "extra_functions"}, "catalog");
            read_opt(cat, "file", c.catalog_file, "catalog");
            if (cat.contains("services")) {
                c.catalog_inline = cat.at("services");
            }
            read(cat, "extra_functions", c.extra_functions, "catalog");
        }
    }
    if (j.contains("weights")) {
        check_keys(j.at("weights"), {"min", "max"}, "weights");
        read(j.at("weights"), "min", c.weight_min, "weights");
        read(j.at("weights"), "max", c.weight_max, "weights");
    }
    if (j.contains("engine")) {
        auto const& e = j.at("engine");
        check_keys(e,
                   {"max_steps", "w_acc", "w_cost", "acceptance_bonus", "transmission_in_step_delay",
                    "node_vm_action_space", "levels"},
                   "engine");
        read(e, "max_steps", c.engine.max_steps, "engine");
        read(e, "w_acc", c.engine.w_acc, "engine");
        read(e, "w_cost", c.engine.w_cost, "engine");
        read(e, "acceptance_bonus", c.engine.acceptance_bonus, "engine");
        read(e, "transmission_in_step_delay", c.engine.transmission_in_step_delay, "engine");
        read(e, "node_vm_action_space", c.engine.node_vm_action_space, "engine");
        read(e, "levels", c.levels, "engine");
    }
    if (j.contains("dqn")) {
        auto const& d = j.at("dqn");
        check_keys(d,
                   {"hidden_layers", "hidden_units", "learning_rate", "discount", "epsilon_start", "epsilon_decay",
                    "epsilon_min", "replay_capacity", "batch_size", "target", "target_sync_interval", "optimizer",
                    "mask_invalid", "reject_zeroes_episode", "checkpoint"},
                   "dqn");
        read(d, "hidden_layers", c.dqn.hidden_layers, "dqn");
        read(d, "hidden_units", c.dqn.hidden_units, "dqn");
        read(d, "learning_rate", c.dqn.learning_rate, "dqn");
        read(d, "discount", c.dqn.discount, "dqn");
        read(d, "epsilon_start", c.dqn.epsilon_start, "dqn");
        read(d, "epsilon_decay", c.dqn.epsilon_decay, "dqn");
        read(d, "epsilon_min", c.dqn.epsilon_min, "dqn");
        read(d, "replay_capacity", c.dqn.replay_capacity, "dqn");
        read(d, "batch_size", c.dqn.batch_size, "dqn");
        read(d, "target_sync_interval", c.dqn.target_sync_interval, "dqn");
        read(d, "mask_invalid", c.dqn.mask_invalid, "dqn");
        read(d, "reject_zeroes_episode", c.reject_zeroes_episode, "dqn");
        read_opt(d, "checkpoint", c.checkpoint_in, "dqn");
        if (d.contains("target")) {
            std::string t;
            read(d, "target", t, "dqn");
            if (t == "td") {
                c.dqn.target = TargetMode::td;
            } else if (t == "reward_only") {
                c.dqn.target = TargetMode::reward_only;
            } else {
                throw ConfigError("dqn.target must be 'td' or 'reward_only'");
            }
        }
        if (d.contains("optimizer")) {
            std::string o;
            read(d, "optimizer", o, "dqn");
            if (o == "sgd") {
                c.dqn.optimizer = OptimizerKind::sgd;
            } else if (o == "adam") {
                c.dqn.optimizer = OptimizerKind::adam;
            } else {
                throw ConfigError("dqn.optimizer must be 'sgd' or 'adam'");
            }
        }
    }
    if (j.contains("tabu")) {
        auto const& t = j.at("tabu");
        check_keys(t, {"iterations", "tenure", "k_paths"}, "tabu");
        read(t, "iterations", c.tabu.iterations, "tabu");
        read(t, "tenure", c.tabu.tenure, "tabu");
        read(t, "k_paths", c.tabu.k_paths, "tabu");
    }
    if (j.contains("greedy")) {
        auto const& g = j.at("greedy");
        check_keys(g, {"route_weight"}, "greedy");
        if (g.contains("route_weight")) {
            std::string w;
            read(g, "route_weight", w, "greedy");
            if (w == "propagation_delay") {
                c.greedy_route = RouteWeight::propagation_delay;
            } else if (w == "link_cost") {
                c.greedy_route = RouteWeight::link_cost;
            } else {
                throw ConfigError("greedy.route_weight must be 'propagation_delay' or 'link_cost'");
            }
        }
        c.tabu.route_weight = c.greedy_route;
    }
    if (j.contains("oracle")) {
        check_keys(j.at("oracle"), {"max_hops"}, "oracle");
        read(j.at("oracle"), "max_hops", c.oracle_max_hops, "oracle");
    }
    if (j.contains("metrics")) {
        auto const& m = j.at("metrics");
        check_keys(m, {"window", "anuc", "audit"}, "metrics");
        read(m, "window", c.window, "metrics");
        read(m, "audit", c.audit, "metrics");
        if (m.contains("anuc")) {
            std::string a;
            read(m, "anuc", a, "metrics");
            if (a == "per_request") {
                c.anuc = AnucMode::per_request;
            } else if (a == "per_slot") {
                c.anuc = AnucMode::per_slot;
            } else {
                throw ConfigError("metrics.anuc must be 'per_request' or 'per_slot'");
            }
        }
    }
    if (j.contains("output")) {
        auto const& o = j.at("output");
        check_keys(o, {"trace", "ledger_snapshot_interval", "checkpoint"}, "output");
        read(o, "trace", c.trace, "output");
        read(o, "ledger_snapshot_interval", c.ledger_snapshot_interval, "output");
        read(o, "checkpoint", c.save_checkpoint, "output");
    }
    validate(c);
    return c;
}

/// Full config with every default spelled out; config_from_json(config_to_json(c)) == c.
inline nlohmann::json config_to_json(RunConfig const& c)
{
    nlohmann::json j;
    j["seed"] = c.seed;
    j["scenario_seed"] = c.scenario_seed ? nlohmann::json(*c.scenario_seed) : nlohmann::json(nullptr);
    j["repetitions"] = c.repetitions;
    j["horizon"] = c.horizon;
    j["episodes"] = c.episodes ? nlohmann::json(*c.episodes) : nlohmann::json(nullptr);
    j["arrival_mean"] = c.arrival_mean;
    j["arrival_process"] = c.arrival_process == ArrivalProcess::uniform ? "uniform" : "poisson";
    j["lifetime_mean"] = c.lifetime_mean;
    j["policy"] = to_string(c.policy);
    auto const& g = c.generator;
    j["topology"] = {{"file", c.topology_file ? nlohmann::json(*c.topology_file) : nlohmann::json(nullptr)},
                     {"nodes", g.nodes},
                     {"target_degree", g.target_degree},
                     {"vm_min", g.vm_min},
                     {"vm_max", g.vm_max},
                     {"vm_capacity_min", g.vm_capacity_min},
                     {"vm_capacity_max", g.vm_capacity_max},
                     {"link_capacity_min", g.link_capacity_min},
                     {"link_capacity_max", g.link_capacity_max},
                     {"prop_delay_min_ms", g.prop_delay_min_ms},
                     {"prop_delay_max_ms", g.prop_delay_max_ms}};
    nlohmann::json cat = {{"file", c.catalog_file ? nlohmann::json(*c.catalog_file) : nlohmann::json(nullptr)},
                          {"extra_functions", c.extra_functions}};
    if (c.catalog_inline) {
        cat["services"] = *c.catalog_inline;
    }
    j["catalog"] = cat;
    j["weights"] = {{"min", c.weight_min}, {"max", c.weight_max}};
    j["engine"] = {{"max_steps", c.engine.max_steps},
                   {"w_acc", c.engine.w_acc},
                   {"w_cost", c.engine.w_cost},
                   {"acceptance_bonus", c.engine.acceptance_bonus},
                   {"transmission_in_step_delay", c.engine.transmission_in_step_delay},
                   {"node_vm_action_space", c.engine.node_vm_action_space},
                   {"levels", c.levels}};
    j["dqn"] = {{"hidden_layers", c.dqn.hidden_layers},
                {"hidden_units", c.dqn.hidden_units},
                {"learning_rate", c.dqn.learning_rate},
                {"discount", c.dqn.discount},
                {"epsilon_start", c.dqn.epsilon_start},
                {"epsilon_decay", c.dqn.epsilon_decay},
                {"epsilon_min", c.dqn.epsilon_min},
                {"replay_capacity", c.dqn.replay_capacity},
                {"batch_size", c.dqn.batch_size},
                {"target", c.dqn.target == TargetMode::td ? "td" : "reward_only"},
                {"target_sync_interval", c.dqn.target_sync_interval},
                {"optimizer", c.dqn.optimizer == OptimizerKind::sgd ? "sgd" : "adam"},
                {"mask_invalid", c.dqn.mask_invalid},
                {"reject_zeroes_episode", c.reject_zeroes_episode},
                {"checkpoint", c.checkpoint_in ? nlohmann::json(*c.checkpoint_in) : nlohmann::json(nullptr)}};
    j["tabu"] = {{"iterations", c.tabu.iterations}, {"tenure", c.tabu.tenure}, {"k_paths", c.tabu.k_paths}};
    j["greedy"] = {{"route_weight",
                    c.greedy_route == RouteWeight::propagation_delay ? "propagation_delay" : "link_cost"}};
    j["oracle"] = {{"max_hops", c.oracle_max_hops}};
    j["metrics"] = {{"window", c.window},
                    {"anuc", c.anuc == AnucMode::per_request ? "per_request" : "per_slot"},
                    {"audit", c.audit}};
    j["output"] = {{"trace", c.trace},
                   {"ledger_snapshot_interval", c.ledger_snapshot_interval},
                   {"checkpoint", c.save_checkpoint}};
    return j;
}

inline RunConfig load_config(std::filesystem::path const& file)
{
    std::ifstream in(file);
    if (!in) {
        throw ConfigError("cannot open config file " + file.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (nlohmann::json::exception const& e) {
        throw ConfigError(file.string() + ": " + e.what());
    }
    return config_from_json(j, file.parent_path());
}

/// 64-bit FNV-1a of the canonical config JSON, as 16 hex digits.
inline std::string config_hash(RunConfig const& c)
{
    std::string const text = config_to_json(c).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/**
 * Sets one field by name. Accepts dotted JSON paths into the canonical
 * config ("engine.w_cost") and the short aliases arrival_mean,
 * lifetime_mean, nodes, w_cost, w_acc, learning_rate, horizon, episodes.
 */
inline RunConfig with_param(RunConfig const& c, std::string const& name, nlohmann::json const& value)
{
    static std::map<std::string, std::string> const aliases{
        {"nodes", "topology.nodes"},         {"target_degree", "topology.target_degree"},
        {"w_cost", "engine.w_cost"},         {"w_acc", "engine.w_acc"},
        {"acceptance_bonus", "engine.acceptance_bonus"},
        {"learning_rate", "dqn.learning_rate"}, {"discount", "dqn.discount"},
        {"tabu_iterations", "tabu.iterations"},
    };
    std::string path = name;
    if (auto it = aliases.find(name); it != aliases.end()) {
        path = it->second;
    }
    nlohmann::json j = config_to_json(c);
    nlohmann::json* node = &j;
    std::size_t start = 0;
    while (true) {
        std::size_t const dot = path.find('.', start);
        std::string const key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (!node->is_object() || !node->contains(key)) {
            throw ConfigError("unknown sweep parameter '" + name + "'");
        }
        node = &(*node)[key];
        if (dot == std::string::npos) {
            break;
        }
        start = dot + 1;
    }
    if (node->is_object() || node->is_array()) {
        throw ConfigError("sweep parameter '" + name + "' is not a scalar");
    }
    *node = value;
    return config_from_json(j, c.base_dir);
}

} // namespace nfv

#endif // NFV_CONFIG_HPP
