#ifndef NFV_POLICIES_HPP
#define NFV_POLICIES_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "delay_cost.hpp"
#include "dqn.hpp"
#include "ledger.hpp"
#include "placement.hpp"
#include "topology.hpp"

namespace nfv {

/// One engine step as written to the optional trace log.
struct StepRecord
{
    std::size_t j = 0;
    std::optional<std::size_t> action; ///< empty for egress finishing placements
    ActionKind kind = ActionKind::forward;
    NodeId node = 0;
    VmId vm = 0;
    double elapsed = 0.0;
    double cost = 0.0;
    double reward = 0.0;
    EpisodeStatus status = EpisodeStatus::live;
};

inline std::string_view to_string(EpisodeStatus s)
{
    switch (s) {
    case EpisodeStatus::live: return "live";
    case EpisodeStatus::at_egress: return "at_egress";
    case EpisodeStatus::accepted: return "accepted";
    case EpisodeStatus::rejected: return "rejected";
    }
    return "unknown";
}

/// A finished episode: the outcome and, when accepted, the charges to commit.
struct Decision
{
    PlacementOutcome outcome;
    Allocation allocation;
    std::vector<StepRecord> trace;
};

/// Shared, read-only problem data handed to every policy.
struct PolicyEnv
{
    Topology const* topology = nullptr;
    CostWeights const* weights = nullptr;
    EngineConfig engine;
    std::size_t service_count = 1;
};

class Policy
{
public:
    virtual ~Policy() = default;
    virtual std::string_view name() const = 0;
    /// Runs one request through the engine against the current ledger. The ledger is not modified.
    virtual Decision place(ServiceSpec const& spec, ResourceLedger const& ledger) = 0;
};

namespace detail {

inline StepResult traced_step(Episode& ep, std::size_t a, std::vector<StepRecord>* trace)
{
    StepResult r = ep.step(a);
    if (trace) {
        trace->push_back({ep.steps(), a, r.kind, r.node, r.vm, ep.elapsed(), r.cost, r.reward, r.status});
    }
    return r;
}

inline StepResult traced_finish(Episode& ep, std::span<VmId const> vms, std::vector<StepRecord>* trace)
{
    StepResult r = ep.finish_at_egress(vms);
    if (trace) {
        trace->push_back({ep.steps(), std::nullopt, r.kind, r.node, r.vm, ep.elapsed(), r.cost, r.reward, r.status});
    }
    return r;
}

inline Decision finish_decision(Episode const& ep, std::vector<StepRecord> trace)
{
    Decision d;
    d.outcome = ep.outcome();
    if (d.outcome.accepted) {
        d.allocation = ep.staged().allocation();
    }
    d.trace = std::move(trace);
    return d;
}

} // namespace detail

/**
 * Explicit route and placement: functions are pinned to hop positions of a
 * loop-free ingress-to-egress path. Position 0 is the ingress itself and is
 * never used; intermediate positions host at most one function each and the
 * egress position (hops.size() - 1) hosts any number.
 */
struct Plan
{
    std::vector<NodeId> hops;
    std::vector<std::size_t> position;
    std::vector<VmId> vms;

    friend bool operator==(Plan const&, Plan const&) = default;
};

/// Monotone positions with at most one function per intermediate hop, VMs on their hop's node.
inline bool plan_is_well_formed(Topology const& topology, Plan const& plan)
{
    if (plan.hops.size() < 2 || plan.position.size() != plan.vms.size()) {
        return false;
    }
    std::size_t const last = plan.hops.size() - 1;
    for (std::size_t i = 0; i < plan.position.size(); ++i) {
        std::size_t const p = plan.position[i];
        if (p == 0 || p > last || topology.vm(plan.vms[i]).node != plan.hops[p]) {
            return false;
        }
        if (i > 0 && (p < plan.position[i - 1] || (p == plan.position[i - 1] && p != last))) {
            return false;
        }
    }
    return true;
}

/// Replays a plan through the engine, one hop per step.
inline Decision execute_plan(Episode& ep, Plan const& plan, Topology const& topology, bool keep_trace = false)
{
    if (!plan_is_well_formed(topology, plan) || plan.position.size() != ep.spec().function_count()) {
        throw std::invalid_argument("malformed plan");
    }
    std::vector<StepRecord> trace;
    std::vector<StepRecord>* tp = keep_trace ? &trace : nullptr;
    std::size_t const last = plan.hops.size() - 1;
    std::size_t f = 0;
    for (std::size_t i = 1; i <= last && ep.status() == EpisodeStatus::live; ++i) {
        NodeId const node = plan.hops[i];
        if (f < plan.position.size() && plan.position[f] == i) {
            detail::traced_step(ep, encode_action({plan.vms[f], ActionKind::place}), tp);
            ++f;
        } else {
            detail::traced_step(ep, encode_action({topology.vms_on(node).front(), ActionKind::forward}), tp);
        }
    }
    if (ep.at_egress()) {
        std::span<VmId const> rest(plan.vms.data() + f, plan.vms.size() - f);
        detail::traced_finish(ep, rest, tp);
    }
    if (!ep.finished()) {
        throw std::logic_error("plan ended before reaching egress");
    }
    return detail::finish_decision(ep, std::move(trace));
}

/// Route as a plan; egress-placed functions and unplaced leftovers go to egress.
inline Plan plan_from_outcome(Topology const& topology, ServiceSpec const& spec, PlacementOutcome const& o,
                              std::vector<NodeId> const& hops)
{
    Plan plan;
    plan.hops = hops;
    std::size_t const last = hops.size() - 1;
    for (auto const& p : o.placements) {
        auto it = std::find(hops.begin() + 1, hops.end(), p.node);
        plan.position.push_back(it == hops.end() ? last : static_cast<std::size_t>(it - hops.begin()));
        plan.vms.push_back(p.vm);
    }
    while (plan.position.size() < spec.function_count()) {
        plan.position.push_back(last);
        plan.vms.push_back(topology.vms_on(hops[last]).front());
    }
    if (!plan_is_well_formed(topology, plan)) {
        for (std::size_t i = 0; i < plan.position.size(); ++i) {
            plan.position[i] = last;
            plan.vms[i] = topology.vms_on(hops[last]).front();
        }
    }
    return plan;
}

enum class RouteWeight
{
    propagation_delay,
    link_cost
};

/// Shortest paths over non-negative link weights with optional removed nodes and links.
class RouteFinder
{
public:
    RouteFinder(Topology const& topology, std::vector<double> link_weight)
        : topology_(&topology), weight_(std::move(link_weight))
    {
        if (weight_.size() != topology.link_count()) {
            throw std::invalid_argument("one weight per link required");
        }
        for (double w : weight_) {
            if (!(w >= 0.0)) {
                throw std::invalid_argument("link weights must be non-negative");
            }
        }
    }

    static RouteFinder make(Topology const& topology, CostWeights const& weights, RouteWeight kind)
    {
        std::vector<double> w;
        for (auto const& link : topology.links()) {
            w.push_back(kind == RouteWeight::propagation_delay ? link.prop_delay_s : weights.link.at(link.id));
        }
        return RouteFinder(topology, std::move(w));
    }

    double path_weight(Path const& p) const
    {
        double s = 0.0;
        for (LinkId l : p.links(*topology_)) {
            s += weight_[l];
        }
        return s;
    }

    /// Dijkstra; ties go to the lower node id first.
    std::optional<Path> shortest(NodeId src, NodeId dst, std::vector<bool> const& banned_nodes = {},
                                 std::set<LinkId> const& banned_links = {}) const
    {
        std::size_t const n = topology_->node_count();
        double const inf = std::numeric_limits<double>::infinity();
        std::vector<double> dist(n, inf);
        std::vector<NodeId> prev(n, n);
        using Item = std::pair<double, NodeId>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        dist[src] = 0.0;
        pq.emplace(0.0, src);
        while (!pq.empty()) {
            auto [d, u] = pq.top();
            pq.pop();
            if (d > dist[u]) {
                continue;
            }
            if (u == dst) {
                break;
            }
            for (NodeId v : topology_->neighbors(u)) {
                if (!banned_nodes.empty() && banned_nodes[v]) {
                    continue;
                }
                LinkId const l = *topology_->link_between(u, v);
                if (banned_links.contains(l)) {
                    continue;
                }
                double const nd = d + weight_[l];
                if (nd < dist[v]) {
                    dist[v] = nd;
                    prev[v] = u;
                    pq.emplace(nd, v);
                }
            }
        }
        if (dist[dst] == inf) {
            return std::nullopt;
        }
        Path p;
        for (NodeId v = dst; v != src; v = prev[v]) {
            p.hops.push_back(v);
        }
        p.hops.push_back(src);
        std::reverse(p.hops.begin(), p.hops.end());
        return p;
    }

    /// Yen's k loopless shortest paths, by weight then hop sequence.
    std::vector<Path> k_shortest(NodeId src, NodeId dst, std::size_t k) const
    {
        std::vector<Path> result;
        auto first = shortest(src, dst);
        if (!first || k == 0) {
            return result;
        }
        result.push_back(*first);
        auto better = [this](Path const& a, Path const& b) {
            double const wa = path_weight(a);
            double const wb = path_weight(b);
            return wa != wb ? wa < wb : a.hops < b.hops;
        };
        std::vector<Path> candidates;
        while (result.size() < k) {
            Path const& last = result.back();
            for (std::size_t i = 0; i + 1 < last.hops.size(); ++i) {
                NodeId const spur = last.hops[i];
                std::vector<NodeId> root(last.hops.begin(), last.hops.begin() + static_cast<std::ptrdiff_t>(i) + 1);
                std::set<LinkId> banned_links;
                for (auto const& p : result) {
                    if (p.hops.size() > i + 1 && std::equal(root.begin(), root.end(), p.hops.begin())) {
                        banned_links.insert(*topology_->link_between(p.hops[i], p.hops[i + 1]));
                    }
                }
                std::vector<bool> banned_nodes(topology_->node_count(), false);
                for (std::size_t r = 0; r < i; ++r) {
                    banned_nodes[root[r]] = true;
                }
                auto spur_path = shortest(spur, dst, banned_nodes, banned_links);
                if (!spur_path) {
                    continue;
                }
                Path total{root};
                total.hops.insert(total.hops.end(), spur_path->hops.begin() + 1, spur_path->hops.end());
                if (std::find(candidates.begin(), candidates.end(), total) == candidates.end()
                    && std::find(result.begin(), result.end(), total) == result.end()) {
                    candidates.push_back(std::move(total));
                }
            }
            if (candidates.empty()) {
                break;
            }
            auto it = std::min_element(candidates.begin(), candidates.end(), better);
            result.push_back(*it);
            candidates.erase(it);
        }
        return result;
    }

private:
    Topology const* topology_;
    std::vector<double> weight_;
};

/**
 * Walks a fixed path: each intermediate hop takes the next pending function
 * on its first VM with room, otherwise the hop is a plain forward; whatever
 * is left is placed first-fit at egress.
 */
inline Decision greedy_walk(Episode& ep, Topology const& topology, Path const& path, bool keep_trace = false)
{
    std::vector<StepRecord> trace;
    std::vector<StepRecord>* tp = keep_trace ? &trace : nullptr;
    NodeId const egress = ep.spec().egress;
    for (std::size_t i = 1; i < path.hops.size() && ep.status() == EpisodeStatus::live; ++i) {
        NodeId const node = path.hops[i];
        std::optional<VmId> vm;
        if (node != egress && ep.next_function() < ep.spec().function_count()) {
            vm = ep.first_fit(node, ep.next_function());
        }
        std::size_t const a = vm ? encode_action({*vm, ActionKind::place})
                                 : encode_action({topology.vms_on(node).front(), ActionKind::forward});
        detail::traced_step(ep, a, tp);
    }
    if (ep.at_egress()) {
        detail::traced_finish(ep, {}, tp);
    }
    if (!ep.finished()) {
        throw std::logic_error("greedy path does not end at egress");
    }
    return detail::finish_decision(ep, std::move(trace));
}

/// Shortest path by propagation delay (or link cost) plus first-fit placement along it.
class GreedyPolicy final : public Policy
{
public:
    GreedyPolicy(PolicyEnv env, RouteWeight weight = RouteWeight::propagation_delay)
        : env_(env), routes_(RouteFinder::make(*env.topology, *env.weights, weight))
    {
    }

    std::string_view name() const override { return "greedy"; }

    Decision place(ServiceSpec const& spec, ResourceLedger const& ledger) override
    {
        Episode ep(*env_.topology, spec, *env_.weights, ledger, env_.engine, env_.service_count);
        auto path = routes_.shortest(spec.ingress, spec.egress);
        if (!path) {
            throw InvariantViolation("no route between ingress and egress in a connected topology");
        }
        return greedy_walk(ep, *env_.topology, *path, keep_trace_);
    }

    void set_trace(bool on) { keep_trace_ = on; }

private:
    PolicyEnv env_;
    RouteFinder routes_;
    bool keep_trace_ = false;
};

struct TabuConfig
{
    std::size_t iterations = 50; ///< E; 1 returns the greedy solution
    std::size_t tenure = 7;
    std::size_t k_paths = 4;
    RouteWeight route_weight = RouteWeight::propagation_delay;
};

/**
 * Tabu search seeded with the greedy solution. Moves either relocate one
 * function to another (hop, VM) slot on the current path or switch to the
 * next of the k shortest paths with a fresh greedy placement. A move back
 * to a recently vacated slot or path is tabu unless it beats the best cost
 * found so far.
 */
class TabuPolicy final : public Policy
{
public:
    TabuPolicy(PolicyEnv env, TabuConfig config, std::uint64_t seed)
        : env_(env), config_(config), routes_(RouteFinder::make(*env.topology, *env.weights, config.route_weight)),
          rng_(seed)
    {
        if (config.iterations == 0) {
            throw std::invalid_argument("tabu needs at least one iteration");
        }
    }

    std::string_view name() const override { return "tabu"; }

    Decision place(ServiceSpec const& spec, ResourceLedger const& ledger) override
    {
        Topology const& topo = *env_.topology;
        auto fresh = [&] { return Episode(topo, spec, *env_.weights, ledger, env_.engine, env_.service_count); };

        std::vector<Path> paths = routes_.k_shortest(spec.ingress, spec.egress, std::max<std::size_t>(1, config_.k_paths));
        if (paths.empty()) {
            throw InvariantViolation("no route between ingress and egress in a connected topology");
        }
        Episode first = fresh();
        Decision best = greedy_walk(first, topo, paths.front());
        if (config_.iterations == 1) {
            return best;
        }
        double best_cost = best.outcome.accepted ? best.outcome.cost : inf;

        struct Current
        {
            std::size_t path = 0;
            Plan plan;
            double cost = inf;
        };
        Current cur{0, plan_from_outcome(topo, spec, best.outcome, paths.front().hops), best_cost};

        struct Tabu
        {
            std::size_t function; // npos marks a path entry
            std::size_t value;    // VM id, or path index
            std::size_t expires;
        };
        std::vector<Tabu> tabu;
        constexpr std::size_t npos = static_cast<std::size_t>(-1);
        auto is_tabu = [&](std::size_t function, std::size_t value, std::size_t it) {
            return std::any_of(tabu.begin(), tabu.end(), [&](Tabu const& t) {
                return t.function == function && t.value == value && t.expires > it;
            });
        };

        struct Move
        {
            Current next;
            std::size_t function;
            std::size_t vacated;
        };

        for (std::size_t it = 1; it < config_.iterations; ++it) {
            std::vector<Move> moves;
            std::size_t const last = cur.plan.hops.size() - 1;
            std::size_t const fcount = cur.plan.position.size();
            for (std::size_t i = 0; i < fcount; ++i) {
                std::size_t lo = 1;
                std::size_t hi = last;
                if (i > 0) {
                    lo = cur.plan.position[i - 1] == last ? last : cur.plan.position[i - 1] + 1;
                }
                if (i + 1 < fcount && cur.plan.position[i + 1] != last) {
                    hi = cur.plan.position[i + 1] - 1;
                }
                for (std::size_t p = lo; p <= hi; ++p) {
                    for (VmId v : topo.vms_on(cur.plan.hops[p])) {
                        if (p == cur.plan.position[i] && v == cur.plan.vms[i]) {
                            continue;
                        }
                        Current next{cur.path, cur.plan, inf};
                        next.plan.position[i] = p;
                        next.plan.vms[i] = v;
                        moves.push_back({std::move(next), i, cur.plan.vms[i]});
                    }
                }
            }
            if (paths.size() > 1) {
                std::size_t const k = (cur.path + 1) % paths.size();
                Episode ep = fresh();
                Decision d = greedy_walk(ep, topo, paths[k]);
                moves.push_back({Current{k, plan_from_outcome(topo, spec, d.outcome, paths[k].hops), inf}, npos,
                                 cur.path});
            }
            if (moves.empty()) {
                break;
            }

            std::vector<std::size_t> admissible;
            double chosen_cost = inf;
            for (std::size_t m = 0; m < moves.size(); ++m) {
                Episode ep = fresh();
                Decision d = execute_plan(ep, moves[m].next.plan, topo);
                moves[m].next.cost = d.outcome.accepted ? d.outcome.cost : inf;
                std::size_t const value =
                    moves[m].function == npos ? moves[m].next.path : moves[m].next.plan.vms[moves[m].function];
                bool const aspiration = moves[m].next.cost < best_cost;
                if (is_tabu(moves[m].function, value, it) && !aspiration) {
                    continue;
                }
                if (moves[m].next.cost < chosen_cost) {
                    chosen_cost = moves[m].next.cost;
                    admissible.assign(1, m);
                } else if (moves[m].next.cost == chosen_cost) {
                    admissible.push_back(m);
                }
            }
            if (admissible.empty()) {
                break;
            }
            std::size_t const pick =
                admissible[std::uniform_int_distribution<std::size_t>(0, admissible.size() - 1)(rng_)];
            Move& mv = moves[pick];
            tabu.push_back({mv.function, mv.vacated, it + config_.tenure});
            cur = std::move(mv.next);
            if (cur.cost < best_cost) {
                best_cost = cur.cost;
                Episode ep = fresh();
                best = execute_plan(ep, cur.plan, topo);
            }
        }
        if (keep_trace_ && best.outcome.accepted) {
            Episode ep = fresh();
            best = execute_plan(ep, plan_from_outcome(topo, spec, best.outcome, best.outcome.hops), topo, true);
        }
        return best;
    }

    void set_trace(bool on) { keep_trace_ = on; }

private:
    static constexpr double inf = std::numeric_limits<double>::infinity();

    PolicyEnv env_;
    TabuConfig config_;
    RouteFinder routes_;
    std::mt19937_64 rng_;
    bool keep_trace_ = false;
};

struct OracleLimits
{
    std::size_t max_nodes = 5;
    std::size_t max_vms_per_node = 2;
    std::size_t max_functions = 3;
    std::size_t max_hops = 5;
};

/// Calls visit(plan) for every monotone function-to-(hop, VM) assignment on the path.
template <class Visit>
void for_each_assignment(Topology const& topology, std::vector<NodeId> const& hops, std::size_t functions,
                         Visit&& visit)
{
    Plan plan{hops, std::vector<std::size_t>(functions), std::vector<VmId>(functions)};
    std::size_t const last = hops.size() - 1;
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t lo) {
        if (i == functions) {
            visit(static_cast<Plan const&>(plan));
            return;
        }
        for (std::size_t p = lo; p <= last; ++p) {
            for (VmId v : topology.vms_on(hops[p])) {
                plan.position[i] = p;
                plan.vms[i] = v;
                rec(i + 1, p == last ? last : p + 1);
            }
        }
    };
    rec(0, 1);
}

/**
 * Exhaustive minimum over simple paths and placements. Refuses instances
 * beyond `limits`. Among equal-cost solutions the first in enumeration
 * order (paths by length then node sequence, then positions and VMs
 * ascending) wins.
 */
class OraclePolicy final : public Policy
{
public:
    explicit OraclePolicy(PolicyEnv env, OracleLimits limits = {}) : env_(env), limits_(limits)
    {
        Topology const& t = *env.topology;
        if (t.node_count() > limits.max_nodes || t.max_vms_per_node() > limits.max_vms_per_node) {
            throw std::invalid_argument("instance too large for the exhaustive oracle");
        }
    }

    std::string_view name() const override { return "oracle"; }

    Decision place(ServiceSpec const& spec, ResourceLedger const& ledger) override
    {
        if (spec.function_count() > limits_.max_functions) {
            throw std::invalid_argument("chain too long for the exhaustive oracle");
        }
        Topology const& topo = *env_.topology;
        std::optional<Plan> best_plan;
        double best_cost = std::numeric_limits<double>::infinity();
        std::optional<Decision> first_reject;
        for (Path const& path : enumerate_simple_paths(topo, spec.ingress, spec.egress, limits_.max_hops)) {
            if (path.hops.size() < 2) {
                continue;
            }
            for_each_assignment(topo, path.hops, spec.function_count(), [&](Plan const& plan) {
                Episode ep(topo, spec, *env_.weights, ledger, env_.engine, env_.service_count);
                Decision d = execute_plan(ep, plan, topo);
                if (d.outcome.accepted && d.outcome.cost < best_cost) {
                    best_cost = d.outcome.cost;
                    best_plan = plan;
                } else if (!d.outcome.accepted && !first_reject) {
                    first_reject = std::move(d);
                }
            });
        }
        if (best_plan) {
            Episode ep(topo, spec, *env_.weights, ledger, env_.engine, env_.service_count);
            return execute_plan(ep, *best_plan, topo, keep_trace_);
        }
        if (first_reject) {
            return std::move(*first_reject);
        }
        Decision d;
        d.outcome.reason = RejectReason::step_limit;
        d.outcome.hops = {spec.ingress};
        return d;
    }

    void set_trace(bool on) { keep_trace_ = on; }

private:
    PolicyEnv env_;
    OracleLimits limits_;
    bool keep_trace_ = false;
};

struct DqnPolicyOptions
{
    bool learn = true;
    /// Store a rejected episode's transitions with zero reward, so that only
    /// completed requests earn their per-step rewards.
    bool reject_zeroes_episode = true;
    std::uint32_t levels = 1000; ///< I
};

/**
 * Drives the engine with the agent's epsilon-greedy choices. Transitions
 * are stored once the episode ends, and one minibatch update runs per
 * stored transition. The reward of the egress finishing placements is
 * credited to the step that reached egress.
 */
class DqnPolicy final : public Policy
{
public:
    DqnPolicy(PolicyEnv env, DqnAgent& agent, DqnPolicyOptions options = {})
        : env_(env), agent_(&agent), options_(options)
    {
        std::size_t const actions = action_space_size(*env.topology, env.engine.node_vm_action_space);
        if (agent.network().input_size() != state_size(*env.topology) || agent.network().output_size() != actions) {
            throw std::invalid_argument("agent network shape does not match the topology");
        }
    }

    std::string_view name() const override { return "dqn"; }

    Decision place(ServiceSpec const& spec, ResourceLedger const& ledger) override
    {
        Topology const& topo = *env_.topology;
        Episode ep(topo, spec, *env_.weights, ledger, env_.engine, env_.service_count);
        std::vector<StepRecord> trace;
        std::vector<StepRecord>* tp = keep_trace_ ? &trace : nullptr;
        std::vector<Transition> episode;
        std::vector<double> state = encode_state(topo, ledger, &ep.staged(), ep.context(), options_.levels);
        while (ep.status() == EpisodeStatus::live) {
            std::vector<std::size_t> const allowed = ep.possible_actions();
            std::size_t const a = agent_->act(state, allowed);
            StepResult r = detail::traced_step(ep, a, tp);
            if (ep.at_egress()) {
                r.reward += detail::traced_finish(ep, {}, tp).reward;
            }
            Transition t;
            t.state = std::move(state);
            t.action = a;
            t.reward = ep.status() == EpisodeStatus::rejected ? 0.0 : r.reward;
            t.terminal = ep.finished();
            state = encode_state(topo, ledger, &ep.staged(), ep.context(), options_.levels);
            t.next_state = state;
            episode.push_back(std::move(t));
        }
        if (options_.learn) {
            bool const zero = options_.reject_zeroes_episode && ep.status() == EpisodeStatus::rejected;
            for (auto& t : episode) {
                if (zero) {
                    t.reward = 0.0;
                }
                agent_->remember(std::move(t));
                agent_->train();
            }
            agent_->end_episode();
        }
        return detail::finish_decision(ep, std::move(trace));
    }

    void set_trace(bool on) { keep_trace_ = on; }

private:
    PolicyEnv env_;
    DqnAgent* agent_;
    DqnPolicyOptions options_;
    bool keep_trace_ = false;
};

} // namespace nfv

#endif // NFV_POLICIES_HPP
