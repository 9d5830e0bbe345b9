#ifndef NFV_TOPOLOGY_HPP
#define NFV_TOPOLOGY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <queue>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "amount.hpp"
#include "errors.hpp"

namespace nfv {

using NodeId = std::size_t;
using VmId = std::size_t;
using LinkId = std::size_t;

struct Vm
{
    VmId id = 0;
    NodeId node = 0;
    Amount capacity; ///< mega-cycles per second
};

struct Link
{
    LinkId id = 0;
    NodeId a = 0;
    NodeId b = 0;
    Amount capacity; ///< megabits per second
    double prop_delay_s = 0.0;

    NodeId other(NodeId n) const { return n == a ? b : a; }
};

struct LinkSpec
{
    NodeId a = 0;
    NodeId b = 0;
    Amount capacity;
    double prop_delay_s = 0.0;
};

/**
 * Physical substrate: nodes hosting VMs, joined by undirected capacitated
 * links. VM ids are dense and node-major, so the VMs of node 0 come first.
 *
 * A Topology is immutable once created and validated.
 */
class Topology
{
public:
    static Topology create(std::vector<std::vector<Amount>> vm_capacities, std::vector<LinkSpec> links)
    {
        Topology t;
        std::size_t const n = vm_capacities.size();
        if (n == 0) {
            throw TopologyError("topology needs at least one node");
        }
        t.node_vms_.resize(n);
        for (NodeId node = 0; node < n; ++node) {
            if (vm_capacities[node].empty()) {
                throw TopologyError("node " + std::to_string(node) + " hosts no VM");
            }
            for (Amount cap : vm_capacities[node]) {
                if (cap <= Amount{}) {
                    throw TopologyError("VM capacity must be positive on node " + std::to_string(node));
                }
                VmId const id = t.vms_.size();
                t.vms_.push_back(Vm{id, node, cap});
                t.node_vms_[node].push_back(id);
            }
        }
        t.adjacency_.assign(n * n, no_link);
        for (auto const& spec : links) {
            if (spec.a >= n || spec.b >= n) {
                throw TopologyError("link endpoint out of range");
            }
            if (spec.a == spec.b) {
                throw TopologyError("self-loop on node " + std::to_string(spec.a));
            }
            if (t.adjacency_[spec.a * n + spec.b] != no_link) {
                throw TopologyError("duplicate link " + std::to_string(spec.a) + "-" + std::to_string(spec.b));
            }
            if (spec.capacity <= Amount{}) {
                throw TopologyError("link capacity must be positive");
            }
            if (!(spec.prop_delay_s >= 0.0) || !std::isfinite(spec.prop_delay_s)) {
                throw TopologyError("propagation delay must be finite and non-negative");
            }
            LinkId const id = t.links_.size();
            t.links_.push_back(Link{id, spec.a, spec.b, spec.capacity, spec.prop_delay_s});
            t.adjacency_[spec.a * n + spec.b] = id;
            t.adjacency_[spec.b * n + spec.a] = id;
        }
        t.neighbors_.resize(n);
        for (NodeId a = 0; a < n; ++a) {
            for (NodeId b = 0; b < n; ++b) {
                if (t.adjacency_[a * n + b] != no_link) {
                    t.neighbors_[a].push_back(b);
                }
            }
        }
        if (!t.is_connected()) {
            throw TopologyError("topology is not connected");
        }
        return t;
    }

    std::size_t node_count() const { return node_vms_.size(); }
    std::size_t vm_count() const { return vms_.size(); }
    std::size_t link_count() const { return links_.size(); }

    Vm const& vm(VmId id) const { return vms_.at(id); }
    Link const& link(LinkId id) const { return links_.at(id); }
    std::span<Vm const> vms() const { return vms_; }
    std::span<Link const> links() const { return links_; }

    std::span<VmId const> vms_on(NodeId n) const { return node_vms_.at(n); }

    std::optional<LinkId> link_between(NodeId a, NodeId b) const
    {
        check_node(a);
        check_node(b);
        LinkId const id = adjacency_[a * node_count() + b];
        if (id == no_link) {
            return std::nullopt;
        }
        return id;
    }

    /// l_{a,b}: 1 iff a link record joins a and b.
    bool adjacent(NodeId a, NodeId b) const { return link_between(a, b).has_value(); }

    /// Directly connected nodes in ascending id order.
    std::vector<NodeId> const& neighbors(NodeId n) const
    {
        check_node(n);
        return neighbors_[n];
    }

    std::size_t max_vms_per_node() const
    {
        std::size_t m = 0;
        for (auto const& v : node_vms_) {
            m = std::max(m, v.size());
        }
        return m;
    }

    /// Breadth-first reachability from node 0.
    bool is_connected() const
    {
        std::size_t const n = node_count();
        std::vector<bool> seen(n, false);
        std::queue<NodeId> frontier;
        seen[0] = true;
        frontier.push(0);
        std::size_t visited = 1;
        while (!frontier.empty()) {
            NodeId const cur = frontier.front();
            frontier.pop();
            for (NodeId next : neighbors_[cur]) {
                if (!seen[next]) {
                    seen[next] = true;
                    ++visited;
                    frontier.push(next);
                }
            }
        }
        return visited == n;
    }

    void check_node(NodeId n) const
    {
        if (n >= node_count()) {
            throw std::out_of_range("node id " + std::to_string(n) + " out of range");
        }
    }

private:
    static constexpr LinkId no_link = static_cast<LinkId>(-1);

    Topology() = default;

    std::vector<Vm> vms_;
    std::vector<std::vector<VmId>> node_vms_;
    std::vector<Link> links_;
    std::vector<LinkId> adjacency_;
    std::vector<std::vector<NodeId>> neighbors_;
};

/// Set of directly connected nodes.
inline std::vector<NodeId> neighbors(Topology const& topology, NodeId n)
{
    return topology.neighbors(n);
}

/// Ordered node sequence through the topology.
struct Path
{
    std::vector<NodeId> hops;

    std::size_t hop_count() const { return hops.empty() ? 0 : hops.size() - 1; }

    std::vector<LinkId> links(Topology const& topology) const
    {
        std::vector<LinkId> out;
        for (std::size_t i = 1; i < hops.size(); ++i) {
            auto id = topology.link_between(hops[i - 1], hops[i]);
            if (!id) {
                throw TopologyError("path hops " + std::to_string(hops[i - 1]) + "," + std::to_string(hops[i])
                                    + " are not adjacent");
            }
            out.push_back(*id);
        }
        return out;
    }

    /// Link-to-path indicator for the undirected link (a, b).
    bool contains_link(NodeId a, NodeId b) const
    {
        for (std::size_t i = 1; i < hops.size(); ++i) {
            if ((hops[i - 1] == a && hops[i] == b) || (hops[i - 1] == b && hops[i] == a)) {
                return true;
            }
        }
        return false;
    }

    friend bool operator==(Path const&, Path const&) = default;
};

/// Consecutive hops adjacent and no node repeated.
inline bool is_simple_path(Topology const& topology, Path const& path)
{
    if (path.hops.empty()) {
        return false;
    }
    std::vector<bool> seen(topology.node_count(), false);
    for (std::size_t i = 0; i < path.hops.size(); ++i) {
        NodeId const n = path.hops[i];
        if (n >= topology.node_count() || seen[n]) {
            return false;
        }
        seen[n] = true;
        if (i > 0 && !topology.adjacent(path.hops[i - 1], n)) {
            return false;
        }
    }
    return true;
}

/**
 * All simple paths from src to dst with at most max_hops links, ordered by
 * hop count and then lexicographically by node sequence.
 */
inline std::vector<Path> enumerate_simple_paths(Topology const& topology, NodeId src, NodeId dst,
                                                std::size_t max_hops)
{
    topology.check_node(src);
    topology.check_node(dst);
    std::vector<Path> out;
    std::vector<bool> on_stack(topology.node_count(), false);
    std::vector<NodeId> stack{src};
    on_stack[src] = true;

    std::function<void(NodeId)> dfs = [&](NodeId cur) {
        if (cur == dst) {
            out.push_back(Path{stack});
            return;
        }
        if (stack.size() - 1 >= max_hops) {
            return;
        }
        for (NodeId next : topology.neighbors(cur)) {
            if (on_stack[next]) {
                continue;
            }
            on_stack[next] = true;
            stack.push_back(next);
            dfs(next);
            stack.pop_back();
            on_stack[next] = false;
        }
    };
    dfs(src);

    std::stable_sort(out.begin(), out.end(), [](Path const& x, Path const& y) {
        if (x.hops.size() != y.hops.size()) {
            return x.hops.size() < y.hops.size();
        }
        return x.hops < y.hops;
    });
    return out;
}

/// Parameters of the random connected topology generator. Defaults follow the
/// reference scenario table (capacities in display units, delays in ms).
struct GeneratorParams
{
    std::size_t nodes = 10;
    double target_degree = 3.0;
    std::size_t vm_min = 1;
    std::size_t vm_max = 6;
    double vm_capacity_min = 200.0;
    double vm_capacity_max = 1200.0;
    double link_capacity_min = 1600.0;
    double link_capacity_max = 6400.0;
    double prop_delay_min_ms = 5.0;
    double prop_delay_max_ms = 15.0;
};

namespace detail {

/// Uniform labelled tree on n >= 2 nodes via a random Pruefer sequence.
inline std::vector<std::pair<NodeId, NodeId>> random_spanning_tree(std::size_t n, std::mt19937_64& rng)
{
    std::vector<std::pair<NodeId, NodeId>> edges;
    if (n < 2) {
        return edges;
    }
    if (n == 2) {
        edges.emplace_back(0, 1);
        return edges;
    }
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<NodeId> code(n - 2);
    for (auto& c : code) {
        c = pick(rng);
    }
    std::vector<std::size_t> degree(n, 1);
    for (NodeId c : code) {
        ++degree[c];
    }
    std::priority_queue<NodeId, std::vector<NodeId>, std::greater<>> leaves;
    for (NodeId i = 0; i < n; ++i) {
        if (degree[i] == 1) {
            leaves.push(i);
        }
    }
    for (NodeId c : code) {
        NodeId const leaf = leaves.top();
        leaves.pop();
        edges.emplace_back(std::min(leaf, c), std::max(leaf, c));
        if (--degree[c] == 1) {
            leaves.push(c);
        }
    }
    NodeId const u = leaves.top();
    leaves.pop();
    NodeId const v = leaves.top();
    edges.emplace_back(std::min(u, v), std::max(u, v));
    return edges;
}

} // namespace detail

/**
 * Random connected topology: a uniform random spanning tree, then extra
 * uniformly chosen edges until the mean degree reaches target_degree.
 * Identical parameters and seed give identical topologies.
 */
inline Topology generate_random_connected(GeneratorParams const& p, std::uint64_t seed)
{
    if (p.nodes == 0) {
        throw TopologyError("generator needs at least one node");
    }
    if (p.vm_min == 0 || p.vm_min > p.vm_max) {
        throw TopologyError("invalid VM count range");
    }
    if (!(p.vm_capacity_min > 0.0) || p.vm_capacity_min > p.vm_capacity_max || !(p.link_capacity_min > 0.0)
        || p.link_capacity_min > p.link_capacity_max || p.prop_delay_min_ms < 0.0
        || p.prop_delay_min_ms > p.prop_delay_max_ms) {
        throw TopologyError("invalid capacity or delay range");
    }
    std::size_t const n = p.nodes;
    std::size_t target_edges = 0;
    if (n > 1) {
        double const min_degree = 2.0 * static_cast<double>(n - 1) / static_cast<double>(n);
        double const max_degree = static_cast<double>(n - 1);
        if (p.target_degree < min_degree - 1e-12) {
            throw TopologyError("target degree below the minimum needed for connectivity");
        }
        if (p.target_degree > max_degree + 1e-12) {
            throw TopologyError("target degree above the complete-graph degree");
        }
        target_edges = static_cast<std::size_t>(std::ceil(p.target_degree * static_cast<double>(n) / 2.0 - 1e-9));
        target_edges = std::clamp(target_edges, n - 1, n * (n - 1) / 2);
    }

    std::mt19937_64 rng(seed);
    auto tree = detail::random_spanning_tree(n, rng);

    std::vector<bool> present(n * n, false);
    for (auto [a, b] : tree) {
        present[a * n + b] = true;
    }
    std::vector<std::pair<NodeId, NodeId>> candidates;
    for (NodeId a = 0; a < n; ++a) {
        for (NodeId b = a + 1; b < n; ++b) {
            if (!present[a * n + b]) {
                candidates.emplace_back(a, b);
            }
        }
    }
    std::shuffle(candidates.begin(), candidates.end(), rng);
    auto edges = tree;
    for (std::size_t i = 0; edges.size() < target_edges && i < candidates.size(); ++i) {
        edges.push_back(candidates[i]);
    }
    std::sort(edges.begin(), edges.end());

    std::uniform_int_distribution<std::size_t> vm_count(p.vm_min, p.vm_max);
    std::uniform_real_distribution<double> vm_cap(p.vm_capacity_min, p.vm_capacity_max);
    std::uniform_real_distribution<double> link_cap(p.link_capacity_min, p.link_capacity_max);
    std::uniform_real_distribution<double> delay_ms(p.prop_delay_min_ms, p.prop_delay_max_ms);

    std::vector<std::vector<Amount>> vms(n);
    for (auto& node : vms) {
        std::size_t const count = vm_count(rng);
        for (std::size_t i = 0; i < count; ++i) {
            node.push_back(Amount::from_units(vm_cap(rng)));
        }
    }
    std::vector<LinkSpec> links;
    for (auto [a, b] : edges) {
        double const cap = link_cap(rng);
        double const d = delay_ms(rng);
        links.push_back(LinkSpec{a, b, Amount::from_units(cap), d / 1000.0});
    }
    return Topology::create(std::move(vms), std::move(links));
}

// JSON form: {"nodes":[{"id":0,"vms":[{"id":0,"capacity":..}]}],
//             "links":[{"a":0,"b":1,"capacity_mbps":..,"prop_delay_ms":..}]}

inline nlohmann::json topology_to_json(Topology const& t)
{
    nlohmann::json nodes = nlohmann::json::array();
    for (NodeId n = 0; n < t.node_count(); ++n) {
        nlohmann::json vms = nlohmann::json::array();
        for (VmId v : t.vms_on(n)) {
            vms.push_back({{"id", v}, {"capacity", t.vm(v).capacity.units()}});
        }
        nodes.push_back({{"id", n}, {"vms", vms}});
    }
    nlohmann::json links = nlohmann::json::array();
    for (auto const& l : t.links()) {
        links.push_back({{"a", l.a},
                         {"b", l.b},
                         {"capacity_mbps", l.capacity.units()},
                         {"prop_delay_ms", l.prop_delay_s * 1000.0}});
    }
    return {{"nodes", nodes}, {"links", links}};
}

inline Topology topology_from_json(nlohmann::json const& j)
{
    try {
        if (!j.is_object() || !j.contains("nodes") || !j.contains("links")) {
            throw TopologyError("topology JSON needs 'nodes' and 'links'");
        }
        auto const& nodes = j.at("nodes");
        std::vector<std::vector<Amount>> vms(nodes.size());
        std::vector<bool> seen(nodes.size(), false);
        std::size_t expected_vm = 0;
        std::vector<std::pair<NodeId, nlohmann::json>> ordered;
        for (auto const& node : nodes) {
            NodeId const id = node.at("id").get<NodeId>();
            if (id >= nodes.size() || seen[id]) {
                throw TopologyError("node ids must be dense and unique");
            }
            seen[id] = true;
            ordered.emplace_back(id, node);
        }
        std::sort(ordered.begin(), ordered.end(), [](auto const& x, auto const& y) { return x.first < y.first; });
        for (auto const& [id, node] : ordered) {
            for (auto const& vm : node.at("vms")) {
                if (vm.at("id").get<VmId>() != expected_vm) {
                    throw TopologyError("VM ids must be dense and node-major (expected " + std::to_string(expected_vm)
                                        + ")");
                }
                ++expected_vm;
                vms[id].push_back(Amount::from_units(vm.at("capacity").get<double>()));
            }
        }
        std::vector<LinkSpec> links;
        for (auto const& l : j.at("links")) {
            links.push_back(LinkSpec{l.at("a").get<NodeId>(), l.at("b").get<NodeId>(),
                                     Amount::from_units(l.at("capacity_mbps").get<double>()),
                                     l.at("prop_delay_ms").get<double>() / 1000.0});
        }
        return Topology::create(std::move(vms), std::move(links));
    } catch (nlohmann::json::exception const& e) {
        throw TopologyError(std::string("malformed topology JSON: ") + e.what());
    }
}

inline Topology load_topology(std::filesystem::path const& file)
{
    std::ifstream in(file);
    if (!in) {
        throw TopologyError("cannot open topology file " + file.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (nlohmann::json::exception const& e) {
        throw TopologyError(file.string() + ": " + e.what());
    }
    return topology_from_json(j);
}

} // namespace nfv

#endif // NFV_TOPOLOGY_HPP
