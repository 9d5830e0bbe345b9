// Small hand-built instances shared by the unit tests.
#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <limits>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "nfv/nfv.hpp"

namespace fixtures {

inline nfv::Amount units(double x)
{
    return nfv::Amount::from_units(x);
}

/// Every node gets `vms` VMs of `vm_cap`; every listed edge gets `link_cap` and `delay_ms`.
inline nfv::Topology graph(std::size_t nodes, std::vector<std::pair<std::size_t, std::size_t>> const& edges,
                           std::size_t vms = 1, double vm_cap = 1000.0, double link_cap = 1600.0,
                           double delay_ms = 10.0)
{
    std::vector<std::vector<nfv::Amount>> caps(nodes, std::vector<nfv::Amount>(vms, units(vm_cap)));
    std::vector<nfv::LinkSpec> links;
    for (auto [a, b] : edges) {
        links.push_back(nfv::LinkSpec{a, b, units(link_cap), delay_ms / 1000.0});
    }
    return nfv::Topology::create(std::move(caps), std::move(links));
}

inline nfv::Topology line3(std::size_t vms = 1)
{
    return graph(3, {{0, 1}, {1, 2}}, vms);
}

inline nfv::Topology triangle(std::size_t vms = 1)
{
    return graph(3, {{0, 1}, {0, 2}, {1, 2}}, vms);
}

inline nfv::ServiceSpec service(std::size_t functions, nfv::NodeId ingress, nfv::NodeId egress,
                                double bandwidth = 1.0, double budget_s = 1.0, double cycles_per_bit = 10.0)
{
    nfv::ServiceSpec s;
    s.name = "test";
    for (std::size_t i = 0; i < functions; ++i) {
        s.chain.push_back(nfv::builtin_functions()[i % nfv::builtin_functions().size()]);
        s.cycles_per_bit.push_back(cycles_per_bit);
    }
    s.bandwidth_mbps = bandwidth;
    s.latency_budget_s = budget_s;
    s.ingress = ingress;
    s.egress = egress;
    return s;
}

/// A small random instance with a partly loaded ledger, so capacity and latency sometimes bind.
struct TinyInstance
{
    nfv::Topology topology;
    nfv::CostWeights weights;
    nfv::ServiceSpec spec;
    nfv::ResourceLedger ledger;

    TinyInstance(nfv::Topology t, nfv::CostWeights w, nfv::ServiceSpec s)
        : topology(std::move(t)), weights(std::move(w)), spec(std::move(s)), ledger(topology)
    {
    }
    TinyInstance(TinyInstance const&) = delete;
    TinyInstance& operator=(TinyInstance const&) = delete;
};

inline std::unique_ptr<TinyInstance> tiny_instance(std::mt19937_64& rng, std::size_t max_nodes = 4,
                                                   std::size_t max_vms = 2, std::size_t max_functions = 2)
{
    std::uniform_int_distribution<std::size_t> node_count(2, max_nodes);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    nfv::GeneratorParams p;
    p.nodes = node_count(rng);
    p.target_degree = p.nodes == 2 ? 1.0 : 1.0 + u(rng) * static_cast<double>(p.nodes - 2);
    p.target_degree = std::max(p.target_degree, 2.0 * static_cast<double>(p.nodes - 1) / static_cast<double>(p.nodes));
    p.vm_min = 1;
    p.vm_max = max_vms;
    p.vm_capacity_min = 10.0;
    p.vm_capacity_max = 40.0;
    p.link_capacity_min = 1.0;
    p.link_capacity_max = 4.0;
    nfv::Topology t = nfv::generate_random_connected(p, rng());
    nfv::CostWeights w = nfv::CostWeights::random(t, rng);

    nfv::ServiceSpec s;
    s.name = "tiny";
    std::size_t const f = std::uniform_int_distribution<std::size_t>(0, max_functions)(rng);
    for (std::size_t i = 0; i < f; ++i) {
        s.chain.push_back(nfv::builtin_functions()[i]);
        s.cycles_per_bit.push_back(5.0 + 10.0 * u(rng));
    }
    s.bandwidth_mbps = 0.5 + 1.5 * u(rng);
    s.latency_budget_s = 0.3 + 2.5 * u(rng);
    s.ingress = std::uniform_int_distribution<nfv::NodeId>(0, t.node_count() - 1)(rng);
    do {
        s.egress = std::uniform_int_distribution<nfv::NodeId>(0, t.node_count() - 1)(rng);
    } while (s.egress == s.ingress);

    auto inst = std::make_unique<TinyInstance>(std::move(t), std::move(w), std::move(s));
    // Background load from other users.
    for (nfv::UserId user = 0; user < 3; ++user) {
        nfv::Allocation a;
        for (auto const& vm : inst->topology.vms()) {
            if (u(rng) < 0.5) {
                a.vm_charges.emplace_back(vm.id, units(vm.capacity.units() * 0.3 * u(rng)));
            }
        }
        for (auto const& l : inst->topology.links()) {
            if (u(rng) < 0.5) {
                a.link_charges.emplace_back(l.id, units(l.capacity.units() * 0.3 * u(rng)));
            }
        }
        inst->ledger.charge(user, a, 100);
    }
    return inst;
}

/**
 * Minimum request cost over loop-free routes with at most max_hops links and
 * every chain-ordered placement (one function per intermediate hop, any
 * number at egress), evaluated directly from the capacity, latency and cost
 * definitions rather than through the engine. nullopt when nothing fits.
 */
inline std::optional<double> brute_force_min_cost(nfv::Topology const& t, nfv::ServiceSpec const& s,
                                                  nfv::CostWeights const& w, nfv::ResourceLedger const& ledger,
                                                  std::size_t max_hops)
{
    std::optional<double> best;
    nfv::Amount const bw = units(s.bandwidth_mbps);
    double const bits = s.bandwidth_mbps * 1e6;
    std::vector<nfv::NodeId> route{s.ingress};
    std::vector<bool> used(t.node_count(), false);
    used[s.ingress] = true;

    auto evaluate = [&] {
        double delay = 0.0;
        double link_cost = 0.0;
        for (std::size_t i = 1; i < route.size(); ++i) {
            nfv::Link const& l = t.link(*t.link_between(route[i - 1], route[i]));
            if (ledger.link_available(l.id) < bw) {
                return;
            }
            delay += l.prop_delay_s + bits / (l.capacity.units() * 1e6);
            link_cost += w.link[l.id] * s.bandwidth_mbps;
        }
        std::size_t const last = route.size() - 1;
        std::size_t const f = s.function_count();
        std::vector<nfv::Amount> vm_use(t.vm_count());
        std::function<void(std::size_t, std::size_t, double, double)> place = [&](std::size_t i, std::size_t lo,
                                                                                   double d, double c) {
            if (i == f) {
                if (d <= s.latency_budget_s && (!best || c < *best)) {
                    best = c;
                }
                return;
            }
            nfv::Amount const demand = units(s.cycles_per_bit[i] * s.bandwidth_mbps);
            for (std::size_t pos = lo; pos <= last; ++pos) {
                for (nfv::VmId v : t.vms_on(route[pos])) {
                    if (ledger.vm_available(v) - vm_use[v] < demand) {
                        continue;
                    }
                    vm_use[v] += demand;
                    double const proc = s.cycles_per_bit[i] * bits / (t.vm(v).capacity.units() * 1e6);
                    place(i + 1, pos == last ? last : pos + 1, d + proc,
                          c + w.vm[v] * s.cycles_per_bit[i] * s.bandwidth_mbps);
                    vm_use[v] -= demand;
                }
            }
        };
        place(0, 1, delay, link_cost);
    };

    std::function<void(nfv::NodeId)> walk = [&](nfv::NodeId cur) {
        if (cur == s.egress) {
            evaluate();
            return;
        }
        if (route.size() - 1 >= max_hops) {
            return;
        }
        for (nfv::NodeId next = 0; next < t.node_count(); ++next) {
            if (!used[next] && t.adjacent(cur, next)) {
                used[next] = true;
                route.push_back(next);
                walk(next);
                route.pop_back();
                used[next] = false;
            }
        }
    };
    walk(s.ingress);
    return best;
}

} // namespace fixtures
