#ifndef NFV_SERVICE_HPP
#define NFV_SERVICE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "topology.hpp"

namespace nfv {

using ServiceId = std::size_t;
using UserId = std::uint64_t;

/// Network functions known to the catalog loader without declaration.
inline std::vector<std::string> const& builtin_functions()
{
    static std::vector<std::string> const names{"NAT", "FW", "TM", "VOC", "IDPS"};
    return names;
}

/**
 * One service type: an ordered function chain with per-function processing
 * requirements, a data rate, a latency budget and fixed ingress/egress nodes.
 */
struct ServiceSpec
{
    ServiceId id = 0;
    std::string name;
    std::vector<std::string> chain;
    std::vector<double> cycles_per_bit; ///< d_f, one per chain entry
    double bandwidth_mbps = 0.0;
    double latency_budget_s = 0.0;
    NodeId ingress = 0;
    NodeId egress = 0;

    std::size_t function_count() const { return chain.size(); }

    /// One second of traffic.
    double packet_bits() const { return bandwidth_mbps * 1e6; }

    /// VM processing demand d_f * B_k of the i-th function, in mega-cycles per second.
    double processing_demand(std::size_t i) const { return cycles_per_bit.at(i) * bandwidth_mbps; }
};

/// Throws ConfigError when a spec breaks a catalog invariant.
inline void validate_service(ServiceSpec const& s, std::size_t node_count)
{
    auto fail = [&](std::string const& what) { throw ConfigError("service '" + s.name + "': " + what); };
    if (s.chain.empty()) {
        fail("chain must contain at least one function");
    }
    if (s.cycles_per_bit.size() != s.chain.size()) {
        fail("cycles_per_bit must have one entry per chain function");
    }
    for (double d : s.cycles_per_bit) {
        if (!(d > 0.0) || !std::isfinite(d)) {
            fail("cycles_per_bit entries must be positive");
        }
    }
    if (!(s.bandwidth_mbps > 0.0) || !std::isfinite(s.bandwidth_mbps)) {
        fail("bandwidth must be positive");
    }
    if (!(s.latency_budget_s > 0.0) || !std::isfinite(s.latency_budget_s)) {
        fail("latency budget must be positive");
    }
    if (s.ingress >= node_count || s.egress >= node_count) {
        fail("ingress/egress out of range");
    }
    if (s.ingress == s.egress) {
        fail("ingress and egress must differ");
    }
}

/// Draws distinct ingress and egress nodes for every service.
inline void assign_endpoints(std::vector<ServiceSpec>& catalog, Topology const& topology, std::mt19937_64& rng)
{
    std::size_t const n = topology.node_count();
    if (n < 2) {
        throw ConfigError("service endpoints need at least two nodes");
    }
    std::uniform_int_distribution<NodeId> first(0, n - 1);
    std::uniform_int_distribution<NodeId> second(0, n - 2);
    for (auto& s : catalog) {
        s.ingress = first(rng);
        NodeId e = second(rng);
        s.egress = e >= s.ingress ? e + 1 : e;
    }
}

/**
 * Web Browsing, VoIP and Video Streaming with NAT always ahead of FW.
 *
 * The cycles-per-bit values put each function's demand d_f * B_k at
 * 3.8-10 mega-cycles per second, i.e. 3-50 ms of processing on VMs of
 * 200-1200 mega-cycles per second.
 */
inline std::vector<ServiceSpec> default_catalog(Topology const& topology, std::mt19937_64& rng)
{
    std::vector<ServiceSpec> catalog{
        ServiceSpec{0, "Web Browsing", {"NAT", "FW", "IDPS"}, {4.0, 6.0, 8.0}, 1.0, 0.5, 0, 0},
        ServiceSpec{1, "Voice over IP", {"NAT", "FW"}, {60.0, 90.0}, 0.064, 0.1, 0, 0},
        ServiceSpec{2, "Video Streaming", {"NAT", "FW", "TM", "VOC"}, {1.0, 1.5, 1.0, 2.5}, 4.0, 0.3, 0, 0},
    };
    assign_endpoints(catalog, topology, rng);
    return catalog;
}

/**
 * Parses a catalog array of {name, chain, cycles_per_bit, bandwidth_mbps,
 * latency_budget_ms} with optional fixed "ingress"/"egress". Services
 * without explicit endpoints get random ones from rng.
 */
inline std::vector<ServiceSpec> catalog_from_json(nlohmann::json const& j, Topology const& topology,
                                                  std::mt19937_64& rng,
                                                  std::span<std::string const> extra_functions = {})
{
    if (!j.is_array() || j.empty()) {
        throw ConfigError("catalog must be a non-empty JSON array");
    }
    static std::vector<std::string> const allowed_keys{"name",           "chain",   "cycles_per_bit", "bandwidth_mbps",
                                                       "latency_budget_ms", "ingress", "egress"};
    std::vector<ServiceSpec> catalog;
    bool all_fixed = true;
    try {
        for (auto const& e : j) {
            for (auto it = e.begin(); it != e.end(); ++it) {
                if (std::find(allowed_keys.begin(), allowed_keys.end(), it.key()) == allowed_keys.end()) {
                    throw ConfigError("unknown catalog key '" + it.key() + "'");
                }
            }
            ServiceSpec s;
            s.id = catalog.size();
            s.name = e.at("name").get<std::string>();
            s.chain = e.at("chain").get<std::vector<std::string>>();
            s.cycles_per_bit = e.at("cycles_per_bit").get<std::vector<double>>();
            s.bandwidth_mbps = e.at("bandwidth_mbps").get<double>();
            s.latency_budget_s = e.at("latency_budget_ms").get<double>() / 1000.0;
            for (auto const& f : s.chain) {
                bool const known = std::find(builtin_functions().begin(), builtin_functions().end(), f)
                                       != builtin_functions().end()
                                   || std::find(extra_functions.begin(), extra_functions.end(), f)
                                          != extra_functions.end();
                if (!known) {
                    throw ConfigError("service '" + s.name + "': unknown function '" + f + "'");
                }
            }
            if (e.contains("ingress") != e.contains("egress")) {
                throw ConfigError("service '" + s.name + "': ingress and egress must be given together");
            }
            if (e.contains("ingress")) {
                s.ingress = e.at("ingress").get<NodeId>();
                s.egress = e.at("egress").get<NodeId>();
            } else {
                all_fixed = false;
            }
            catalog.push_back(std::move(s));
        }
    } catch (nlohmann::json::exception const& ex) {
        throw ConfigError(std::string("malformed catalog: ") + ex.what());
    }
    if (!all_fixed) {
        std::vector<ServiceSpec> drawn = catalog;
        assign_endpoints(drawn, topology, rng);
        for (std::size_t i = 0; i < catalog.size(); ++i) {
            if (!j[i].contains("ingress")) {
                catalog[i].ingress = drawn[i].ingress;
                catalog[i].egress = drawn[i].egress;
            }
        }
    }
    for (auto const& s : catalog) {
        validate_service(s, topology.node_count());
    }
    return catalog;
}

inline nlohmann::json catalog_to_json(std::span<ServiceSpec const> catalog)
{
    nlohmann::json out = nlohmann::json::array();
    for (auto const& s : catalog) {
        out.push_back({{"name", s.name},
                       {"chain", s.chain},
                       {"cycles_per_bit", s.cycles_per_bit},
                       {"bandwidth_mbps", s.bandwidth_mbps},
                       {"latency_budget_ms", s.latency_budget_s * 1000.0},
                       {"ingress", s.ingress},
                       {"egress", s.egress}});
    }
    return out;
}

/// One user's request for one service.
struct Request
{
    UserId user = 0;
    ServiceId service = 0;
    std::size_t arrival_slot = 0;
    double lifetime_s = 0.0;

    /// Slot at which the allocation is released; one slot is one second.
    std::size_t departure_slot() const
    {
        return arrival_slot + static_cast<std::size_t>(std::ceil(lifetime_s));
    }
};

enum class ArrivalProcess
{
    uniform,
    poisson
};

/// Per-slot arrival count from DiscreteUniform{0, ..., round(2 * mean)}.
inline std::size_t sample_arrival_count(std::mt19937_64& rng, double mean_rate)
{
    if (!(mean_rate >= 0.0)) {
        throw std::invalid_argument("arrival mean must be non-negative");
    }
    auto const upper = static_cast<std::size_t>(std::llround(2.0 * mean_rate));
    if (upper == 0) {
        return 0;
    }
    return std::uniform_int_distribution<std::size_t>(0, upper)(rng);
}

/// Exponential lifetime in seconds; never returns zero.
inline double sample_lifetime(std::mt19937_64& rng, double mean_s)
{
    if (!(mean_s > 0.0)) {
        throw std::invalid_argument("lifetime mean must be positive");
    }
    std::exponential_distribution<double> dist(1.0 / mean_s);
    double v = 0.0;
    do {
        v = dist(rng);
    } while (!(v > 0.0));
    return v;
}

/// Deterministic online request stream; the service mix is uniform over the catalog.
class Workload
{
public:
    Workload(std::size_t service_count, double arrival_mean, double lifetime_mean_s, ArrivalProcess process,
             std::uint64_t seed)
        : service_count_(service_count), arrival_mean_(arrival_mean), lifetime_mean_(lifetime_mean_s),
          process_(process), rng_(seed)
    {
        if (service_count == 0) {
            throw ConfigError("workload needs at least one service");
        }
    }

    std::vector<Request> arrivals(std::size_t slot)
    {
        std::size_t count = 0;
        if (process_ == ArrivalProcess::uniform) {
            count = sample_arrival_count(rng_, arrival_mean_);
        } else if (arrival_mean_ > 0.0) {
            count = std::poisson_distribution<std::size_t>(arrival_mean_)(rng_);
        }
        std::uniform_int_distribution<ServiceId> pick(0, service_count_ - 1);
        std::vector<Request> out;
        out.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            Request r;
            r.user = next_user_++;
            r.service = pick(rng_);
            r.arrival_slot = slot;
            r.lifetime_s = sample_lifetime(rng_, lifetime_mean_);
            out.push_back(r);
        }
        return out;
    }

private:
    std::size_t service_count_;
    double arrival_mean_;
    double lifetime_mean_;
    ArrivalProcess process_;
    std::mt19937_64 rng_;
    UserId next_user_ = 0;
};

} // namespace nfv

#endif // NFV_SERVICE_HPP
