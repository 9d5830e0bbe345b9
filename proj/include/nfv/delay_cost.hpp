#ifndef NFV_DELAY_COST_HPP
#define NFV_DELAY_COST_HPP

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "outcome.hpp"
#include "service.hpp"
#include "topology.hpp"

namespace nfv {

/// d_f * packet_bits / capacity, all in base units (cycles/bit, bits, cycles/s).
inline double processing_delay(double cycles_per_bit, double packet_bits, double capacity_cycles_per_s)
{
    if (!(capacity_cycles_per_s > 0.0)) {
        throw std::domain_error("processing capacity must be positive");
    }
    return cycles_per_bit * packet_bits / capacity_cycles_per_s;
}

inline double transmission_delay(double packet_bits, double link_bits_per_s)
{
    if (!(link_bits_per_s > 0.0)) {
        throw std::domain_error("link capacity must be positive");
    }
    return packet_bits / link_bits_per_s;
}

/// Processing delay of chain function `function` of `spec` on `vm`.
inline double function_delay(Topology const& topology, ServiceSpec const& spec, std::size_t function, VmId vm)
{
    return processing_delay(spec.cycles_per_bit.at(function), spec.packet_bits(), topology.vm(vm).capacity.base());
}

/**
 * Unit costs: w per VM for processing, w-hat per link for bandwidth.
 */
struct CostWeights
{
    std::vector<double> vm;
    std::vector<double> link;

    static CostWeights uniform(Topology const& topology, double value)
    {
        return CostWeights{std::vector<double>(topology.vm_count(), value),
                           std::vector<double>(topology.link_count(), value)};
    }

    static CostWeights random(Topology const& topology, std::mt19937_64& rng, double lo = 25.0, double hi = 75.0)
    {
        std::uniform_real_distribution<double> dist(lo, hi);
        CostWeights w;
        for (std::size_t i = 0; i < topology.vm_count(); ++i) {
            w.vm.push_back(dist(rng));
        }
        for (std::size_t i = 0; i < topology.link_count(); ++i) {
            w.link.push_back(dist(rng));
        }
        return w;
    }

    CostWeights scaled(double factor) const
    {
        CostWeights out = *this;
        for (auto& x : out.vm) {
            x *= factor;
        }
        for (auto& x : out.link) {
            x *= factor;
        }
        return out;
    }
};

/**
 * Delay charged to one engine step: the links traversed this step plus, for
 * a placement, the function's processing delay. Transmission over the
 * traversed links is included unless include_transmission is false.
 */
inline double step_delay(Topology const& topology, ServiceSpec const& spec, ActionKind kind, VmId vm,
                         std::size_t function, std::span<LinkId const> links, bool include_transmission = true)
{
    double d = 0.0;
    if (kind == ActionKind::place) {
        d += function_delay(topology, spec, function, vm);
    }
    for (LinkId l : links) {
        d += topology.link(l).prop_delay_s;
        if (include_transmission) {
            d += transmission_delay(spec.packet_bits(), topology.link(l).capacity.base());
        }
    }
    return d;
}

/// a_s * w * d_f * B + sum over links of w-hat * B.
inline double step_cost(ActionKind kind, double vm_weight, double cycles_per_bit, double bandwidth_mbps,
                        std::span<double const> link_weights)
{
    double c = kind == ActionKind::place ? vm_weight * cycles_per_bit * bandwidth_mbps : 0.0;
    for (double w : link_weights) {
        c += w * bandwidth_mbps;
    }
    return c;
}

/// Closed-form delay of a finished outcome, recomputed from its placements and segments.
inline DelayBreakdown compute_delay(Topology const& topology, ServiceSpec const& spec, PlacementOutcome const& o)
{
    DelayBreakdown d;
    for (auto const& p : o.placements) {
        d.processing += function_delay(topology, spec, p.function, p.vm);
    }
    for (auto const& seg : o.segments) {
        for (LinkId l : seg) {
            d.propagation += topology.link(l).prop_delay_s;
            d.transmission += transmission_delay(spec.packet_bits(), topology.link(l).capacity.base());
        }
    }
    return d;
}

/// Per-request processing plus bandwidth cost of an accepted outcome.
inline double request_objective(PlacementOutcome const& o, ServiceSpec const& spec, CostWeights const& weights)
{
    if (!o.accepted) {
        throw std::domain_error("objective is undefined for a rejected placement");
    }
    double processing = 0.0;
    for (auto const& p : o.placements) {
        processing += weights.vm.at(p.vm) * spec.cycles_per_bit.at(p.function) * spec.bandwidth_mbps;
    }
    double bandwidth = 0.0;
    for (auto const& seg : o.segments) {
        for (LinkId l : seg) {
            bandwidth += weights.link.at(l) * spec.bandwidth_mbps;
        }
    }
    return processing + bandwidth;
}

} // namespace nfv

#endif // NFV_DELAY_COST_HPP
