#ifndef NFV_OUTCOME_HPP
#define NFV_OUTCOME_HPP

#include <cstddef>
#include <string_view>
#include <vector>

#include "topology.hpp"

namespace nfv {

enum class ActionKind
{
    forward, ///< traverse the VM's node as a switch
    place    ///< run the next chain function on the VM
};

enum class RejectReason
{
    none,
    invalid_action,
    link_capacity,
    vm_capacity,
    latency,
    step_limit
};

inline std::string_view to_string(RejectReason r)
{
    switch (r) {
    case RejectReason::none: return "none";
    case RejectReason::invalid_action: return "invalid_action";
    case RejectReason::link_capacity: return "link_capacity";
    case RejectReason::vm_capacity: return "vm_capacity";
    case RejectReason::latency: return "latency";
    case RejectReason::step_limit: return "step_limit";
    }
    return "unknown";
}

inline std::string_view to_string(ActionKind k)
{
    return k == ActionKind::place ? "place" : "forward";
}

struct DelayBreakdown
{
    double processing = 0.0;
    double propagation = 0.0;
    double transmission = 0.0;

    double total() const { return processing + propagation + transmission; }
};

/// xi: function index -> (vm, node).
struct FunctionPlacement
{
    std::size_t function = 0;
    VmId vm = 0;
    NodeId node = 0;

    friend bool operator==(FunctionPlacement const&, FunctionPlacement const&) = default;
};

/**
 * Result of one routing episode.
 *
 * On acceptance `segments` (rho) holds function_count + 1 link lists:
 * ingress to the first function's node, between consecutive functions,
 * and last function to egress. Links appear once per traversal.
 */
struct PlacementOutcome
{
    bool accepted = false;
    RejectReason reason = RejectReason::none;
    std::vector<NodeId> hops;
    std::vector<FunctionPlacement> placements;
    std::vector<std::vector<LinkId>> segments;
    DelayBreakdown delay;
    double cost = 0.0;
    double reward = 0.0;
    std::size_t steps = 0;
};

} // namespace nfv

#endif // NFV_OUTCOME_HPP
