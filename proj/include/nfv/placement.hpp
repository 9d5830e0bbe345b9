#ifndef NFV_PLACEMENT_HPP
#define NFV_PLACEMENT_HPP

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "delay_cost.hpp"
#include "ledger.hpp"
#include "outcome.hpp"
#include "service.hpp"
#include "topology.hpp"

namespace nfv {

struct EngineConfig
{
    std::size_t max_steps = 100; ///< J
    double w_acc = 1.0;
    double w_cost = 0.001;
    /// Extra reward granted once when the request is accepted; 0 keeps rewards purely per step.
    double acceptance_bonus = 0.0;
    /// When false the per-step delay omits transmission.
    bool transmission_in_step_delay = true;
    /// Size the action space |N| * |V_total| * 2; indices past 2 * |V_total| are never valid.
    bool node_vm_action_space = false;
};

/// |V_total| * 2 by default: every VM paired with {forward, place}.
inline std::size_t action_space_size(Topology const& topology, bool node_vm_pairs = false)
{
    return node_vm_pairs ? topology.node_count() * topology.vm_count() * 2 : topology.vm_count() * 2;
}

struct Action
{
    VmId vm = 0;
    ActionKind kind = ActionKind::forward;

    friend bool operator==(Action const&, Action const&) = default;
};

/// Even index: forward through VM a/2. Odd index: place on VM a/2.
inline Action decode_action(std::size_t a, std::size_t vm_count)
{
    if (a >= 2 * vm_count) {
        throw std::out_of_range("action index " + std::to_string(a) + " outside the action space");
    }
    return Action{a / 2, (a % 2 == 0) ? ActionKind::forward : ActionKind::place};
}

inline std::size_t encode_action(Action a)
{
    return 2 * a.vm + (a.kind == ActionKind::place ? 1 : 0);
}

enum class EpisodeStatus
{
    live,
    at_egress, ///< reached egress, remaining functions not yet placed
    accepted,
    rejected
};

struct StepResult
{
    double reward = 0.0;
    EpisodeStatus status = EpisodeStatus::live;
    ActionKind kind = ActionKind::forward; ///< effective kind after the chain-complete rule
    NodeId node = 0;
    VmId vm = 0;
    double delay = 0.0;
    double cost = 0.0;
    RejectReason reason = RejectReason::none;
};

/**
 * One request's node-by-node routing and placement run.
 *
 * Starting at the ingress node, every step moves one hop to a VM on a
 * neighbouring node and either places the next chain function there or uses
 * it as a switch. Link and VM capacity are checked against the
 * ledger minus this episode's staged charges, and the latency budget
 * against the accumulated step delay. On reaching egress the caller invokes
 * finish_at_egress() to place the remaining functions there.
 *
 * The ledger is only read. An accepted episode's staged() charges are
 * committed by the caller; a rejected one simply discards them.
 */
class Episode
{
public:
    Episode(Topology const& topology, ServiceSpec const& spec, CostWeights const& weights,
            ResourceLedger const& ledger, EngineConfig const& config, std::size_t service_count = 1)
        : topology_(&topology), spec_(&spec), weights_(&weights), ledger_(&ledger), config_(config),
          service_count_(service_count), staged_(topology), current_node_(spec.ingress)
    {
        hops_.push_back(spec.ingress);
        segments_.emplace_back();
        bandwidth_ = Amount::from_units(spec.bandwidth_mbps);
        if (spec.ingress == spec.egress) {
            status_ = EpisodeStatus::at_egress;
        }
    }

    EpisodeStatus status() const { return status_; }
    bool finished() const { return status_ == EpisodeStatus::accepted || status_ == EpisodeStatus::rejected; }
    bool at_egress() const { return status_ == EpisodeStatus::at_egress; }

    NodeId current_node() const { return current_node_; }
    std::size_t next_function() const { return next_function_; }
    std::size_t steps() const { return steps_; }
    double elapsed() const { return elapsed_; }
    StagedCharges const& staged() const { return staged_; }
    ServiceSpec const& spec() const { return *spec_; }

    StateContext context() const
    {
        return StateContext{spec_->id,        service_count_,       current_node_, current_vm_, next_function_,
                            spec_->function_count(), elapsed_, spec_->latency_budget_s};
    }

    /// Actions on VMs of nodes adjacent to the current node, both kinds, ascending.
    std::vector<std::size_t> possible_actions() const
    {
        std::vector<std::size_t> out;
        if (finished()) {
            return out;
        }
        for (NodeId n : topology_->neighbors(current_node_)) {
            for (VmId v : topology_->vms_on(n)) {
                out.push_back(2 * v);
                out.push_back(2 * v + 1);
            }
        }
        return out;
    }

    bool is_possible(std::size_t a) const
    {
        if (a >= 2 * topology_->vm_count()) {
            return false;
        }
        return topology_->adjacent(current_node_, topology_->vm(a / 2).node);
    }

    /// Lowest-id VM on node with room for chain function `function`.
    std::optional<VmId> first_fit(NodeId node, std::size_t function) const
    {
        Amount const demand = Amount::from_units(spec_->processing_demand(function));
        for (VmId v : topology_->vms_on(node)) {
            if (ledger_->vm_available(v) - staged_.vm_total(v) >= demand) {
                return v;
            }
        }
        return std::nullopt;
    }

    bool link_has_room(LinkId link) const
    {
        return ledger_->link_available(link) - staged_.link_total(link) >= bandwidth_;
    }

    StepResult step(std::size_t a)
    {
        if (status_ != EpisodeStatus::live) {
            throw std::logic_error("step() on an episode that is not routing");
        }
        if (a >= action_space_size(*topology_, config_.node_vm_action_space)) {
            throw std::out_of_range("action index " + std::to_string(a) + " outside the action space");
        }
        StepResult res;
        if (!is_possible(a)) {
            return reject(res, RejectReason::invalid_action);
        }
        Action const act = decode_action(a, topology_->vm_count());
        NodeId const node = topology_->vm(act.vm).node;
        LinkId const link = *topology_->link_between(current_node_, node);
        ActionKind const kind =
            (act.kind == ActionKind::place && next_function_ < spec_->function_count()) ? ActionKind::place
                                                                                         : ActionKind::forward;
        res.kind = kind;
        res.node = node;
        res.vm = act.vm;

        if (!link_has_room(link)) {
            return reject(res, RejectReason::link_capacity);
        }
        Amount demand;
        if (kind == ActionKind::place) {
            demand = Amount::from_units(spec_->processing_demand(next_function_));
            if (ledger_->vm_available(act.vm) - staged_.vm_total(act.vm) < demand) {
                return reject(res, RejectReason::vm_capacity);
            }
        }

        LinkId const links[1] = {link};
        staged_.add_link(link, bandwidth_);
        double const prop = topology_->link(link).prop_delay_s;
        double const tran = transmission_delay(spec_->packet_bits(), topology_->link(link).capacity.base());
        delay_.propagation += prop;
        delay_.transmission += tran;
        double const tau = step_delay(*topology_, *spec_, kind, act.vm, next_function_, links,
                                      config_.transmission_in_step_delay);
        double const w_links[1] = {weights_->link.at(link)};
        double const phi =
            step_cost(kind, weights_->vm.at(act.vm),
                      kind == ActionKind::place ? spec_->cycles_per_bit.at(next_function_) : 0.0,
                      spec_->bandwidth_mbps, w_links);

        segments_.back().push_back(link);
        hops_.push_back(node);
        current_node_ = node;
        current_vm_ = act.vm;
        if (kind == ActionKind::place) {
            staged_.add_vm(act.vm, demand);
            delay_.processing += function_delay(*topology_, *spec_, next_function_, act.vm);
            placements_.push_back(FunctionPlacement{next_function_, act.vm, node});
            segments_.emplace_back();
            ++next_function_;
        }
        elapsed_ += tau;
        ++steps_;
        cost_ += phi;
        res.delay = tau;
        res.cost = phi;
        res.reward = config_.w_acc - config_.w_cost * phi;
        reward_ += res.reward;

        if (node == spec_->egress) {
            status_ = EpisodeStatus::at_egress;
            if (elapsed_ > spec_->latency_budget_s) {
                return reject(res, RejectReason::latency);
            }
        } else if (elapsed_ >= spec_->latency_budget_s) {
            return reject(res, RejectReason::latency);
        } else if (steps_ >= config_.max_steps) {
            return reject(res, RejectReason::step_limit);
        }
        res.status = status_;
        return res;
    }

    /**
     * Places the functions still pending on egress-node VMs, one step each,
     * then accepts iff the whole chain is placed within the latency budget.
     * `vms`, when non-empty, names the VM for each pending function in order;
     * otherwise the lowest-id VM with room is used. The returned reward is the
     * sum granted by the finishing steps.
     */
    StepResult finish_at_egress(std::span<VmId const> vms = {})
    {
        if (status_ != EpisodeStatus::at_egress) {
            throw std::logic_error("finish_at_egress() requires the episode to be at egress");
        }
        StepResult res;
        res.node = current_node_;
        std::size_t const pending = spec_->function_count() - next_function_;
        if (!vms.empty() && vms.size() != pending) {
            throw std::invalid_argument("egress VM list does not match the pending function count");
        }
        for (std::size_t k = 0; next_function_ < spec_->function_count(); ++k) {
            std::optional<VmId> vm;
            if (vms.empty()) {
                vm = first_fit(current_node_, next_function_);
            } else if (topology_->vm(vms[k]).node == current_node_) {
                Amount const demand = Amount::from_units(spec_->processing_demand(next_function_));
                if (ledger_->vm_available(vms[k]) - staged_.vm_total(vms[k]) >= demand) {
                    vm = vms[k];
                }
            } else {
                return reject(res, RejectReason::invalid_action);
            }
            if (!vm) {
                return reject(res, RejectReason::vm_capacity);
            }
            if (steps_ >= config_.max_steps) {
                return reject(res, RejectReason::step_limit);
            }
            Amount const demand = Amount::from_units(spec_->processing_demand(next_function_));
            staged_.add_vm(*vm, demand);
            double const tau = function_delay(*topology_, *spec_, next_function_, *vm);
            double const phi = step_cost(ActionKind::place, weights_->vm.at(*vm),
                                         spec_->cycles_per_bit.at(next_function_), spec_->bandwidth_mbps, {});
            delay_.processing += tau;
            placements_.push_back(FunctionPlacement{next_function_, *vm, current_node_});
            segments_.emplace_back();
            ++next_function_;
            current_vm_ = *vm;
            elapsed_ += tau;
            ++steps_;
            cost_ += phi;
            double const r = config_.w_acc - config_.w_cost * phi;
            reward_ += r;
            res.reward += r;
            res.delay += tau;
            res.cost += phi;
            res.kind = ActionKind::place;
            res.vm = *vm;
        }
        if (elapsed_ > spec_->latency_budget_s) {
            return reject(res, RejectReason::latency);
        }
        status_ = EpisodeStatus::accepted;
        reward_ += config_.acceptance_bonus;
        res.reward += config_.acceptance_bonus;
        res.status = status_;
        return res;
    }

    /// Valid once finished().
    PlacementOutcome outcome() const
    {
        if (!finished()) {
            throw std::logic_error("outcome() before the episode finished");
        }
        PlacementOutcome o;
        o.accepted = status_ == EpisodeStatus::accepted;
        o.reason = reason_;
        o.hops = hops_;
        o.placements = placements_;
        o.segments = segments_;
        o.delay = delay_;
        o.cost = o.accepted ? cost_ : 0.0;
        o.reward = o.accepted ? reward_ : 0.0;
        o.steps = steps_;
        return o;
    }

private:
    StepResult reject(StepResult res, RejectReason why)
    {
        status_ = EpisodeStatus::rejected;
        reason_ = why;
        staged_.clear();
        reward_ = 0.0;
        res.reward = 0.0;
        res.status = status_;
        res.reason = why;
        return res;
    }

    Topology const* topology_;
    ServiceSpec const* spec_;
    CostWeights const* weights_;
    ResourceLedger const* ledger_;
    EngineConfig config_;
    std::size_t service_count_;

    StagedCharges staged_;
    Amount bandwidth_;
    EpisodeStatus status_ = EpisodeStatus::live;
    RejectReason reason_ = RejectReason::none;
    NodeId current_node_;
    std::optional<VmId> current_vm_;
    std::size_t next_function_ = 0;
    std::size_t steps_ = 0;
    double elapsed_ = 0.0;
    double cost_ = 0.0;
    double reward_ = 0.0;
    DelayBreakdown delay_;
    std::vector<NodeId> hops_;
    std::vector<FunctionPlacement> placements_;
    std::vector<std::vector<LinkId>> segments_;
};

/**
 * Re-validates an outcome against the ledger state it was decided on:
 * path shape, one VM per function in chain order, per-link and
 * per-VM capacity, and total delay within budget. Returns the
 * list of violations, empty when the outcome is sound.
 */
inline std::vector<std::string> replay_check(Topology const& topology, ServiceSpec const& spec,
                                             LedgerSnapshot const& before, PlacementOutcome const& o)
{
    std::vector<std::string> issues;
    if (!o.accepted) {
        return issues;
    }
    if (o.hops.empty() || o.hops.front() != spec.ingress || o.hops.back() != spec.egress) {
        issues.emplace_back("path does not run from ingress to egress");
    }
    std::vector<LinkId> path_links;
    for (std::size_t i = 1; i < o.hops.size(); ++i) {
        auto l = topology.link_between(o.hops[i - 1], o.hops[i]);
        if (!l) {
            issues.emplace_back("hops " + std::to_string(i - 1) + "," + std::to_string(i) + " not adjacent");
            return issues;
        }
        path_links.push_back(*l);
    }
    if (o.placements.size() != spec.function_count()) {
        issues.emplace_back("not every function is placed exactly once");
    }
    for (std::size_t i = 0; i < o.placements.size(); ++i) {
        if (o.placements[i].function != i) {
            issues.emplace_back("placements out of chain order");
        }
        if (topology.vm(o.placements[i].vm).node != o.placements[i].node) {
            issues.emplace_back("placement node does not host its VM");
        }
    }
    if (o.segments.size() != spec.function_count() + 1) {
        issues.emplace_back("expected one physical path per chain segment");
    }
    std::vector<LinkId> seg_links;
    for (auto const& seg : o.segments) {
        seg_links.insert(seg_links.end(), seg.begin(), seg.end());
    }
    if (seg_links != path_links) {
        issues.emplace_back("segments do not partition the hop path");
    }
    // Placement nodes must be where the segment boundaries fall.
    std::size_t hop_index = 0;
    for (std::size_t i = 0; i < o.placements.size() && i < o.segments.size(); ++i) {
        hop_index += o.segments[i].size();
        if (hop_index >= o.hops.size() || o.hops[hop_index] != o.placements[i].node) {
            issues.emplace_back("function " + std::to_string(i) + " is not on the path at its segment end");
            break;
        }
    }

    std::vector<Amount> vm_use(topology.vm_count());
    std::vector<Amount> link_use(topology.link_count());
    Amount const bw = Amount::from_units(spec.bandwidth_mbps);
    for (LinkId l : path_links) {
        link_use[l] += bw;
    }
    for (auto const& p : o.placements) {
        if (p.function < spec.function_count()) {
            vm_use[p.vm] += Amount::from_units(spec.processing_demand(p.function));
        }
    }
    for (std::size_t l = 0; l < link_use.size(); ++l) {
        if (link_use[l] > before.link_available.at(l)) {
            issues.emplace_back("link " + std::to_string(l) + " over capacity");
        }
    }
    for (std::size_t v = 0; v < vm_use.size(); ++v) {
        if (vm_use[v] > before.vm_available.at(v)) {
            issues.emplace_back("VM " + std::to_string(v) + " over capacity");
        }
    }
    double const total = compute_delay(topology, spec, o).total();
    if (total > spec.latency_budget_s * (1.0 + 1e-12)) {
        issues.emplace_back("total delay " + std::to_string(total) + " exceeds budget");
    }
    return issues;
}

} // namespace nfv

#endif // NFV_PLACEMENT_HPP
