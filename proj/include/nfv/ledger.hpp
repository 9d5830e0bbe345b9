#ifndef NFV_LEDGER_HPP
#define NFV_LEDGER_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "amount.hpp"
#include "errors.hpp"
#include "service.hpp"
#include "topology.hpp"

namespace nfv {

/// Charges held by one user: d_f * B_k per placed function, B_k per traversed link.
struct Allocation
{
    std::vector<std::pair<VmId, Amount>> vm_charges;
    std::vector<std::pair<LinkId, Amount>> link_charges;

    bool empty() const { return vm_charges.empty() && link_charges.empty(); }
};

/**
 * Charges accumulated during one routing episode before it is accepted.
 * Keeps running per-resource totals so capacity checks see earlier steps of
 * the same episode.
 */
class StagedCharges
{
public:
    explicit StagedCharges(Topology const& topology)
        : vm_totals_(topology.vm_count()), link_totals_(topology.link_count())
    {
    }

    void add_vm(VmId vm, Amount amount)
    {
        vm_totals_.at(vm) += amount;
        allocation_.vm_charges.emplace_back(vm, amount);
    }

    void add_link(LinkId link, Amount amount)
    {
        link_totals_.at(link) += amount;
        allocation_.link_charges.emplace_back(link, amount);
    }

    Amount vm_total(VmId vm) const { return vm_totals_.at(vm); }
    Amount link_total(LinkId link) const { return link_totals_.at(link); }
    Allocation const& allocation() const { return allocation_; }
    bool empty() const { return allocation_.empty(); }

    void clear()
    {
        std::fill(vm_totals_.begin(), vm_totals_.end(), Amount{});
        std::fill(link_totals_.begin(), link_totals_.end(), Amount{});
        allocation_ = {};
    }

private:
    std::vector<Amount> vm_totals_;
    std::vector<Amount> link_totals_;
    Allocation allocation_;
};

/// Available amounts of every VM (z) and link (y).
struct LedgerSnapshot
{
    std::vector<Amount> vm_available;
    std::vector<Amount> link_available;

    friend bool operator==(LedgerSnapshot const&, LedgerSnapshot const&) = default;
};

enum class ReleaseStatus
{
    released,
    unknown_user ///< warning: nothing was live under that id
};

/**
 * Authoritative available-capacity state plus the live allocation of every
 * admitted user. All arithmetic is fixed-point, so after any sequence of
 * charges and releases
 *
 *     capacity - available == sum of live charges
 *
 * holds exactly for each resource.
 */
class ResourceLedger
{
public:
    explicit ResourceLedger(Topology const& topology) : topology_(&topology)
    {
        for (auto const& vm : topology.vms()) {
            z_.push_back(vm.capacity);
        }
        for (auto const& link : topology.links()) {
            y_.push_back(link.capacity);
        }
    }

    Topology const& topology() const { return *topology_; }

    Amount vm_available(VmId vm) const { return z_.at(vm); }
    Amount link_available(LinkId link) const { return y_.at(link); }
    Amount vm_capacity(VmId vm) const { return topology_->vm(vm).capacity; }
    Amount link_capacity(LinkId link) const { return topology_->link(link).capacity; }

    /**
     * Atomically deducts an allocation and records it under user. Throws
     * InsufficientCapacity, leaving the ledger untouched, when any resource
     * would go negative.
     */
    void charge(UserId user, Allocation allocation, std::size_t departure_slot, double cost = 0.0)
    {
        if (live_.contains(user)) {
            throw std::logic_error("user " + std::to_string(user) + " already holds an allocation");
        }
        std::map<VmId, Amount> vm_sum;
        std::map<LinkId, Amount> link_sum;
        for (auto const& [vm, a] : allocation.vm_charges) {
            if (a < Amount{}) {
                throw std::invalid_argument("negative VM charge");
            }
            vm_sum[vm] += a;
        }
        for (auto const& [link, a] : allocation.link_charges) {
            if (a < Amount{}) {
                throw std::invalid_argument("negative link charge");
            }
            link_sum[link] += a;
        }
        for (auto const& [vm, a] : vm_sum) {
            if (a > z_.at(vm)) {
                throw InsufficientCapacity("VM " + std::to_string(vm) + " has " + z_[vm].to_string()
                                           + " available, charge " + a.to_string());
            }
        }
        for (auto const& [link, a] : link_sum) {
            if (a > y_.at(link)) {
                throw InsufficientCapacity("link " + std::to_string(link) + " has " + y_[link].to_string()
                                           + " available, charge " + a.to_string());
            }
        }
        for (auto const& [vm, a] : vm_sum) {
            z_[vm] -= a;
        }
        for (auto const& [link, a] : link_sum) {
            y_[link] -= a;
        }
        departures_.emplace(departure_slot, user);
        live_.emplace(user, Record{std::move(allocation), departure_slot, cost});
    }

    /// Returns every charge of user to the pool and forgets the record.
    ReleaseStatus release(UserId user)
    {
        auto it = live_.find(user);
        if (it == live_.end()) {
            return ReleaseStatus::unknown_user;
        }
        for (auto const& [vm, a] : it->second.allocation.vm_charges) {
            z_[vm] += a;
        }
        for (auto const& [link, a] : it->second.allocation.link_charges) {
            y_[link] += a;
        }
        auto range = departures_.equal_range(it->second.departure_slot);
        for (auto d = range.first; d != range.second; ++d) {
            if (d->second == user) {
                departures_.erase(d);
                break;
            }
        }
        live_.erase(it);
        return ReleaseStatus::released;
    }

    /// Releases every user whose departure slot is <= slot, in (slot, user) order.
    std::vector<UserId> apply_departures(std::size_t slot)
    {
        std::vector<UserId> due;
        for (auto it = departures_.begin(); it != departures_.end() && it->first <= slot; ++it) {
            due.push_back(it->second);
        }
        for (UserId u : due) {
            release(u);
        }
        return due;
    }

    bool is_live(UserId user) const { return live_.contains(user); }
    std::size_t live_count() const { return live_.size(); }

    std::optional<std::size_t> departure_of(UserId user) const
    {
        auto it = live_.find(user);
        if (it == live_.end()) {
            return std::nullopt;
        }
        return it->second.departure_slot;
    }

    /// Sum of recorded request costs over live users, in user-id order.
    double live_cost() const
    {
        double total = 0.0;
        for (auto const& [u, rec] : live_) {
            total += rec.cost;
        }
        return total;
    }

    /// Recomputes capacity - available from the live records for every resource.
    bool conserved() const
    {
        std::vector<Amount> vm_used(z_.size());
        std::vector<Amount> link_used(y_.size());
        for (auto const& [u, rec] : live_) {
            for (auto const& [vm, a] : rec.allocation.vm_charges) {
                vm_used[vm] += a;
            }
            for (auto const& [link, a] : rec.allocation.link_charges) {
                link_used[link] += a;
            }
        }
        for (std::size_t v = 0; v < z_.size(); ++v) {
            if (z_[v] < Amount{} || z_[v] > vm_capacity(v) || vm_capacity(v) - z_[v] != vm_used[v]) {
                return false;
            }
        }
        for (std::size_t l = 0; l < y_.size(); ++l) {
            if (y_[l] < Amount{} || y_[l] > link_capacity(l) || link_capacity(l) - y_[l] != link_used[l]) {
                return false;
            }
        }
        return true;
    }

    bool at_full_capacity() const
    {
        for (std::size_t v = 0; v < z_.size(); ++v) {
            if (z_[v] != vm_capacity(v)) {
                return false;
            }
        }
        for (std::size_t l = 0; l < y_.size(); ++l) {
            if (y_[l] != link_capacity(l)) {
                return false;
            }
        }
        return true;
    }

    LedgerSnapshot snapshot() const { return LedgerSnapshot{z_, y_}; }

    /// Audit rows: slot,resource_kind,resource_id,capacity,available.
    void write_snapshot_csv(std::ostream& out, std::size_t slot, bool header = true) const
    {
        if (header) {
            out << "slot,resource_kind,resource_id,capacity,available\n";
        }
        for (std::size_t v = 0; v < z_.size(); ++v) {
            out << slot << ",vm," << v << ',' << vm_capacity(v).to_string() << ',' << z_[v].to_string() << '\n';
        }
        for (std::size_t l = 0; l < y_.size(); ++l) {
            out << slot << ",link," << l << ',' << link_capacity(l).to_string() << ',' << y_[l].to_string()
                << '\n';
        }
    }

private:
    struct Record
    {
        Allocation allocation;
        std::size_t departure_slot = 0;
        double cost = 0.0;
    };

    Topology const* topology_;
    std::vector<Amount> z_;
    std::vector<Amount> y_;
    std::map<UserId, Record> live_;
    std::multimap<std::size_t, UserId> departures_;
};

/// Episode-local view the agent observes alongside the resource levels.
struct StateContext
{
    ServiceId service = 0;
    std::size_t service_count = 1;
    NodeId current_node = 0;
    std::optional<VmId> current_vm;
    std::size_t next_function = 0;
    std::size_t function_count = 0;
    double elapsed_s = 0.0;
    double latency_budget_s = 1.0;
};

inline constexpr std::size_t context_feature_count = 5;

/// |links| + |VMs| + 5.
inline std::size_t state_size(Topology const& topology)
{
    return topology.link_count() + topology.vm_count() + context_feature_count;
}

/// floor(levels * (initial - available) / initial), computed exactly.
inline std::uint32_t utilization_level(Amount initial, Amount available, std::uint32_t levels)
{
    if (initial <= Amount{}) {
        throw std::domain_error("initial capacity must be positive");
    }
    __int128 const used = static_cast<__int128>(initial.micros()) - available.micros();
    __int128 const scaled = used * levels;
    __int128 level = scaled / initial.micros();
    if (scaled < 0 && scaled % initial.micros() != 0) {
        --level;
    }
    level = std::clamp<__int128>(level, 0, levels);
    return static_cast<std::uint32_t>(level);
}

/**
 * Agent input: quantized utilization of every link, then every VM, each
 * emitted as level / levels; followed by service type, current node,
 * current VM, next-function progress and remaining latency budget, all in
 * [0, 1]. Pending episode charges are included when staged is given.
 */
inline std::vector<double> encode_state(Topology const& topology, ResourceLedger const& ledger,
                                        StagedCharges const* staged, StateContext const& ctx,
                                        std::uint32_t levels = 1000)
{
    std::vector<double> s;
    s.reserve(state_size(topology));
    double const inv = 1.0 / static_cast<double>(levels);
    for (auto const& link : topology.links()) {
        Amount avail = ledger.link_available(link.id);
        if (staged) {
            avail -= staged->link_total(link.id);
        }
        s.push_back(utilization_level(link.capacity, avail, levels) * inv);
    }
    for (auto const& vm : topology.vms()) {
        Amount avail = ledger.vm_available(vm.id);
        if (staged) {
            avail -= staged->vm_total(vm.id);
        }
        s.push_back(utilization_level(vm.capacity, avail, levels) * inv);
    }
    auto ratio = [](double num, double den) { return den > 0.0 ? std::clamp(num / den, 0.0, 1.0) : 0.0; };
    s.push_back(ratio(static_cast<double>(ctx.service + 1), static_cast<double>(ctx.service_count)));
    s.push_back(ratio(static_cast<double>(ctx.current_node),
                      static_cast<double>(topology.node_count() > 1 ? topology.node_count() - 1 : 1)));
    s.push_back(ctx.current_vm ? ratio(static_cast<double>(*ctx.current_vm + 1), static_cast<double>(topology.vm_count()))
                               : 0.0);
    s.push_back(ctx.function_count == 0
                    ? 1.0
                    : ratio(static_cast<double>(ctx.next_function), static_cast<double>(ctx.function_count)));
    s.push_back(ratio(ctx.latency_budget_s - ctx.elapsed_s, ctx.latency_budget_s));
    return s;
}

} // namespace nfv

#endif // NFV_LEDGER_HPP
