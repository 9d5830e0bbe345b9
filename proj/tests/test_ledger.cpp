#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace nfv;
using fixtures::units;

namespace {

Allocation vm_only(VmId vm, double amount)
{
    Allocation a;
    a.vm_charges.emplace_back(vm, units(amount));
    return a;
}

} // namespace

TEST(Ledger, ChargeArithmetic)
{
    Topology t = fixtures::graph(2, {{0, 1}}, 1, 1200.0);
    ResourceLedger l(t);
    l.charge(1, vm_only(0, 200), 10);
    EXPECT_EQ(l.vm_available(0), units(1000));
    l.charge(2, vm_only(0, 200), 10);
    EXPECT_EQ(l.vm_available(0), units(800));
    EXPECT_TRUE(l.conserved());
}

TEST(Ledger, OverdraftLeavesLedgerUnchanged)
{
    Topology t = fixtures::graph(2, {{0, 1}}, 1, 1200.0, 100.0);
    ResourceLedger l(t);
    l.charge(1, vm_only(0, 1000), 10);
    auto before = l.snapshot();
    EXPECT_THROW(l.charge(2, vm_only(0, 300), 10), InsufficientCapacity);
    EXPECT_EQ(l.snapshot(), before);
    EXPECT_FALSE(l.is_live(2));

    // The VM part fits but the link part does not: nothing is deducted.
    Allocation mixed = vm_only(1, 10);
    mixed.link_charges.emplace_back(0, units(60));
    mixed.link_charges.emplace_back(0, units(60));
    EXPECT_THROW(l.charge(3, mixed, 10), InsufficientCapacity);
    EXPECT_EQ(l.snapshot(), before);
    EXPECT_TRUE(l.conserved());
}

TEST(Ledger, RejectsDuplicateUserAndNegativeCharge)
{
    Topology t = fixtures::graph(2, {{0, 1}});
    ResourceLedger l(t);
    l.charge(1, vm_only(0, 1), 5);
    EXPECT_THROW(l.charge(1, vm_only(0, 1), 5), std::logic_error);
    Allocation neg;
    neg.vm_charges.emplace_back(0, Amount::from_micros(-1));
    EXPECT_THROW(l.charge(2, neg, 5), std::invalid_argument);
}

TEST(Ledger, ReleaseRestoresExactly)
{
    Topology t = fixtures::line3();
    ResourceLedger l(t);
    auto fresh = l.snapshot();
    Allocation a = vm_only(1, 123.456789);
    a.link_charges.emplace_back(0, units(0.064));
    a.link_charges.emplace_back(1, units(0.064));
    l.charge(7, a, 3);
    EXPECT_EQ(l.release(7), ReleaseStatus::released);
    EXPECT_EQ(l.snapshot(), fresh);
    EXPECT_TRUE(l.at_full_capacity());
    EXPECT_EQ(l.release(7), ReleaseStatus::unknown_user);
    EXPECT_EQ(l.snapshot(), fresh);
}

TEST(Ledger, InterleavedReleaseKeepsOtherCharges)
{
    Topology t = fixtures::line3();
    ResourceLedger l(t);
    l.charge(1, vm_only(0, 100), 5);
    l.charge(2, vm_only(0, 50), 5);
    l.release(1);
    EXPECT_EQ(l.vm_available(0), units(950));
    EXPECT_TRUE(l.is_live(2));
    EXPECT_TRUE(l.conserved());
}

TEST(Ledger, Departures)
{
    Topology t = fixtures::line3();
    ResourceLedger l(t);
    EXPECT_TRUE(l.apply_departures(0).empty());
    Request r;
    r.user = 4;
    r.arrival_slot = 0;
    r.lifetime_s = 240.0;
    l.charge(r.user, vm_only(1, 10), r.departure_slot());
    l.charge(9, vm_only(1, 10), 100);
    EXPECT_EQ(l.apply_departures(239), (std::vector<UserId>{9}));
    EXPECT_TRUE(l.is_live(4));
    EXPECT_EQ(l.apply_departures(240), (std::vector<UserId>{4}));
    EXPECT_TRUE(l.at_full_capacity());
}

TEST(Ledger, RandomChargeReleaseRoundTrip)
{
    GeneratorParams p;
    Topology t = generate_random_connected(p, 5);
    ResourceLedger l(t);
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<VmId> vm(0, t.vm_count() - 1);
    std::uniform_int_distribution<LinkId> link(0, t.link_count() - 1);
    std::uniform_real_distribution<double> amt(0.0, 400.0);
    std::vector<UserId> live;
    for (UserId u = 0; u < 10000; ++u) {
        Allocation a;
        for (int k = 0; k < 3; ++k) {
            a.vm_charges.emplace_back(vm(rng), units(amt(rng)));
            a.link_charges.emplace_back(link(rng), units(amt(rng)));
        }
        auto before = l.snapshot();
        try {
            l.charge(u, a, u + 50);
            live.push_back(u);
        } catch (InsufficientCapacity const&) {
            ASSERT_EQ(l.snapshot(), before);
        }
        ASSERT_TRUE(l.conserved());
        if (!live.empty() && rng() % 2 == 0) {
            std::size_t i = rng() % live.size();
            l.release(live[i]);
            live.erase(live.begin() + static_cast<std::ptrdiff_t>(i));
            ASSERT_TRUE(l.conserved());
        }
    }
    for (UserId u : live) {
        l.release(u);
    }
    EXPECT_TRUE(l.at_full_capacity());
}

TEST(Ledger, LiveCostSumsRecordedCosts)
{
    Topology t = fixtures::line3();
    ResourceLedger l(t);
    l.charge(1, vm_only(0, 1), 5, 10.5);
    l.charge(2, vm_only(0, 1), 5, 4.5);
    EXPECT_DOUBLE_EQ(l.live_cost(), 15.0);
    l.release(1);
    EXPECT_DOUBLE_EQ(l.live_cost(), 4.5);
}

TEST(StateEncoding, UtilizationLevels)
{
    EXPECT_EQ(utilization_level(units(6400), units(6400), 1000), 0u);
    EXPECT_EQ(utilization_level(units(6400), units(3200), 1000), 500u);
    EXPECT_EQ(utilization_level(units(6400), units(0), 1000), 1000u);
    EXPECT_EQ(utilization_level(units(3), units(2), 1000), 333u);
    EXPECT_THROW(utilization_level(units(0), units(0), 1000), std::domain_error);
}

TEST(StateEncoding, LayoutAndStagedCharges)
{
    Topology t = fixtures::graph(2, {{0, 1}}, 1, 1000.0, 6400.0);
    ResourceLedger l(t);
    Allocation a;
    a.link_charges.emplace_back(0, units(3200));
    l.charge(1, a, 5);
    StateContext ctx;
    ctx.service = 0;
    ctx.service_count = 2;
    ctx.current_node = 1;
    ctx.next_function = 1;
    ctx.function_count = 2;
    ctx.elapsed_s = 0.25;
    ctx.latency_budget_s = 1.0;
    auto s = encode_state(t, l, nullptr, ctx);
    ASSERT_EQ(s.size(), state_size(t));
    ASSERT_EQ(s.size(), 1u + 2u + 5u);
    EXPECT_DOUBLE_EQ(s[0], 0.5);
    EXPECT_DOUBLE_EQ(s[1], 0.0);
    EXPECT_DOUBLE_EQ(s[3], 0.5);  // service 1 of 2
    EXPECT_DOUBLE_EQ(s[4], 1.0);  // node 1 of {0, 1}
    EXPECT_DOUBLE_EQ(s[5], 0.0);  // no VM yet
    EXPECT_DOUBLE_EQ(s[6], 0.5);
    EXPECT_DOUBLE_EQ(s[7], 0.75);

    StagedCharges staged(t);
    staged.add_vm(1, units(250));
    auto s2 = encode_state(t, l, &staged, ctx);
    EXPECT_DOUBLE_EQ(s2[2], 0.25);
    for (double x : s2) {
        EXPECT_GE(x, 0.0);
        EXPECT_LE(x, 1.0);
    }
}

TEST(Ledger, SnapshotCsv)
{
    Topology t = fixtures::graph(2, {{0, 1}}, 1, 1200.0, 100.0);
    ResourceLedger l(t);
    std::ostringstream out;
    l.write_snapshot_csv(out, 3);
    EXPECT_EQ(out.str(), "slot,resource_kind,resource_id,capacity,available\n"
                         "3,vm,0,1200.000000,1200.000000\n"
                         "3,vm,1,1200.000000,1200.000000\n"
                         "3,link,0,100.000000,100.000000\n");
}
