#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "nfv/nfv.hpp"

using namespace nfv;

namespace {

Mlp random_net(std::vector<std::size_t> sizes, std::uint64_t seed)
{
    Mlp net(std::move(sizes));
    std::mt19937_64 rng(seed);
    net.init_glorot(rng);
    // Non-zero biases exercise the bias gradients too.
    std::normal_distribution<double> n(0.0, 0.1);
    for (auto& b : net.biases()) {
        for (Eigen::Index i = 0; i < b.size(); ++i) {
            b[i] = n(rng);
        }
    }
    return net;
}

std::vector<double> flat_grads(Mlp::Gradients const& g)
{
    std::vector<double> out;
    for (std::size_t l = 0; l < g.weights.size(); ++l) {
        out.insert(out.end(), g.weights[l].data(), g.weights[l].data() + g.weights[l].size());
        out.insert(out.end(), g.biases[l].data(), g.biases[l].data() + g.biases[l].size());
    }
    return out;
}

double fd_relative_error(Mlp net, Eigen::MatrixXd const& x, std::vector<std::size_t> const& a,
                         std::vector<double> const& y)
{
    Mlp::Gradients g;
    net.selected_mse(x, a, y, &g);
    auto const analytic = flat_grads(g);
    auto params = net.flatten();
    double const h = 1e-5;
    double diff = 0.0;
    double norm = 0.0;
    for (std::size_t k = 0; k < params.size(); ++k) {
        double const keep = params[k];
        params[k] = keep + h;
        net.unflatten(params);
        double const up = net.selected_mse(x, a, y, nullptr);
        params[k] = keep - h;
        net.unflatten(params);
        double const down = net.selected_mse(x, a, y, nullptr);
        params[k] = keep;
        double const numeric = (up - down) / (2 * h);
        diff += (numeric - analytic[k]) * (numeric - analytic[k]);
        norm += numeric * numeric + analytic[k] * analytic[k];
    }
    return std::sqrt(diff) / std::max(std::sqrt(norm), 1e-300);
}

Transition make_transition(std::vector<double> s, std::size_t a, double r, bool terminal = true)
{
    Transition t;
    t.next_state = s;
    t.state = std::move(s);
    t.action = a;
    t.reward = r;
    t.terminal = terminal;
    return t;
}

} // namespace

TEST(Mlp, ZeroNetworkOutputsZero)
{
    Mlp net({4, 8, 3});
    std::vector<double> x{1, 2, 3, 4};
    EXPECT_TRUE(net.forward(x).isZero(0.0));
    EXPECT_THROW(net.forward(std::vector<double>{1, 2}), std::invalid_argument);
    EXPECT_THROW(Mlp({4}), std::invalid_argument);
    EXPECT_THROW(Mlp({4, 0, 2}), std::invalid_argument);
}

TEST(Mlp, ParameterCountAtDefaultArchitecture)
{
    Mlp net(DqnAgent::layer_sizes(65, 120, DqnConfig{}));
    EXPECT_EQ(net.layer_sizes(), (std::vector<std::size_t>{65, 64, 64, 120}));
    // 65*64+64 + 64*64+64 + 64*120+120
    EXPECT_EQ(net.parameter_count(), 4224u + 4160u + 7800u);
}

TEST(Mlp, ForwardIsDeterministic)
{
    Mlp net = random_net({6, 5, 4}, 3);
    std::vector<double> x{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
    auto a = net.forward(x);
    auto b = net.forward(x);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i], b[i]);
    }
    Eigen::MatrixXd batch = Eigen::Map<Eigen::VectorXd>(x.data(), 6);
    EXPECT_TRUE(net.forward_batch(batch).col(0).isApprox(a, 1e-15));
}

TEST(Mlp, FlattenRoundTrip)
{
    Mlp net = random_net({3, 4, 2}, 5);
    auto p = net.flatten();
    Mlp other({3, 4, 2});
    other.unflatten(p);
    EXPECT_EQ(other.flatten(), p);
    p.pop_back();
    EXPECT_THROW(other.unflatten(p), std::invalid_argument);
}

TEST(Mlp, GradientMatchesFiniteDifferences)
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto sizes : std::vector<std::vector<std::size_t>>{{5, 7, 3}, {6, 8, 8, 4}, {3, 2}, {4, 6, 5, 4, 3}}) {
        for (int trial = 0; trial < 3; ++trial) {
            Mlp net = random_net(sizes, rng());
            std::size_t const n = 4;
            Eigen::MatrixXd x(static_cast<Eigen::Index>(sizes.front()), static_cast<Eigen::Index>(n));
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                x.data()[i] = u(rng);
            }
            std::vector<std::size_t> a;
            std::vector<double> y;
            for (std::size_t i = 0; i < n; ++i) {
                a.push_back(rng() % sizes.back());
                y.push_back(u(rng) * 2 - 1);
            }
            EXPECT_LT(fd_relative_error(net, x, a, y), 1e-4);
        }
    }
}

TEST(Epsilon, Schedule)
{
    EpsilonSchedule e;
    EXPECT_DOUBLE_EQ(e.value(), 1.0);
    double prev = e.value();
    for (int i = 0; i < 100; ++i) {
        e.advance();
        EXPECT_LE(e.value(), prev);
        EXPECT_GE(e.value(), 0.1);
        prev = e.value();
    }
    EXPECT_DOUBLE_EQ(e.value(), 0.1);
    EpsilonSchedule f;
    f.advance();
    EXPECT_DOUBLE_EQ(f.value(), 0.9);
}

TEST(SelectAction, GreedyAndTies)
{
    std::mt19937_64 rng(1);
    EXPECT_EQ(select_action(std::vector<double>{1, 3, 2}, 0.0, rng), 1u);
    EXPECT_EQ(select_action(std::vector<double>{5, 5}, 0.0, rng), 0u);
    EXPECT_THROW(select_action(std::vector<double>{}, 0.0, rng), std::invalid_argument);
    EXPECT_THROW(select_action(std::vector<double>{1}, 1.5, rng), std::invalid_argument);
}

TEST(SelectAction, FullExplorationIsUniform)
{
    std::mt19937_64 rng(2);
    std::vector<double> q{9, 1, 1, 1, 1};
    std::vector<std::size_t> counts(q.size());
    std::size_t const n = 100000;
    for (std::size_t i = 0; i < n; ++i) {
        ++counts[select_action(q, 1.0, rng)];
    }
    double const p = 1.0 / q.size();
    double const sigma = std::sqrt(n * p * (1 - p));
    for (auto c : counts) {
        EXPECT_NEAR(static_cast<double>(c), n * p, 3 * sigma);
    }
}

TEST(SelectAction, ExplorationRespectsAllowedSet)
{
    std::mt19937_64 rng(3);
    std::vector<double> q{9, 1, 1, 1};
    std::vector<std::size_t> allowed{1, 3};
    for (int i = 0; i < 1000; ++i) {
        auto a = select_action(q, 1.0, rng, allowed);
        EXPECT_TRUE(a == 1 || a == 3);
    }
    EXPECT_EQ(select_action(q, 0.0, rng, allowed), 1u);
}

TEST(Replay, FifoEviction)
{
    ReplayBuffer buf;
    for (std::size_t i = 0; i < 2001; ++i) {
        buf.push(make_transition({0.0}, 0, static_cast<double>(i)));
        EXPECT_LE(buf.size(), 2000u);
    }
    EXPECT_EQ(buf.size(), 2000u);
    double lowest = 1e9;
    for (std::size_t i = 0; i < buf.size(); ++i) {
        lowest = std::min(lowest, buf.at(i).reward);
    }
    EXPECT_EQ(lowest, 1.0);
}

TEST(Replay, SmallBufferSamplesStoredItemsOnly)
{
    ReplayBuffer buf;
    std::mt19937_64 rng(4);
    EXPECT_THROW(buf.sample(rng, 8), std::logic_error);
    for (int i = 0; i < 3; ++i) {
        buf.push(make_transition({0.0}, 0, i));
    }
    auto batch = buf.sample(rng, 8);
    EXPECT_EQ(batch.size(), 8u);
    for (auto const* t : batch) {
        EXPECT_GE(t->reward, 0.0);
        EXPECT_LE(t->reward, 2.0);
    }
}

TEST(Replay, SamplingIsUniformAndDistinct)
{
    ReplayBuffer buf(10);
    for (int i = 0; i < 10; ++i) {
        buf.push(make_transition({0.0}, 0, i));
    }
    std::mt19937_64 rng(5);
    std::vector<double> counts(10);
    int const draws = 20000;
    for (int d = 0; d < draws; ++d) {
        auto idx = buf.sample_indices(rng, 4);
        std::sort(idx.begin(), idx.end());
        ASSERT_EQ(std::unique(idx.begin(), idx.end()), idx.end());
        for (auto i : idx) {
            ++counts[i];
        }
    }
    double const expected = draws * 4 / 10.0;
    double chi2 = 0.0;
    for (double c : counts) {
        chi2 += (c - expected) * (c - expected) / expected;
    }
    EXPECT_LT(chi2, 27.88); // 99.9th percentile of chi-square with 9 degrees of freedom
}

TEST(Train, FixedPointHasZeroLoss)
{
    Mlp net = random_net({3, 4, 2}, 6);
    std::vector<double> s{0.2, 0.4, 0.6};
    double const q = net.forward(s)[1];
    Transition t = make_transition(s, 1, q);
    Transition const* batch[] = {&t};
    auto before = net.flatten();
    SgdOptimizer sgd(0.1);
    EXPECT_NEAR(train_step(net, batch, sgd, 0.95), 0.0, 1e-24);
    auto after = net.flatten();
    for (std::size_t i = 0; i < before.size(); ++i) {
        EXPECT_NEAR(after[i], before[i], 1e-12);
    }
}

TEST(Train, SingletonConverges)
{
    Mlp net = random_net({4, 16, 16, 3}, 7);
    Transition t = make_transition({0.1, 0.9, 0.3, 0.5}, 2, 1.7);
    Transition const* batch[] = {&t};
    SgdOptimizer sgd(0.01);
    double loss = 1.0;
    int steps = 0;
    for (; steps < 10000 && loss >= 1e-6; ++steps) {
        train_step(net, batch, sgd, 0.95);
        loss = std::pow(net.forward(t.state)[2] - 1.7, 2);
    }
    EXPECT_LT(loss, 1e-6) << "after " << steps << " steps";
}

TEST(Train, SmallStepReducesFrozenBatchLoss)
{
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0, 1);
    Mlp net = random_net({5, 12, 12, 4}, 9);
    std::vector<Transition> store;
    for (int i = 0; i < 8; ++i) {
        store.push_back(make_transition({u(rng), u(rng), u(rng), u(rng), u(rng)}, rng() % 4, u(rng), true));
    }
    std::vector<Transition const*> batch;
    for (auto const& t : store) {
        batch.push_back(&t);
    }
    for (double lr : {1e-3, 1e-4}) {
        Mlp copy = net;
        SgdOptimizer sgd(lr);
        double const before = train_step(copy, batch, sgd, 0.95);
        SgdOptimizer none(0.0);
        double const after = train_step(copy, batch, none, 0.95);
        if (after < before) {
            SUCCEED();
            return;
        }
    }
    FAIL() << "no descent at lr 1e-3 or 1e-4";
}

TEST(Train, TdTargetsBootstrapOnlyNonTerminal)
{
    Mlp net({1, 2});
    net.biases()[0] << 3.0, 5.0;
    Transition a = make_transition({0.0}, 0, 1.0, true);
    Transition b = make_transition({0.0}, 0, 1.0, false);
    Transition const* batch[] = {&a, &b};
    auto y = td_targets(net, batch, 0.5, TargetMode::td);
    EXPECT_DOUBLE_EQ(y[0], 1.0);
    EXPECT_DOUBLE_EQ(y[1], 1.0 + 0.5 * 5.0);
    auto r = td_targets(net, batch, 0.5, TargetMode::reward_only);
    EXPECT_DOUBLE_EQ(r[1], 1.0);
}

TEST(Train, NonFiniteLossAborts)
{
    Mlp net({1, 2});
    Transition t = make_transition({0.0}, 0, std::nan(""));
    Transition const* batch[] = {&t};
    SgdOptimizer sgd(0.1);
    EXPECT_THROW(train_step(net, batch, sgd, 0.9), InvariantViolation);
}

TEST(Agent, SameSeedSameDecisions)
{
    DqnConfig cfg;
    cfg.hidden_units = 8;
    auto run = [&](std::uint64_t seed) {
        DqnAgent agent(4, 6, cfg, seed);
        std::mt19937_64 rng(0);
        std::uniform_real_distribution<double> u(0, 1);
        std::vector<std::size_t> acts;
        for (int ep = 0; ep < 30; ++ep) {
            std::vector<double> s{u(rng), u(rng), u(rng), u(rng)};
            auto a = agent.act(s);
            acts.push_back(a);
            agent.remember(make_transition(s, a, u(rng)));
            agent.train();
            agent.end_episode();
        }
        return std::make_pair(acts, agent.network().flatten());
    };
    EXPECT_EQ(run(11), run(11));
    EXPECT_NE(run(11).second, run(12).second);
}

TEST(Agent, EpsilonDecaysPerEpisode)
{
    DqnAgent agent(2, 2, DqnConfig{}, 1);
    EXPECT_DOUBLE_EQ(agent.epsilon(), 1.0);
    agent.end_episode();
    EXPECT_DOUBLE_EQ(agent.epsilon(), 0.9);
}

TEST(Agent, TrainWaitsForData)
{
    DqnAgent agent(2, 2, DqnConfig{}, 1);
    EXPECT_FALSE(agent.train().has_value());
    agent.remember(make_transition({0.1, 0.2}, 1, 1.0));
    EXPECT_TRUE(agent.train().has_value());
    EXPECT_EQ(agent.updates(), 1u);
}

TEST(Agent, CheckpointRoundTrip)
{
    DqnConfig cfg;
    cfg.hidden_units = 5;
    DqnAgent a(3, 4, cfg, 2);
    a.end_episode();
    auto j = a.checkpoint();
    EXPECT_EQ(j.at("format"), "nfv-dqn-checkpoint");
    DqnAgent b(3, 4, cfg, 99);
    b.load_checkpoint(j);
    EXPECT_EQ(b.network().flatten(), a.network().flatten());
    EXPECT_DOUBLE_EQ(b.epsilon(), a.epsilon());

    DqnAgent wrong(3, 6, cfg, 2);
    EXPECT_THROW(wrong.load_checkpoint(j), ConfigError);
    auto broken = j;
    broken.erase("parameters");
    EXPECT_THROW(b.load_checkpoint(broken), ConfigError);
}
