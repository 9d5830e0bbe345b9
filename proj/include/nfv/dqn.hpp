#ifndef NFV_DQN_HPP
#define NFV_DQN_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "mlp.hpp"

namespace nfv {

struct Transition
{
    std::vector<double> state;
    std::size_t action = 0;
    double reward = 0.0;
    std::vector<double> next_state;
    bool terminal = false;
};

/// FIFO experience memory; the oldest transition is evicted past capacity.
class ReplayBuffer
{
public:
    explicit ReplayBuffer(std::size_t capacity = 2000) : capacity_(capacity)
    {
        if (capacity == 0) {
            throw std::invalid_argument("replay capacity must be positive");
        }
    }

    void push(Transition t)
    {
        if (items_.size() == capacity_) {
            items_.pop_front();
        }
        items_.push_back(std::move(t));
    }

    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    bool empty() const { return items_.empty(); }
    Transition const& at(std::size_t i) const { return items_.at(i); }

    /// Indices of a uniform minibatch: without replacement when enough items
    /// are stored, with replacement otherwise.
    std::vector<std::size_t> sample_indices(std::mt19937_64& rng, std::size_t n) const
    {
        if (items_.empty()) {
            throw std::logic_error("sampling an empty replay buffer");
        }
        std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
        std::vector<std::size_t> out;
        out.reserve(n);
        if (items_.size() < n) {
            for (std::size_t i = 0; i < n; ++i) {
                out.push_back(pick(rng));
            }
            return out;
        }
        while (out.size() < n) {
            std::size_t const i = pick(rng);
            if (std::find(out.begin(), out.end(), i) == out.end()) {
                out.push_back(i);
            }
        }
        return out;
    }

    std::vector<Transition const*> sample(std::mt19937_64& rng, std::size_t n) const
    {
        std::vector<Transition const*> out;
        for (std::size_t i : sample_indices(rng, n)) {
            out.push_back(&items_[i]);
        }
        return out;
    }

private:
    std::size_t capacity_;
    std::deque<Transition> items_;
};

/// Multiplicative per-episode decay with a floor.
class EpsilonSchedule
{
public:
    EpsilonSchedule(double start = 1.0, double decay = 0.9, double floor = 0.1)
        : value_(start), decay_(decay), floor_(floor)
    {
        if (!(start >= 0.0 && start <= 1.0) || !(floor >= 0.0 && floor <= 1.0) || !(decay > 0.0 && decay <= 1.0)) {
            throw std::invalid_argument("invalid epsilon schedule");
        }
        value_ = std::max(value_, floor_);
    }

    double value() const { return value_; }
    void advance() { value_ = std::max(floor_, value_ * decay_); }
    void set(double v) { value_ = std::clamp(v, floor_, 1.0); }

private:
    double value_;
    double decay_;
    double floor_;
};

/**
 * Epsilon-greedy choice. Explores uniformly over `allowed` (or all actions
 * when empty) with probability epsilon, otherwise takes the argmax with ties
 * going to the lowest index.
 */
inline std::size_t select_action(std::span<double const> q, double epsilon, std::mt19937_64& rng,
                                 std::span<std::size_t const> allowed = {})
{
    if (q.empty()) {
        throw std::invalid_argument("empty q-vector");
    }
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw std::invalid_argument("epsilon outside [0, 1]");
    }
    double const u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    if (u < epsilon) {
        if (allowed.empty()) {
            return std::uniform_int_distribution<std::size_t>(0, q.size() - 1)(rng);
        }
        return allowed[std::uniform_int_distribution<std::size_t>(0, allowed.size() - 1)(rng)];
    }
    if (allowed.empty()) {
        return static_cast<std::size_t>(std::max_element(q.begin(), q.end()) - q.begin());
    }
    std::size_t best = allowed.front();
    for (std::size_t a : allowed) {
        if (q[a] > q[best] || (q[a] == q[best] && a < best)) {
            best = a;
        }
    }
    return best;
}

enum class TargetMode
{
    td,         ///< r + gamma * max Q(s', .) for non-terminal transitions
    reward_only ///< regress Q(s, a) on r alone
};

enum class OptimizerKind
{
    sgd,
    adam
};

struct DqnConfig
{
    std::size_t hidden_layers = 2;
    std::size_t hidden_units = 64;
    double learning_rate = 0.001;
    double discount = 0.95;
    double epsilon_start = 1.0;
    double epsilon_decay = 0.9;
    double epsilon_min = 0.1;
    std::size_t replay_capacity = 2000;
    std::size_t batch_size = 8;
    TargetMode target = TargetMode::td;
    /// Steps between copies into a frozen target network; 0 bootstraps from the online network.
    std::size_t target_sync_interval = 0;
    OptimizerKind optimizer = OptimizerKind::sgd;
    /// Restrict both exploration and argmax to the currently possible actions.
    bool mask_invalid = false;
};

/// Training targets for a minibatch.
inline std::vector<double> td_targets(Mlp const& bootstrap_net, std::span<Transition const* const> batch,
                                      double gamma, TargetMode mode)
{
    std::vector<double> y;
    y.reserve(batch.size());
    for (auto const* t : batch) {
        double target = t->reward;
        if (mode == TargetMode::td && !t->terminal) {
            target += gamma * bootstrap_net.forward(t->next_state).maxCoeff();
        }
        y.push_back(target);
    }
    return y;
}

/**
 * One gradient step on the mean squared TD error of the selected actions.
 * Returns the pre-update batch loss. Throws InvariantViolation on a
 * non-finite loss or parameters.
 */
inline double train_step(Mlp& net, std::span<Transition const* const> batch, Optimizer& optimizer, double gamma,
                         TargetMode mode = TargetMode::td, Mlp const* target_net = nullptr)
{
    if (batch.empty()) {
        throw std::invalid_argument("empty training batch");
    }
    std::vector<double> const y = td_targets(target_net ? *target_net : net, batch, gamma, mode);
    Eigen::MatrixXd x(static_cast<Eigen::Index>(net.input_size()), static_cast<Eigen::Index>(batch.size()));
    std::vector<std::size_t> actions;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        if (batch[i]->state.size() != net.input_size()) {
            throw std::invalid_argument("transition state has the wrong length");
        }
        x.col(static_cast<Eigen::Index>(i)) =
            Eigen::Map<Eigen::VectorXd const>(batch[i]->state.data(), static_cast<Eigen::Index>(net.input_size()));
        actions.push_back(batch[i]->action);
    }
    Mlp::Gradients grads;
    double const loss = net.selected_mse(x, actions, y, &grads);
    if (!std::isfinite(loss)) {
        throw InvariantViolation("non-finite training loss");
    }
    optimizer.update(net, grads);
    if (!net.all_finite()) {
        throw InvariantViolation("non-finite network parameters after update");
    }
    return loss;
}

/**
 * Epsilon-greedy deep Q-learning agent with FIFO experience replay.
 */
class DqnAgent
{
public:
    DqnAgent(std::size_t state_size, std::size_t action_count, DqnConfig const& config, std::uint64_t seed)
        : config_(config), net_(layer_sizes(state_size, action_count, config)),
          epsilon_(config.epsilon_start, config.epsilon_decay, config.epsilon_min), replay_(config.replay_capacity),
          rng_(seed)
    {
        net_.init_glorot(rng_);
        if (config.optimizer == OptimizerKind::adam) {
            optimizer_ = std::make_unique<AdamOptimizer>(config.learning_rate);
        } else {
            optimizer_ = std::make_unique<SgdOptimizer>(config.learning_rate);
        }
        if (config.target_sync_interval > 0) {
            target_.emplace(net_);
        }
    }

    static std::vector<std::size_t> layer_sizes(std::size_t state_size, std::size_t action_count,
                                                DqnConfig const& config)
    {
        std::vector<std::size_t> sizes{state_size};
        for (std::size_t i = 0; i < config.hidden_layers; ++i) {
            sizes.push_back(config.hidden_units);
        }
        sizes.push_back(action_count);
        return sizes;
    }

    std::size_t act(std::span<double const> state, std::span<std::size_t const> allowed = {})
    {
        Eigen::VectorXd const q = net_.forward(state);
        std::span<double const> qs(q.data(), static_cast<std::size_t>(q.size()));
        if (!config_.mask_invalid) {
            allowed = {};
        } else if (allowed.empty()) {
            // Nothing is possible; any index leads to rejection.
            allowed = {};
        }
        return select_action(qs, epsilon_.value(), rng_, allowed);
    }

    void remember(Transition t) { replay_.push(std::move(t)); }

    /// One minibatch update; nullopt while the buffer is empty.
    std::optional<double> train()
    {
        if (replay_.empty()) {
            return std::nullopt;
        }
        auto const batch = replay_.sample(rng_, config_.batch_size);
        double const loss =
            train_step(net_, batch, *optimizer_, config_.discount, config_.target, target_ ? &*target_ : nullptr);
        ++updates_;
        if (target_ && updates_ % config_.target_sync_interval == 0) {
            *target_ = net_;
        }
        return loss;
    }

    void end_episode() { epsilon_.advance(); }

    double epsilon() const { return epsilon_.value(); }
    ReplayBuffer const& replay() const { return replay_; }
    Mlp const& network() const { return net_; }
    Mlp& network() { return net_; }
    DqnConfig const& config() const { return config_; }
    std::size_t updates() const { return updates_; }

    /// Layer sizes, parameters and epsilon; the replay memory is not saved.
    nlohmann::json checkpoint() const
    {
        return {{"format", "nfv-dqn-checkpoint"},
                {"version", 1},
                {"layer_sizes", net_.layer_sizes()},
                {"parameters", net_.flatten()},
                {"epsilon", epsilon_.value()}};
    }

    /// Throws ConfigError when the checkpoint does not match this agent's shape.
    void load_checkpoint(nlohmann::json const& j)
    {
        try {
            if (j.at("format").get<std::string>() != "nfv-dqn-checkpoint" || j.at("version").get<int>() != 1) {
                throw ConfigError("unsupported checkpoint format");
            }
            auto const sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
            if (sizes != net_.layer_sizes()) {
                throw ConfigError("checkpoint layer sizes do not match the topology-derived network shape");
            }
            auto const params = j.at("parameters").get<std::vector<double>>();
            net_.unflatten(params);
            epsilon_.set(j.at("epsilon").get<double>());
            if (target_) {
                *target_ = net_;
            }
        } catch (nlohmann::json::exception const& e) {
            throw ConfigError(std::string("malformed checkpoint: ") + e.what());
        } catch (std::invalid_argument const& e) {
            throw ConfigError(std::string("bad checkpoint: ") + e.what());
        }
    }

private:
    DqnConfig config_;
    Mlp net_;
    std::optional<Mlp> target_;
    EpsilonSchedule epsilon_;
    ReplayBuffer replay_;
    std::unique_ptr<Optimizer> optimizer_;
    std::mt19937_64 rng_;
    std::size_t updates_ = 0;
};

} // namespace nfv

#endif // NFV_DQN_HPP
