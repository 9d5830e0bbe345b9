#ifndef NFV_MLP_HPP
#define NFV_MLP_HPP

#include <cmath>
#include <cstddef>
#include <memory>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nfv {

/**
 * Fully connected value network: rectifier hidden layers, identity output.
 * Layer l maps sizes[l] inputs to sizes[l + 1] outputs with W_l (out x in)
 * and b_l. Batches are column-major: one sample per column.
 */
class Mlp
{
public:
    struct Gradients
    {
        std::vector<Eigen::MatrixXd> weights;
        std::vector<Eigen::VectorXd> biases;
    };

    explicit Mlp(std::vector<std::size_t> sizes) : sizes_(std::move(sizes))
    {
        if (sizes_.size() < 2) {
            throw std::invalid_argument("an MLP needs an input and an output layer");
        }
        for (std::size_t s : sizes_) {
            if (s == 0) {
                throw std::invalid_argument("layer sizes must be positive");
            }
        }
        for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
            auto const in = static_cast<Eigen::Index>(sizes_[l]);
            auto const out = static_cast<Eigen::Index>(sizes_[l + 1]);
            weights_.push_back(Eigen::MatrixXd::Zero(out, in));
            biases_.push_back(Eigen::VectorXd::Zero(out));
        }
    }

    /// Uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
    void init_glorot(std::mt19937_64& rng)
    {
        for (std::size_t l = 0; l < weights_.size(); ++l) {
            double const limit = std::sqrt(6.0 / static_cast<double>(weights_[l].rows() + weights_[l].cols()));
            std::uniform_real_distribution<double> dist(-limit, limit);
            for (Eigen::Index i = 0; i < weights_[l].size(); ++i) {
                weights_[l].data()[i] = dist(rng);
            }
            biases_[l].setZero();
        }
    }

    std::vector<std::size_t> const& layer_sizes() const { return sizes_; }
    std::size_t input_size() const { return sizes_.front(); }
    std::size_t output_size() const { return sizes_.back(); }
    std::size_t layer_count() const { return weights_.size(); }

    std::size_t parameter_count() const
    {
        std::size_t n = 0;
        for (std::size_t l = 0; l < weights_.size(); ++l) {
            n += static_cast<std::size_t>(weights_[l].size() + biases_[l].size());
        }
        return n;
    }

    std::vector<Eigen::MatrixXd>& weights() { return weights_; }
    std::vector<Eigen::VectorXd>& biases() { return biases_; }
    std::vector<Eigen::MatrixXd> const& weights() const { return weights_; }
    std::vector<Eigen::VectorXd> const& biases() const { return biases_; }

    Eigen::VectorXd forward(std::span<double const> x) const
    {
        if (x.size() != input_size()) {
            throw std::invalid_argument("state length " + std::to_string(x.size()) + " != network input "
                                        + std::to_string(input_size()));
        }
        Eigen::VectorXd a = Eigen::Map<Eigen::VectorXd const>(x.data(), static_cast<Eigen::Index>(x.size()));
        for (std::size_t l = 0; l < weights_.size(); ++l) {
            Eigen::VectorXd z = weights_[l] * a + biases_[l];
            a = (l + 1 < weights_.size()) ? Eigen::VectorXd(z.cwiseMax(0.0)) : z;
        }
        return a;
    }

    Eigen::MatrixXd forward_batch(Eigen::MatrixXd const& x) const
    {
        if (static_cast<std::size_t>(x.rows()) != input_size()) {
            throw std::invalid_argument("batch rows do not match the network input");
        }
        Eigen::MatrixXd a = x;
        for (std::size_t l = 0; l < weights_.size(); ++l) {
            Eigen::MatrixXd z = (weights_[l] * a).colwise() + biases_[l];
            a = (l + 1 < weights_.size()) ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z;
        }
        return a;
    }

    /**
     * Mean over the batch of (target_i - Q(x_i)[action_i])^2. When grads is
     * non-null it receives the gradient with respect to every parameter;
     * only the selected outputs contribute.
     */
    double selected_mse(Eigen::MatrixXd const& x, std::span<std::size_t const> actions,
                        std::span<double const> targets, Gradients* grads) const
    {
        auto const batch = x.cols();
        if (static_cast<std::size_t>(batch) != actions.size() || actions.size() != targets.size() || batch == 0) {
            throw std::invalid_argument("batch, action and target sizes differ");
        }
        std::size_t const layers = weights_.size();
        std::vector<Eigen::MatrixXd> acts;
        acts.reserve(layers + 1);
        acts.push_back(x);
        for (std::size_t l = 0; l < layers; ++l) {
            Eigen::MatrixXd z = (weights_[l] * acts.back()).colwise() + biases_[l];
            if (l + 1 < layers) {
                z = z.cwiseMax(0.0);
            }
            acts.push_back(std::move(z));
        }
        Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(acts.back().rows(), batch);
        double loss = 0.0;
        double const inv_n = 1.0 / static_cast<double>(batch);
        for (Eigen::Index i = 0; i < batch; ++i) {
            auto const a = static_cast<Eigen::Index>(actions[static_cast<std::size_t>(i)]);
            if (a >= acts.back().rows()) {
                throw std::out_of_range("action outside the network output");
            }
            double const err = targets[static_cast<std::size_t>(i)] - acts.back()(a, i);
            loss += err * err;
            delta(a, i) = -2.0 * err * inv_n;
        }
        loss *= inv_n;
        if (grads == nullptr) {
            return loss;
        }
        grads->weights.assign(layers, {});
        grads->biases.assign(layers, {});
        for (std::size_t l = layers; l-- > 0;) {
            grads->weights[l] = delta * acts[l].transpose();
            grads->biases[l] = delta.rowwise().sum();
            if (l > 0) {
                Eigen::MatrixXd back = weights_[l].transpose() * delta;
                // Rectifier derivative: active where the forward output was positive.
                delta = back.cwiseProduct((acts[l].array() > 0.0).cast<double>().matrix());
            }
        }
        return loss;
    }

    bool all_finite() const
    {
        for (std::size_t l = 0; l < weights_.size(); ++l) {
            if (!weights_[l].allFinite() || !biases_[l].allFinite()) {
                return false;
            }
        }
        return true;
    }

    /// Weights then biases per layer, column-major within each matrix.
    std::vector<double> flatten() const
    {
        std::vector<double> out;
        out.reserve(parameter_count());
        for (std::size_t l = 0; l < weights_.size(); ++l) {
            out.insert(out.end(), weights_[l].data(), weights_[l].data() + weights_[l].size());
            out.insert(out.end(), biases_[l].data(), biases_[l].data() + biases_[l].size());
        }
        return out;
    }

    void unflatten(std::span<double const> params)
    {
        if (params.size() != parameter_count()) {
            throw std::invalid_argument("parameter vector has the wrong length");
        }
        std::size_t k = 0;
        for (std::size_t l = 0; l < weights_.size(); ++l) {
            for (Eigen::Index i = 0; i < weights_[l].size(); ++i) {
                weights_[l].data()[i] = params[k++];
            }
            for (Eigen::Index i = 0; i < biases_[l].size(); ++i) {
                biases_[l].data()[i] = params[k++];
            }
        }
    }

private:
    std::vector<std::size_t> sizes_;
    std::vector<Eigen::MatrixXd> weights_;
    std::vector<Eigen::VectorXd> biases_;
};

class Optimizer
{
public:
    virtual ~Optimizer() = default;
    virtual void update(Mlp& net, Mlp::Gradients const& grads) = 0;
    virtual std::unique_ptr<Optimizer> clone() const = 0;
};

/// Plain stochastic gradient descent.
class SgdOptimizer final : public Optimizer
{
public:
    explicit SgdOptimizer(double learning_rate) : lr_(learning_rate) {}

    void update(Mlp& net, Mlp::Gradients const& grads) override
    {
        for (std::size_t l = 0; l < net.layer_count(); ++l) {
            net.weights()[l] -= lr_ * grads.weights[l];
            net.biases()[l] -= lr_ * grads.biases[l];
        }
    }

    std::unique_ptr<Optimizer> clone() const override { return std::make_unique<SgdOptimizer>(*this); }

private:
    double lr_;
};

class AdamOptimizer final : public Optimizer
{
public:
    explicit AdamOptimizer(double learning_rate, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : lr_(learning_rate), beta1_(beta1), beta2_(beta2), eps_(eps)
    {
    }

    void update(Mlp& net, Mlp::Gradients const& grads) override
    {
        if (mw_.empty()) {
            for (std::size_t l = 0; l < net.layer_count(); ++l) {
                mw_.push_back(Eigen::MatrixXd::Zero(net.weights()[l].rows(), net.weights()[l].cols()));
                vw_.push_back(mw_.back());
                mb_.push_back(Eigen::VectorXd::Zero(net.biases()[l].size()));
                vb_.push_back(mb_.back());
            }
        }
        ++t_;
        double const c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
        double const c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
        for (std::size_t l = 0; l < net.layer_count(); ++l) {
            mw_[l] = beta1_ * mw_[l] + (1.0 - beta1_) * grads.weights[l];
            vw_[l] = beta2_ * vw_[l] + (1.0 - beta2_) * grads.weights[l].cwiseAbs2();
            mb_[l] = beta1_ * mb_[l] + (1.0 - beta1_) * grads.biases[l];
            vb_[l] = beta2_ * vb_[l] + (1.0 - beta2_) * grads.biases[l].cwiseAbs2();
            net.weights()[l].array() -=
                lr_ * (mw_[l].array() / c1) / ((vw_[l].array() / c2).sqrt() + eps_);
            net.biases()[l].array() -= lr_ * (mb_[l].array() / c1) / ((vb_[l].array() / c2).sqrt() + eps_);
        }
    }

    std::unique_ptr<Optimizer> clone() const override { return std::make_unique<AdamOptimizer>(*this); }

private:
    double lr_;
    double beta1_;
    double beta2_;
    double eps_;
    long t_ = 0;
    std::vector<Eigen::MatrixXd> mw_, vw_;
    std::vector<Eigen::VectorXd> mb_, vb_;
};

} // namespace nfv

#endif // NFV_MLP_HPP
