#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace fastcharge {

using Rng = std::mt19937_64;

enum class OutputHead {
    linear,
    bounded,  // lo + (hi - lo) * sigmoid(z)
};

/// Activations kept by a forward pass for the matching backward pass.
struct MlpCache {
    std::vector<Eigen::MatrixXd> inputs;  // input of every layer
    std::vector<Eigen::MatrixXd> pre;     // pre-activation of every layer
    Eigen::MatrixXd output;
    Eigen::MatrixXd delta, back;          // backward scratch
};

/// Fully connected network with ReLU hidden layers. All weights and biases
/// live in one flat vector: for each layer, W (out x in, column-major) then b.
/// Batches are columns.
class Mlp {
public:
    Mlp() = default;
    Mlp(std::vector<int> sizes, OutputHead head = OutputHead::linear, double lo = 0.0,
        double hi = 1.0);

    /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for hidden layers and
    /// Uniform(-final_scale, final_scale) for the output layer.
    void initialize(Rng& rng, double final_scale = 3e-3);

    int input_dim() const { return sizes_.front(); }
    int output_dim() const { return sizes_.back(); }
    const std::vector<int>& sizes() const { return sizes_; }
    OutputHead head() const { return head_; }
    double low() const { return lo_; }
    double high() const { return hi_; }
    std::size_t parameter_count() const { return static_cast<std::size_t>(params_.size()); }

    Eigen::VectorXd& params() { return params_; }
    const Eigen::VectorXd& params() const { return params_; }

    Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
    Eigen::MatrixXd forward(const Eigen::MatrixXd& x, MlpCache& cache) const;

    /// Reverse pass for dL/d(output) = grad_out. Adds dL/dparams into grad
    /// (resized and zeroed if its size is wrong) and returns dL/d(input).
    Eigen::MatrixXd backward(MlpCache& cache, const Eigen::MatrixXd& grad_out,
                             Eigen::VectorXd& grad) const;
    /// Reverse pass for dL/d(input) only.
    Eigen::MatrixXd backward_input(MlpCache& cache, const Eigen::MatrixXd& grad_out) const;

private:
    Eigen::MatrixXd backward_impl(MlpCache& cache, const Eigen::MatrixXd& grad_out,
                                  Eigen::VectorXd* grad) const;
    std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
    std::size_t bias_offset(std::size_t layer) const {
        return offsets_[layer] + static_cast<std::size_t>(sizes_[layer + 1] * sizes_[layer]);
    }
    Eigen::Map<const Eigen::MatrixXd> weight(std::size_t layer) const;
    Eigen::Map<const Eigen::VectorXd> bias(std::size_t layer) const;

    std::vector<int> sizes_;
    std::vector<std::size_t> offsets_;
    OutputHead head_{OutputHead::linear};
    double lo_{0.0};
    double hi_{1.0};
    Eigen::VectorXd params_;
};

/// target <- tau * online + (1 - tau) * target, elementwise.
void soft_update(Eigen::VectorXd& target, const Eigen::VectorXd& online, double tau);

struct AdamConfig {
    double beta1{0.9};
    double beta2{0.999};
    double epsilon{1e-8};
};

struct AdamState {
    Eigen::VectorXd m;
    Eigen::VectorXd v;
    long step{0};
};

/// One bias-corrected Adam step (descent on grads).
void adam_update(Eigen::VectorXd& params, const Eigen::VectorXd& grads, double lr, AdamState& state,
                 const AdamConfig& cfg = {});

}  // namespace fastcharge
