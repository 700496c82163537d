#include "fastcharge/mlp.hpp"

#include <cmath>

#include "fastcharge/errors.hpp"

namespace fastcharge {

Mlp::Mlp(std::vector<int> sizes, OutputHead head, double lo, double hi)
    : sizes_(std::move(sizes)), head_(head), lo_(lo), hi_(hi)
{
    if (sizes_.size() < 2) throw ConfigError("mlp needs at least an input and an output layer");
    for (int s : sizes_)
        if (s < 1) throw ConfigError("mlp layer sizes must be positive");
    if (head_ == OutputHead::bounded && !(hi_ > lo_)) throw ConfigError("mlp bounds must satisfy lo < hi");
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        offsets_.push_back(n);
        n += static_cast<std::size_t>(sizes_[l + 1]) * static_cast<std::size_t>(sizes_[l] + 1);
    }
    params_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
}

void Mlp::initialize(Rng& rng, double final_scale)
{
    const std::size_t layers = offsets_.size();
    for (std::size_t l = 0; l < layers; ++l) {
        const double bound = l + 1 == layers ? final_scale : 1.0 / std::sqrt(double(sizes_[l]));
        std::uniform_real_distribution<double> u(-bound, bound);
        const std::size_t end = bias_offset(l) + static_cast<std::size_t>(sizes_[l + 1]);
        for (std::size_t k = weight_offset(l); k < end; ++k) params_[static_cast<Eigen::Index>(k)] = u(rng);
    }
}

Eigen::Map<const Eigen::MatrixXd> Mlp::weight(std::size_t layer) const
{
    return {params_.data() + weight_offset(layer), sizes_[layer + 1], sizes_[layer]};
}

Eigen::Map<const Eigen::VectorXd> Mlp::bias(std::size_t layer) const
{
    return {params_.data() + bias_offset(layer), sizes_[layer + 1]};
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x) const
{
    MlpCache cache;
    return forward(x, cache);
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, MlpCache& cache) const
{
    const std::size_t layers = offsets_.size();
    cache.inputs.resize(layers);
    cache.pre.resize(layers);
    cache.inputs[0] = x;
    for (std::size_t l = 0; l < layers; ++l) {
        cache.pre[l].noalias() = weight(l) * cache.inputs[l];
        cache.pre[l].colwise() += bias(l);
        if (l + 1 < layers) cache.inputs[l + 1] = cache.pre[l].cwiseMax(0.0);
    }
    const Eigen::MatrixXd& z = cache.pre.back();
    if (head_ == OutputHead::linear) {
        cache.output = z;
    } else {
        cache.output = z.unaryExpr([this](double v) { return lo_ + (hi_ - lo_) / (1.0 + std::exp(-v)); });
    }
    return cache.output;
}

Eigen::MatrixXd Mlp::backward(MlpCache& cache, const Eigen::MatrixXd& grad_out,
                              Eigen::VectorXd& grad) const
{
    if (grad.size() != params_.size()) grad = Eigen::VectorXd::Zero(params_.size());
    return backward_impl(cache, grad_out, &grad);
}

Eigen::MatrixXd Mlp::backward_input(MlpCache& cache, const Eigen::MatrixXd& grad_out) const
{
    return backward_impl(cache, grad_out, nullptr);
}

Eigen::MatrixXd Mlp::backward_impl(MlpCache& cache, const Eigen::MatrixXd& grad_out,
                                   Eigen::VectorXd* grad) const
{
    const std::size_t layers = offsets_.size();
    Eigen::MatrixXd& delta = cache.delta;
    Eigen::MatrixXd& back = cache.back;
    if (head_ == OutputHead::linear) {
        delta = grad_out;
    } else {
        // d/dz of lo + w*sig(z) is w*sig*(1-sig) = (y-lo)(hi-y)/w.
        const double w = hi_ - lo_;
        delta = grad_out.cwiseProduct(cache.output.unaryExpr(
            [this, w](double y) { return (y - lo_) * (hi_ - y) / w; }));
    }
    for (std::size_t l = layers; l-- > 0;) {
        if (grad) {
            Eigen::Map<Eigen::MatrixXd> gw(grad->data() + weight_offset(l), sizes_[l + 1], sizes_[l]);
            Eigen::Map<Eigen::VectorXd> gb(grad->data() + bias_offset(l), sizes_[l + 1]);
            gw.noalias() += delta * cache.inputs[l].transpose();
            gb += delta.rowwise().sum();
        }
        if (l == 0) break;
        back.noalias() = weight(l).transpose() * delta;
        delta.resize(back.rows(), back.cols());
        delta = (cache.pre[l - 1].array() > 0.0).select(back, 0.0);
    }
    return weight(0).transpose() * delta;
}

void soft_update(Eigen::VectorXd& target, const Eigen::VectorXd& online, double tau)
{
    if (target.size() != online.size()) throw ConfigError("soft update size mismatch");
    target = tau * online + (1.0 - tau) * target;
}

void adam_update(Eigen::VectorXd& params, const Eigen::VectorXd& grads, double lr, AdamState& state,
                 const AdamConfig& cfg)
{
    if (grads.size() != params.size()) throw ConfigError("adam gradient size mismatch");
    if (state.m.size() != params.size()) {
        state.m = Eigen::VectorXd::Zero(params.size());
        state.v = Eigen::VectorXd::Zero(params.size());
        state.step = 0;
    }
    ++state.step;
    state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grads;
    state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grads.cwiseAbs2();
    const double c1 = 1.0 - std::pow(cfg.beta1, double(state.step));
    const double c2 = 1.0 - std::pow(cfg.beta2, double(state.step));
    params.array() -= lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + cfg.epsilon);
}

}  // namespace fastcharge
