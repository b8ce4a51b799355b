#include "tsf/nn/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace tsf::nn {

std::string to_string(OptimizerKind k) {
    switch (k) {
    case OptimizerKind::sgd: return "sgd";
    case OptimizerKind::rmsprop: return "rmsprop";
    case OptimizerKind::adam: return "adam";
    }
    return "adam";
}

OptimizerKind optimizer_from_string(std::string_view name) {
    if (name == "sgd") return OptimizerKind::sgd;
    if (name == "rmsprop") return OptimizerKind::rmsprop;
    if (name == "adam") return OptimizerKind::adam;
    throw std::invalid_argument("unknown optimizer '" + std::string(name) + "'");
}

Optimizer::Optimizer(OptimizerConfig config) : config_(config) {
    if (!(config_.learning_rate >= 0.0)) throw std::invalid_argument("Optimizer: learning rate must be >= 0");
}

void Optimizer::ensure_state(const std::vector<Parameter*>& params) {
    if (config_.kind == OptimizerKind::sgd) return;
    if (v_.empty()) {
        for (const Parameter* p : params) {
            v_.emplace_back(p->value.shape());
            if (config_.kind == OptimizerKind::adam) m_.emplace_back(p->value.shape());
        }
        return;
    }
    if (v_.size() != params.size()) throw std::invalid_argument("Optimizer: parameter list changed between steps");
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (v_[i].shape() != params[i]->value.shape()) {
            throw std::invalid_argument("Optimizer: shape of '" + params[i]->name + "' changed between steps");
        }
    }
}

void Optimizer::step(const std::vector<Parameter*>& params) {
    for (const Parameter* p : params) {
        if (p->grad.shape() != p->value.shape()) {
            throw std::invalid_argument("Optimizer: gradient shape mismatch for '" + p->name + "'");
        }
    }
    ensure_state(params);
    ++steps_;
    const double lr = config_.learning_rate;
    const double eps = config_.epsilon;
    switch (config_.kind) {
    case OptimizerKind::sgd:
        for (Parameter* p : params) {
            auto w = p->value.data();
            auto g = p->grad.data();
            for (std::size_t j = 0; j < w.size(); ++j) w[j] -= lr * g[j];
        }
        break;
    case OptimizerKind::rmsprop: {
        const double rho = config_.rho;
        for (std::size_t i = 0; i < params.size(); ++i) {
            auto w = params[i]->value.data();
            auto g = params[i]->grad.data();
            auto s = v_[i].data();
            for (std::size_t j = 0; j < w.size(); ++j) {
                s[j] = rho * s[j] + (1.0 - rho) * g[j] * g[j];
                w[j] -= lr * g[j] / (std::sqrt(s[j]) + eps);
            }
        }
        break;
    }
    case OptimizerKind::adam: {
        const double b1 = config_.beta1;
        const double b2 = config_.beta2;
        const double t = static_cast<double>(steps_);
        const double c1 = 1.0 - std::pow(b1, t);
        const double c2 = 1.0 - std::pow(b2, t);
        for (std::size_t i = 0; i < params.size(); ++i) {
            auto w = params[i]->value.data();
            auto g = params[i]->grad.data();
            auto m = m_[i].data();
            auto v = v_[i].data();
            for (std::size_t j = 0; j < w.size(); ++j) {
                m[j] = b1 * m[j] + (1.0 - b1) * g[j];
                v[j] = b2 * v[j] + (1.0 - b2) * g[j] * g[j];
                w[j] -= lr * (m[j] / c1) / (std::sqrt(v[j] / c2) + eps);
            }
        }
        break;
    }
    }
}

void zero_grad(const std::vector<Parameter*>& params) {
    for (Parameter* p : params) p->grad.fill(0.0);
}

double global_grad_norm(const std::vector<Parameter*>& params) {
    double sq = 0.0;
    for (const Parameter* p : params) {
        for (double g : p->grad.data()) sq += g * g;
    }
    return std::sqrt(sq);
}

bool clip_global_norm(const std::vector<Parameter*>& params, double max_norm) {
    if (!(max_norm > 0.0)) return false;
    const double norm = global_grad_norm(params);
    if (!(norm > max_norm)) return false;
    const double scale = max_norm / norm;
    for (Parameter* p : params) {
        for (double& g : p->grad.data()) g *= scale;
    }
    return true;
}

} // namespace tsf::nn
