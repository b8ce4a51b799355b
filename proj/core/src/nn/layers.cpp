#include "tsf/nn/layers.hpp"

#include "tsf/error.hpp"

#include <stdexcept>

namespace tsf::nn {

std::string to_string(Activation a) {
    switch (a) {
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
    case Activation::relu: return "relu";
    case Activation::identity: return "identity";
    }
    return "identity";
}

Activation activation_from_string(std::string_view name) {
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "tanh") return Activation::tanh;
    if (name == "relu") return Activation::relu;
    if (name == "identity" || name == "linear") return Activation::identity;
    throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

Matrix apply(Activation a, const Matrix& pre) {
    switch (a) {
    case Activation::sigmoid: return (1.0 + (-pre.array()).exp()).inverse().matrix();
    case Activation::tanh: return pre.array().tanh().matrix();
    case Activation::relu: return pre.cwiseMax(0.0);
    case Activation::identity: return pre;
    }
    return pre;
}

Matrix derivative_from_output(Activation a, const Matrix& out) {
    switch (a) {
    case Activation::sigmoid: return (out.array() * (1.0 - out.array())).matrix();
    case Activation::tanh: return (1.0 - out.array().square()).matrix();
    case Activation::relu: return (out.array() > 0.0).cast<double>().matrix();
    case Activation::identity: return Matrix::Ones(out.rows(), out.cols());
    }
    return Matrix::Ones(out.rows(), out.cols());
}

DenseLayer::DenseLayer(std::string name, std::size_t in, std::size_t out, Activation act)
    : weight_(name + ".W", {out, in}), bias_(name + ".b", {out}), act_(act) {}

void DenseLayer::init(Rng& rng) {
    init_uniform_fan_in(weight_, in_features(), rng);
    bias_.value.fill(0.0);
}

Matrix DenseLayer::evaluate(const Matrix& x) const {
    if (static_cast<std::size_t>(x.cols()) != in_features()) {
        throw std::invalid_argument("DenseLayer: expected " + std::to_string(in_features()) + " input features, got " +
                                    std::to_string(x.cols()));
    }
    Matrix pre = x * weight_.value.matrix().transpose();
    pre.rowwise() += bias_.value.matrix().col(0).transpose();
    return apply(act_, pre);
}

Matrix DenseLayer::forward(const Matrix& x) {
    output_ = evaluate(x);
    input_ = x;
    return output_;
}

Matrix DenseLayer::backward(const Matrix& upstream) {
    if (upstream.rows() != output_.rows() || upstream.cols() != output_.cols()) {
        throw std::invalid_argument("DenseLayer::backward: upstream gradient shape mismatch");
    }
    const Matrix d_pre = upstream.cwiseProduct(derivative_from_output(act_, output_));
    weight_.grad.matrix() += d_pre.transpose() * input_;
    bias_.grad.matrix().col(0) += d_pre.colwise().sum().transpose();
    return d_pre * weight_.value.matrix();
}

std::pair<double, Matrix> mse_loss(const Matrix& pred, const Matrix& target) {
    if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
        throw std::invalid_argument("mse_loss: shape mismatch");
    }
    const double n = static_cast<double>(pred.size());
    const Matrix diff = pred - target;
    return {diff.squaredNorm() / n, (2.0 / n) * diff};
}

Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, bool training, Rng& rng) {
    if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout: rate must lie in [0, 1)");
    if (!training || rate == 0.0) return Matrix::Ones(rows, cols);
    std::bernoulli_distribution keep(1.0 - rate);
    const double scale = 1.0 / (1.0 - rate);
    Matrix mask(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) mask(i, j) = keep(rng) ? scale : 0.0;
    }
    return mask;
}

Tensor dropout_apply(const Tensor& x, double rate, bool training, Rng& rng) {
    if (rate < 0.0 || rate >= 1.0) throw std::invalid_argument("dropout: rate must lie in [0, 1)");
    Tensor out = x;
    if (!training || rate == 0.0) return out;
    std::bernoulli_distribution keep(1.0 - rate);
    const double scale = 1.0 / (1.0 - rate);
    for (double& v : out.data()) v = keep(rng) ? v * scale : 0.0;
    return out;
}

} // namespace tsf::nn
