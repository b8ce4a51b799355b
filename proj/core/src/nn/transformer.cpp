#include "tsf/nn/transformer.hpp"

#include "tsf/error.hpp"

#include <cmath>
#include <stdexcept>

namespace tsf::nn {

namespace {

using Shape = std::vector<std::size_t>;

Matrix linear(const Matrix& x, const Parameter& W, const Parameter& b) {
    Matrix y = x * W.value.matrix().transpose();
    y.rowwise() += b.value.matrix().col(0).transpose();
    return y;
}

void accumulate_linear(Parameter& W, Parameter& b, const Matrix& d_out, const Matrix& input) {
    W.grad.matrix() += d_out.transpose() * input;
    b.grad.matrix().col(0) += d_out.colwise().sum().transpose();
}

} // namespace

void TransformerConfig::validate() const {
    if (embed_dim == 0 || ff_dim == 0 || n_heads == 0 || n_layers == 0 || window_len == 0) {
        throw std::invalid_argument("TransformerConfig: all dimensions must be positive");
    }
    if (embed_dim % n_heads != 0) {
        throw std::invalid_argument("TransformerConfig: embed_dim " + std::to_string(embed_dim) +
                                    " is not divisible by n_heads " + std::to_string(n_heads));
    }
    if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("TransformerConfig: dropout must lie in [0, 1)");
}

Matrix positional_encoding(std::size_t window_len, std::size_t embed_dim) {
    if (window_len == 0 || embed_dim == 0) throw std::invalid_argument("positional_encoding: dimensions must be positive");
    Matrix pe(static_cast<Eigen::Index>(window_len), static_cast<Eigen::Index>(embed_dim));
    for (std::size_t t = 0; t < window_len; ++t) {
        for (std::size_t j = 0; j < embed_dim; ++j) {
            const double two_i = static_cast<double>(j - j % 2);
            const double angle = static_cast<double>(t) / std::pow(10000.0, two_i / static_cast<double>(embed_dim));
            pe(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = j % 2 == 0 ? std::sin(angle) : std::cos(angle);
        }
    }
    return pe;
}

Matrix softmax_rows(const Matrix& logits) {
    if (!logits.allFinite()) throw NumericalError("non-finite attention logits");
    Matrix out = logits;
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
        out.row(r).array() -= out.row(r).maxCoeff();
        out.row(r) = out.row(r).array().exp().matrix();
        out.row(r) /= out.row(r).sum();
    }
    return out;
}

// ---------------------------------------------------------------- LayerNorm

LayerNorm::LayerNorm(const std::string& name, std::size_t dim)
    : gamma(name + ".gamma", Shape{dim}), beta(name + ".beta", Shape{dim}) {
    init();
}

void LayerNorm::init() {
    gamma.value.fill(1.0);
    beta.value.fill(0.0);
}

Matrix LayerNorm::forward(const Matrix& x) {
    if (static_cast<std::size_t>(x.cols()) != gamma.value.size()) throw std::invalid_argument("LayerNorm: width mismatch");
    const double n = static_cast<double>(x.cols());
    const Vector mean = x.rowwise().mean();
    xhat_ = x.colwise() - mean;
    const Vector var = xhat_.rowwise().squaredNorm() / n;
    inv_std_ = (var.array() + kEpsilon).rsqrt().matrix();
    xhat_ = inv_std_.asDiagonal() * xhat_;
    Matrix y = xhat_ * gamma.value.matrix().col(0).asDiagonal();
    y.rowwise() += beta.value.matrix().col(0).transpose();
    return y;
}

Matrix LayerNorm::backward(const Matrix& upstream) {
    gamma.grad.matrix().col(0) += upstream.cwiseProduct(xhat_).colwise().sum().transpose();
    beta.grad.matrix().col(0) += upstream.colwise().sum().transpose();
    const Matrix dxhat = upstream * gamma.value.matrix().col(0).asDiagonal();
    const double n = static_cast<double>(upstream.cols());
    const Vector sum_d = dxhat.rowwise().sum();
    const Vector sum_dx = dxhat.cwiseProduct(xhat_).rowwise().sum();
    Matrix dx = n * dxhat;
    dx.colwise() -= sum_d;
    dx -= sum_dx.asDiagonal() * xhat_;
    return (inv_std_ / n).asDiagonal() * dx;
}

// ---------------------------------------------------------------- attention

MultiHeadAttention::MultiHeadAttention(const std::string& name, std::size_t embed_dim, std::size_t n_heads)
    : W_q(name + ".W_q", Shape{embed_dim, embed_dim}), W_k(name + ".W_k", Shape{embed_dim, embed_dim}),
      W_v(name + ".W_v", Shape{embed_dim, embed_dim}), W_o(name + ".W_o", Shape{embed_dim, embed_dim}),
      b_q(name + ".b_q", Shape{embed_dim}), b_k(name + ".b_k", Shape{embed_dim}), b_v(name + ".b_v", Shape{embed_dim}),
      b_o(name + ".b_o", Shape{embed_dim}), d_(embed_dim), heads_(n_heads) {
    if (n_heads == 0 || embed_dim % n_heads != 0) throw std::invalid_argument("MultiHeadAttention: embed_dim % n_heads != 0");
}

void MultiHeadAttention::init(Rng& rng) {
    for (Parameter* w : {&W_q, &W_k, &W_v, &W_o}) init_uniform_fan_in(*w, d_, rng);
    for (Parameter* b : {&b_q, &b_k, &b_v, &b_o}) b->value.fill(0.0);
}

Matrix MultiHeadAttention::forward(const Matrix& x, std::size_t seq_len) {
    if (static_cast<std::size_t>(x.cols()) != d_) throw std::invalid_argument("MultiHeadAttention: width mismatch");
    if (seq_len == 0 || x.rows() % static_cast<Eigen::Index>(seq_len) != 0) {
        throw std::invalid_argument("MultiHeadAttention: rows are not a multiple of the sequence length");
    }
    seq_len_ = seq_len;
    x_ = x;
    q_ = linear(x, W_q, b_q);
    k_ = linear(x, W_k, b_k);
    v_ = linear(x, W_v, b_v);
    const auto L = static_cast<Eigen::Index>(seq_len);
    const auto dh = static_cast<Eigen::Index>(d_ / heads_);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    const Eigen::Index n_seq = x.rows() / L;
    concat_.resize(x.rows(), x.cols());
    probs_.assign(static_cast<std::size_t>(n_seq) * heads_, Matrix());
    for (Eigen::Index s = 0; s < n_seq; ++s) {
        for (std::size_t h = 0; h < heads_; ++h) {
            const auto c0 = static_cast<Eigen::Index>(h) * dh;
            const Matrix logits = scale * q_.block(s * L, c0, L, dh) * k_.block(s * L, c0, L, dh).transpose();
            Matrix& p = probs_[static_cast<std::size_t>(s) * heads_ + h];
            p = softmax_rows(logits);
            concat_.block(s * L, c0, L, dh) = p * v_.block(s * L, c0, L, dh);
        }
    }
    return linear(concat_, W_o, b_o);
}

Matrix MultiHeadAttention::backward(const Matrix& upstream) {
    if (upstream.rows() != x_.rows() || upstream.cols() != x_.cols()) {
        throw std::invalid_argument("MultiHeadAttention::backward: shape mismatch");
    }
    accumulate_linear(W_o, b_o, upstream, concat_);
    const Matrix dconcat = upstream * W_o.value.matrix();
    const auto L = static_cast<Eigen::Index>(seq_len_);
    const auto dh = static_cast<Eigen::Index>(d_ / heads_);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    const Eigen::Index n_seq = x_.rows() / L;
    Matrix dq(x_.rows(), x_.cols()), dk(x_.rows(), x_.cols()), dv(x_.rows(), x_.cols());
    for (Eigen::Index s = 0; s < n_seq; ++s) {
        for (std::size_t h = 0; h < heads_; ++h) {
            const auto c0 = static_cast<Eigen::Index>(h) * dh;
            const Matrix& p = probs_[static_cast<std::size_t>(s) * heads_ + h];
            const auto d_out = dconcat.block(s * L, c0, L, dh);
            const Matrix dp = d_out * v_.block(s * L, c0, L, dh).transpose();
            dv.block(s * L, c0, L, dh) = p.transpose() * d_out;
            Matrix ds = dp;
            ds.colwise() -= dp.cwiseProduct(p).rowwise().sum();
            ds = ds.cwiseProduct(p) * scale;
            dq.block(s * L, c0, L, dh) = ds * k_.block(s * L, c0, L, dh);
            dk.block(s * L, c0, L, dh) = ds.transpose() * q_.block(s * L, c0, L, dh);
        }
    }
    accumulate_linear(W_q, b_q, dq, x_);
    accumulate_linear(W_k, b_k, dk, x_);
    accumulate_linear(W_v, b_v, dv, x_);
    Matrix dx = dq * W_q.value.matrix();
    dx.noalias() += dk * W_k.value.matrix();
    dx.noalias() += dv * W_v.value.matrix();
    return dx;
}

// ---------------------------------------------------------------- encoder layer

EncoderLayer::EncoderLayer(const std::string& name, const TransformerConfig& cfg)
    : attention(name + ".attn", cfg.embed_dim, cfg.n_heads), norm1(name + ".norm1", cfg.embed_dim),
      norm2(name + ".norm2", cfg.embed_dim), ff1(name + ".ff1", cfg.embed_dim, cfg.ff_dim, Activation::relu),
      ff2(name + ".ff2", cfg.ff_dim, cfg.embed_dim, Activation::identity) {}

void EncoderLayer::init(Rng& rng) {
    attention.init(rng);
    norm1.init();
    norm2.init();
    ff1.init(rng);
    ff2.init(rng);
}

std::vector<Parameter*> EncoderLayer::parameters() {
    std::vector<Parameter*> out = attention.parameters();
    for (auto* group : {&norm1, &norm2}) {
        for (Parameter* p : group->parameters()) out.push_back(p);
    }
    for (auto* d : {&ff1, &ff2}) {
        for (Parameter* p : d->parameters()) out.push_back(p);
    }
    return out;
}

Matrix EncoderLayer::forward(const Matrix& x, std::size_t seq_len, double dropout, bool training, Rng& rng) {
    const bool drop = training && dropout > 0.0;
    Matrix a = attention.forward(x, seq_len);
    mask_attn_ = drop ? dropout_mask(a.rows(), a.cols(), dropout, true, rng) : Matrix();
    if (drop) a = a.cwiseProduct(mask_attn_);
    const Matrix y = norm1.forward(x + a);
    Matrix f = ff2.forward(ff1.forward(y));
    mask_ff_ = drop ? dropout_mask(f.rows(), f.cols(), dropout, true, rng) : Matrix();
    if (drop) f = f.cwiseProduct(mask_ff_);
    return norm2.forward(y + f);
}

Matrix EncoderLayer::backward(const Matrix& upstream) {
    const Matrix dr2 = norm2.backward(upstream);
    const Matrix df = mask_ff_.size() > 0 ? Matrix(dr2.cwiseProduct(mask_ff_)) : dr2;
    const Matrix dy = dr2 + ff1.backward(ff2.backward(df));
    const Matrix dr1 = norm1.backward(dy);
    const Matrix da = mask_attn_.size() > 0 ? Matrix(dr1.cwiseProduct(mask_attn_)) : dr1;
    return dr1 + attention.backward(da);
}

// ---------------------------------------------------------------- model

TransformerModel::TransformerModel(TransformerConfig config)
    : config_(config), input_("input", 1, config.embed_dim, Activation::identity),
      head_("head", config.embed_dim, 1, Activation::identity) {
    config_.validate();
    pe_ = config_.positional_encoding ? positional_encoding(config_.window_len, config_.embed_dim)
                                      : Matrix::Zero(static_cast<Eigen::Index>(config_.window_len),
                                                     static_cast<Eigen::Index>(config_.embed_dim));
    for (std::size_t l = 0; l < config_.n_layers; ++l) layers_.emplace_back("layer" + std::to_string(l), config_);
}

std::vector<Parameter*> TransformerModel::parameters() {
    std::vector<Parameter*> out = input_.parameters();
    for (auto& l : layers_) {
        for (Parameter* p : l.parameters()) out.push_back(p);
    }
    for (Parameter* p : head_.parameters()) out.push_back(p);
    return out;
}

void TransformerModel::init(Rng& rng) {
    input_.init(rng);
    for (auto& l : layers_) l.init(rng);
    head_.init(rng);
}

void TransformerModel::set_dropout_rate(double rate) {
    if (!(rate >= 0.0 && rate < 1.0)) throw std::invalid_argument("TransformerModel: dropout must lie in [0, 1)");
    config_.dropout = rate;
}

Matrix TransformerModel::forward(const Matrix& windows, bool training, Rng& rng) {
    if (static_cast<std::size_t>(windows.cols()) != config_.window_len) {
        throw std::invalid_argument("TransformerModel: window length mismatch");
    }
    const Eigen::Index B = windows.rows();
    const auto L = static_cast<Eigen::Index>(config_.window_len);
    batch_ = static_cast<std::size_t>(B);
    Matrix x(B * L, 1);
    for (Eigen::Index b = 0; b < B; ++b) x.middleRows(b * L, L) = windows.row(b).transpose();
    Matrix e = input_.forward(x);
    for (Eigen::Index b = 0; b < B; ++b) e.middleRows(b * L, L) += pe_;
    for (auto& layer : layers_) e = layer.forward(e, config_.window_len, config_.dropout, training, rng);
    check_finite(e, "transformer activations");

    Matrix pooled(B, e.cols());
    for (Eigen::Index b = 0; b < B; ++b) {
        pooled.row(b) = config_.pooling == Pooling::last ? Matrix(e.row(b * L + L - 1)) : Matrix(e.middleRows(b * L, L).colwise().mean());
    }
    return head_.forward(pooled);
}

void TransformerModel::backward(const Matrix& d_output) {
    const auto B = static_cast<Eigen::Index>(batch_);
    const auto L = static_cast<Eigen::Index>(config_.window_len);
    if (d_output.rows() != B || d_output.cols() != 1) throw std::invalid_argument("TransformerModel::backward: shape mismatch");
    const Matrix dpooled = head_.backward(d_output);
    Matrix de = Matrix::Zero(B * L, dpooled.cols());
    for (Eigen::Index b = 0; b < B; ++b) {
        if (config_.pooling == Pooling::last) {
            de.row(b * L + L - 1) = dpooled.row(b);
        } else {
            de.middleRows(b * L, L).rowwise() = dpooled.row(b) / static_cast<double>(L);
        }
    }
    for (std::size_t l = layers_.size(); l-- > 0;) de = layers_[l].backward(de);
    (void)input_.backward(de);
}

Matrix TransformerModel::training_targets(const Matrix& windows, const Vector& next) const {
    if (windows.rows() != next.size()) throw std::invalid_argument("training_targets: batch size mismatch");
    return next;
}

std::map<std::string, std::string> TransformerModel::metadata() const {
    return {{"kind", "transformer"},
            {"embed_dim", std::to_string(config_.embed_dim)},
            {"ff_dim", std::to_string(config_.ff_dim)},
            {"n_heads", std::to_string(config_.n_heads)},
            {"n_layers", std::to_string(config_.n_layers)},
            {"dropout", std::to_string(config_.dropout)},
            {"dropout_placement", "after attention and feed-forward sub-layers, before the residual add"},
            {"norm", "post-norm"},
            {"positional_encoding", config_.positional_encoding ? "sinusoidal" : "none"},
            {"pooling", config_.pooling == Pooling::last ? "last" : "mean"},
            {"window_len", std::to_string(config_.window_len)}};
}

std::pair<TransformerConfig, TrainConfig> build_paper_transformer() {
    TransformerConfig cfg;
    cfg.embed_dim = 64;
    cfg.ff_dim = 128;
    cfg.n_heads = 4;
    cfg.n_layers = 4;
    cfg.dropout = 0.3;
    cfg.window_len = 12;
    cfg.validate();
    TrainConfig train;
    train.epochs = 50;
    train.batch_size = 32;
    train.learning_rate = 0.001;
    train.optimizer = OptimizerKind::adam;
    train.dropout_rate = 0.3;
    return {cfg, train};
}

} // namespace tsf::nn
