#pragma once

#include "tsf/nn/layers.hpp"
#include "tsf/nn/model.hpp"
#include "tsf/nn/trainer.hpp"

#include <memory>
#include <utility>
#include <vector>

namespace tsf::nn {

enum class Pooling { last, mean };

struct TransformerConfig {
    std::size_t embed_dim = 64;
    std::size_t ff_dim = 128;
    std::size_t n_heads = 4;
    std::size_t n_layers = 4;
    double dropout = 0.3;
    std::size_t window_len = 12;
    bool positional_encoding = true;
    Pooling pooling = Pooling::last;

    /// Throws std::invalid_argument unless all dims are positive and
    /// embed_dim is divisible by n_heads.
    void validate() const;
    [[nodiscard]] std::size_t head_dim() const { return embed_dim / n_heads; }
};

/// PE[t, 2i] = sin(t / 10000^(2i/d)), PE[t, 2i+1] = cos(t / 10000^(2i/d)).
[[nodiscard]] Matrix positional_encoding(std::size_t window_len, std::size_t embed_dim);

/// Row-wise softmax with max subtraction.
[[nodiscard]] Matrix softmax_rows(const Matrix& logits);

/// Layer normalization over the feature axis, eps 1e-5.
class LayerNorm {
public:
    LayerNorm() = default;
    LayerNorm(const std::string& name, std::size_t dim);
    void init();
    [[nodiscard]] std::vector<Parameter*> parameters() { return {&gamma, &beta}; }
    [[nodiscard]] Matrix forward(const Matrix& x);
    [[nodiscard]] Matrix backward(const Matrix& upstream);
    /// Normalized input before the affine transform.
    [[nodiscard]] const Matrix& normalized() const { return xhat_; }

    Parameter gamma, beta;
    static constexpr double kEpsilon = 1e-5;

private:
    Matrix xhat_;
    Vector inv_std_;
};

/// Multi-head scaled dot-product self-attention over independent sequences of
/// length L stacked as (B*L) x d rows.
class MultiHeadAttention {
public:
    MultiHeadAttention() = default;
    MultiHeadAttention(const std::string& name, std::size_t embed_dim, std::size_t n_heads);
    void init(Rng& rng);
    [[nodiscard]] std::vector<Parameter*> parameters() { return {&W_q, &W_k, &W_v, &W_o, &b_q, &b_k, &b_v, &b_o}; }
    [[nodiscard]] Matrix forward(const Matrix& x, std::size_t seq_len);
    [[nodiscard]] Matrix backward(const Matrix& upstream);
    /// Attention probabilities of the last forward, indexed [sequence * n_heads + head].
    [[nodiscard]] const std::vector<Matrix>& attention() const { return probs_; }

    Parameter W_q, W_k, W_v, W_o;
    Parameter b_q, b_k, b_v, b_o;

private:
    std::size_t d_ = 0, heads_ = 0, seq_len_ = 0;
    Matrix x_, q_, k_, v_, concat_;
    std::vector<Matrix> probs_;
};

/// Post-norm encoder block: LN(x + drop(MHA(x))), then LN(y + drop(FFN(y))).
class EncoderLayer {
public:
    EncoderLayer() = default;
    EncoderLayer(const std::string& name, const TransformerConfig& cfg);
    void init(Rng& rng);
    [[nodiscard]] std::vector<Parameter*> parameters();
    [[nodiscard]] Matrix forward(const Matrix& x, std::size_t seq_len, double dropout, bool training, Rng& rng);
    [[nodiscard]] Matrix backward(const Matrix& upstream);

    MultiHeadAttention attention;
    LayerNorm norm1, norm2;
    DenseLayer ff1, ff2;

private:
    Matrix mask_attn_, mask_ff_;
};

class TransformerModel final : public SequenceRegressor {
public:
    explicit TransformerModel(TransformerConfig config);

    [[nodiscard]] ModelKind kind() const override { return ModelKind::transformer; }
    [[nodiscard]] std::size_t window_len() const override { return config_.window_len; }
    [[nodiscard]] std::vector<Parameter*> parameters() override;
    using SequenceRegressor::parameters;
    void init(Rng& rng) override;
    void set_dropout_rate(double rate) override;
    [[nodiscard]] double dropout_rate() const override { return config_.dropout; }

    /// B x 1 forecasts from the pooled final representation.
    [[nodiscard]] Matrix forward(const Matrix& windows, bool training, Rng& rng) override;
    void backward(const Matrix& d_output) override;
    [[nodiscard]] Matrix training_targets(const Matrix& windows, const Vector& next) const override;

    [[nodiscard]] std::unique_ptr<SequenceRegressor> clone() const override {
        return std::make_unique<TransformerModel>(*this);
    }
    [[nodiscard]] std::map<std::string, std::string> metadata() const override;

    [[nodiscard]] const TransformerConfig& config() const { return config_; }
    [[nodiscard]] EncoderLayer& layer(std::size_t i) { return layers_.at(i); }
    [[nodiscard]] DenseLayer& input_projection() { return input_; }
    [[nodiscard]] DenseLayer& head() { return head_; }

private:
    TransformerConfig config_;
    Matrix pe_;
    DenseLayer input_;
    std::vector<EncoderLayer> layers_;
    DenseLayer head_;
    std::size_t batch_ = 0;
};

/// Encoder configuration and training settings of the influenza study.
[[nodiscard]] std::pair<TransformerConfig, TrainConfig> build_paper_transformer();

} // namespace tsf::nn
