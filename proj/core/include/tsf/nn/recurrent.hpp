#pragma once

#include "tsf/nn/layers.hpp"
#include "tsf/nn/model.hpp"

#include <memory>
#include <string>
#include <vector>

namespace tsf::nn {

/// A sequence is one B x features matrix per time step.
using Sequence = std::vector<Matrix>;

/// A layer consuming and producing whole sequences, with backpropagation through time.
class SequenceLayer {
public:
    virtual ~SequenceLayer() = default;
    [[nodiscard]] virtual std::size_t input_dim() const = 0;
    [[nodiscard]] virtual std::size_t output_dim() const = 0;
    [[nodiscard]] virtual std::vector<Parameter*> parameters() = 0;
    virtual void init(Rng& rng) = 0;
    /// Runs from a zero state and caches every step for backward.
    [[nodiscard]] virtual Sequence forward(const Sequence& xs) = 0;
    /// dL/dh at every step in, dL/dx at every step out; parameter gradients accumulate.
    [[nodiscard]] virtual Sequence backward(const Sequence& dhs) = 0;
    [[nodiscard]] virtual std::unique_ptr<SequenceLayer> clone() const = 0;
};

/// h_t = g(W x_t + U h_{t-1} + b)
class SimpleRnnCell final : public SequenceLayer {
public:
    SimpleRnnCell(const std::string& name, std::size_t in, std::size_t units, Activation g);

    [[nodiscard]] std::size_t input_dim() const override { return in_; }
    [[nodiscard]] std::size_t output_dim() const override { return units_; }
    [[nodiscard]] std::vector<Parameter*> parameters() override { return {&W, &U, &b}; }
    void init(Rng& rng) override;
    [[nodiscard]] Sequence forward(const Sequence& xs) override;
    [[nodiscard]] Sequence backward(const Sequence& dhs) override;
    [[nodiscard]] std::unique_ptr<SequenceLayer> clone() const override { return std::make_unique<SimpleRnnCell>(*this); }

    /// One step for a batch of rows.
    [[nodiscard]] Matrix step(const Matrix& x, const Matrix& h_prev) const;

    Parameter W, U, b;
    Activation g;

private:
    std::size_t in_, units_;
    Sequence xs_, hs_;
};

struct LstmStep {
    Matrix f, i, c_tilde, c, o, h;
};

/// f = s(W_f x + V_f h + b_f), i = s(W_i x + V_i h + b_i), C~ = g(W_c x + V_c h + b_c),
/// C = f * C_prev + i * C~, o = s(W_o x + V_o h + b_o), h = o * g(C).
class LstmCell final : public SequenceLayer {
public:
    LstmCell(const std::string& name, std::size_t in, std::size_t units, Activation g);

    [[nodiscard]] std::size_t input_dim() const override { return in_; }
    [[nodiscard]] std::size_t output_dim() const override { return units_; }
    [[nodiscard]] std::vector<Parameter*> parameters() override {
        return {&W_f, &W_i, &W_c, &W_o, &V_f, &V_i, &V_c, &V_o, &b_f, &b_i, &b_c, &b_o};
    }
    /// Uniform fan-in weights; the forget bias starts at 1, other biases at 0.
    void init(Rng& rng) override;
    [[nodiscard]] Sequence forward(const Sequence& xs) override;
    [[nodiscard]] Sequence backward(const Sequence& dhs) override;
    [[nodiscard]] std::unique_ptr<SequenceLayer> clone() const override { return std::make_unique<LstmCell>(*this); }

    [[nodiscard]] LstmStep step(const Matrix& x, const Matrix& h_prev, const Matrix& c_prev) const;

    Parameter W_f, W_i, W_c, W_o;
    Parameter V_f, V_i, V_c, V_o;
    Parameter b_f, b_i, b_c, b_o;
    Activation g;

private:
    std::size_t in_, units_;
    Sequence xs_;
    std::vector<LstmStep> steps_;
};

struct GruStep {
    Matrix r, z, h_tilde, h;
};

/// r = s(W_r x + U_r h + b_r), z = s(W_z x + U_z h + b_z),
/// h~ = g(W_h x + U_h (r * h_prev) + b_h), h = z * h_prev + (1 - z) * h~.
class GruCell final : public SequenceLayer {
public:
    GruCell(const std::string& name, std::size_t in, std::size_t units, Activation g);

    [[nodiscard]] std::size_t input_dim() const override { return in_; }
    [[nodiscard]] std::size_t output_dim() const override { return units_; }
    [[nodiscard]] std::vector<Parameter*> parameters() override {
        return {&W_r, &W_z, &W_h, &U_r, &U_z, &U_h, &b_r, &b_z, &b_h};
    }
    void init(Rng& rng) override;
    [[nodiscard]] Sequence forward(const Sequence& xs) override;
    [[nodiscard]] Sequence backward(const Sequence& dhs) override;
    [[nodiscard]] std::unique_ptr<SequenceLayer> clone() const override { return std::make_unique<GruCell>(*this); }

    [[nodiscard]] GruStep step(const Matrix& x, const Matrix& h_prev) const;

    Parameter W_r, W_z, W_h;
    Parameter U_r, U_z, U_h;
    Parameter b_r, b_z, b_h;
    Activation g;

private:
    std::size_t in_, units_;
    Sequence xs_, h_prev_;
    std::vector<GruStep> steps_;
};

/// Output at t is [forward h_t ; backward h_t]; the backward layer reads the reversed sequence.
class Bidirectional final : public SequenceLayer {
public:
    Bidirectional(std::unique_ptr<SequenceLayer> fwd, std::unique_ptr<SequenceLayer> bwd);
    Bidirectional(const Bidirectional& other);

    [[nodiscard]] std::size_t input_dim() const override { return fwd_->input_dim(); }
    [[nodiscard]] std::size_t output_dim() const override { return fwd_->output_dim() + bwd_->output_dim(); }
    [[nodiscard]] std::vector<Parameter*> parameters() override;
    void init(Rng& rng) override;
    [[nodiscard]] Sequence forward(const Sequence& xs) override;
    [[nodiscard]] Sequence backward(const Sequence& dhs) override;
    [[nodiscard]] std::unique_ptr<SequenceLayer> clone() const override { return std::make_unique<Bidirectional>(*this); }

    [[nodiscard]] SequenceLayer& forward_layer() { return *fwd_; }
    [[nodiscard]] SequenceLayer& backward_layer() { return *bwd_; }

private:
    std::unique_ptr<SequenceLayer> fwd_, bwd_;
};

// Single-sample step functions written against the cell parameters.
[[nodiscard]] Vector rnn_step(const SimpleRnnCell& cell, const Vector& x, const Vector& h_prev);
[[nodiscard]] std::pair<Vector, Vector> lstm_step(const LstmCell& cell, const Vector& x, const Vector& h_prev,
                                                  const Vector& c_prev);
[[nodiscard]] Vector gru_step(const GruCell& cell, const Vector& x, const Vector& h_prev);

/// How the per-step dense head is scored during training.
enum class HeadLoss {
    /// Step t is regressed on the value that follows it (window[t+1], then the target).
    next_value,
    /// Only the final step is scored.
    final_only,
};

[[nodiscard]] std::string to_string(HeadLoss h);
[[nodiscard]] HeadLoss head_loss_from_string(std::string_view name);

struct RecurrentConfig {
    ModelKind kind = ModelKind::lstm;
    std::size_t units = 64;
    std::size_t layers = 4;
    Activation activation = Activation::tanh;
    double dropout = 0.3;
    std::size_t window_len = 12;
    HeadLoss head_loss = HeadLoss::next_value;

    void validate() const;
};

/// Stacked recurrent layers (uni- or bidirectional), dropout after each layer,
/// and a dense head shared across time steps.
class RecurrentModel final : public SequenceRegressor {
public:
    explicit RecurrentModel(RecurrentConfig config);
    RecurrentModel(const RecurrentModel& other);

    [[nodiscard]] ModelKind kind() const override { return config_.kind; }
    [[nodiscard]] std::size_t window_len() const override { return config_.window_len; }
    [[nodiscard]] std::vector<Parameter*> parameters() override;
    using SequenceRegressor::parameters;
    void init(Rng& rng) override;
    void set_dropout_rate(double rate) override;
    [[nodiscard]] double dropout_rate() const override { return config_.dropout; }

    /// Output is B x L (per-step head) or B x 1 for the final-only loss.
    [[nodiscard]] Matrix forward(const Matrix& windows, bool training, Rng& rng) override;
    void backward(const Matrix& d_output) override;
    [[nodiscard]] Matrix training_targets(const Matrix& windows, const Vector& next) const override;

    [[nodiscard]] std::unique_ptr<SequenceRegressor> clone() const override;
    [[nodiscard]] std::map<std::string, std::string> metadata() const override;

    [[nodiscard]] const RecurrentConfig& config() const { return config_; }
    [[nodiscard]] SequenceLayer& layer(std::size_t i) { return *layers_.at(i); }
    [[nodiscard]] DenseLayer& head() { return head_; }
    /// Hidden sequence of the top layer from the last forward (after dropout).
    [[nodiscard]] const Sequence& top_outputs() const { return top_; }

private:
    RecurrentConfig config_;
    std::vector<std::unique_ptr<SequenceLayer>> layers_;
    DenseLayer head_;
    std::vector<Sequence> masks_;
    Sequence top_;
    std::size_t batch_ = 0;
};

} // namespace tsf::nn
