#include "tsf/nn/recurrent.hpp"

#include "tsf/error.hpp"

#include <array>
#include <stdexcept>

namespace tsf::nn {

namespace {

using Shape = std::vector<std::size_t>;

// X W^T + H U^T + b for row-major batches.
Matrix gate_pre(const Matrix& x, const Parameter& W, const Matrix& h, const Parameter& U, const Parameter& b) {
    Matrix pre = x * W.value.matrix().transpose();
    pre.noalias() += h * U.value.matrix().transpose();
    pre.rowwise() += b.value.matrix().col(0).transpose();
    return pre;
}

Matrix sigmoid(const Matrix& pre) { return apply(Activation::sigmoid, pre); }

void accumulate(Parameter& W, const Matrix& d_pre, const Matrix& input) { W.grad.matrix() += d_pre.transpose() * input; }

void accumulate_bias(Parameter& b, const Matrix& d_pre) { b.grad.matrix().col(0) += d_pre.colwise().sum().transpose(); }

void check_input(const Matrix& x, std::size_t in, const char* who) {
    if (static_cast<std::size_t>(x.cols()) != in) {
        throw std::invalid_argument(std::string(who) + ": expected " + std::to_string(in) + " input features, got " +
                                    std::to_string(x.cols()));
    }
}

void check_state(const Matrix& h, const Matrix& x, std::size_t units, const char* who) {
    if (static_cast<std::size_t>(h.cols()) != units || h.rows() != x.rows()) {
        throw std::invalid_argument(std::string(who) + ": state shape mismatch");
    }
}

void check_sequence(const Sequence& xs, const char* who) {
    if (xs.empty()) throw std::invalid_argument(std::string(who) + ": empty sequence");
}

Matrix row(const Vector& v) { return v.transpose(); }

} // namespace

// ---------------------------------------------------------------- SimpleRNN

SimpleRnnCell::SimpleRnnCell(const std::string& name, std::size_t in, std::size_t units, Activation act)
    : W(name + ".W", Shape{units, in}), U(name + ".U", Shape{units, units}), b(name + ".b", Shape{units}), g(act),
      in_(in), units_(units) {
    if (in == 0 || units == 0) throw std::invalid_argument("SimpleRnnCell: dimensions must be positive");
}

void SimpleRnnCell::init(Rng& rng) {
    init_uniform_fan_in(W, in_, rng);
    init_uniform_fan_in(U, units_, rng);
    b.value.fill(0.0);
}

Matrix SimpleRnnCell::step(const Matrix& x, const Matrix& h_prev) const {
    check_input(x, in_, "SimpleRnnCell");
    check_state(h_prev, x, units_, "SimpleRnnCell");
    return apply(g, gate_pre(x, W, h_prev, U, b));
}

Sequence SimpleRnnCell::forward(const Sequence& xs) {
    check_sequence(xs, "SimpleRnnCell");
    xs_ = xs;
    hs_.assign(xs.size() + 1, Matrix());
    hs_[0] = Matrix::Zero(xs[0].rows(), static_cast<Eigen::Index>(units_));
    for (std::size_t t = 0; t < xs.size(); ++t) hs_[t + 1] = step(xs[t], hs_[t]);
    return {hs_.begin() + 1, hs_.end()};
}

Sequence SimpleRnnCell::backward(const Sequence& dhs) {
    const std::size_t T = xs_.size();
    if (dhs.size() != T) throw std::invalid_argument("SimpleRnnCell::backward: sequence length mismatch");
    Sequence dxs(T);
    Matrix dh_next = Matrix::Zero(hs_[0].rows(), hs_[0].cols());
    for (std::size_t t = T; t-- > 0;) {
        const Matrix dh = dhs[t] + dh_next;
        const Matrix da = dh.cwiseProduct(derivative_from_output(g, hs_[t + 1]));
        accumulate(W, da, xs_[t]);
        accumulate(U, da, hs_[t]);
        accumulate_bias(b, da);
        dxs[t] = da * W.value.matrix();
        dh_next = da * U.value.matrix();
    }
    return dxs;
}

// ---------------------------------------------------------------- LSTM

LstmCell::LstmCell(const std::string& name, std::size_t in, std::size_t units, Activation act)
    : W_f(name + ".W_f", Shape{units, in}), W_i(name + ".W_i", Shape{units, in}), W_c(name + ".W_c", Shape{units, in}),
      W_o(name + ".W_o", Shape{units, in}), V_f(name + ".V_f", Shape{units, units}),
      V_i(name + ".V_i", Shape{units, units}), V_c(name + ".V_c", Shape{units, units}),
      V_o(name + ".V_o", Shape{units, units}), b_f(name + ".b_f", Shape{units}), b_i(name + ".b_i", Shape{units}),
      b_c(name + ".b_c", Shape{units}), b_o(name + ".b_o", Shape{units}), g(act), in_(in), units_(units) {
    if (in == 0 || units == 0) throw std::invalid_argument("LstmCell: dimensions must be positive");
}

void LstmCell::init(Rng& rng) {
    for (Parameter* w : {&W_f, &W_i, &W_c, &W_o}) init_uniform_fan_in(*w, in_, rng);
    for (Parameter* v : {&V_f, &V_i, &V_c, &V_o}) init_uniform_fan_in(*v, units_, rng);
    for (Parameter* bias : {&b_i, &b_c, &b_o}) bias->value.fill(0.0);
    b_f.value.fill(1.0);
}

LstmStep LstmCell::step(const Matrix& x, const Matrix& h_prev, const Matrix& c_prev) const {
    check_input(x, in_, "LstmCell");
    check_state(h_prev, x, units_, "LstmCell");
    check_state(c_prev, x, units_, "LstmCell");
    LstmStep s;
    s.f = sigmoid(gate_pre(x, W_f, h_prev, V_f, b_f));
    s.i = sigmoid(gate_pre(x, W_i, h_prev, V_i, b_i));
    s.c_tilde = apply(g, gate_pre(x, W_c, h_prev, V_c, b_c));
    s.c = s.f.cwiseProduct(c_prev) + s.i.cwiseProduct(s.c_tilde);
    s.o = sigmoid(gate_pre(x, W_o, h_prev, V_o, b_o));
    s.h = s.o.cwiseProduct(apply(g, s.c));
    return s;
}

Sequence LstmCell::forward(const Sequence& xs) {
    check_sequence(xs, "LstmCell");
    xs_ = xs;
    steps_.clear();
    steps_.reserve(xs.size());
    const Matrix zero = Matrix::Zero(xs[0].rows(), static_cast<Eigen::Index>(units_));
    Sequence out;
    out.reserve(xs.size());
    for (std::size_t t = 0; t < xs.size(); ++t) {
        const Matrix& h = t == 0 ? zero : steps_.back().h;
        const Matrix& c = t == 0 ? zero : steps_.back().c;
        steps_.push_back(step(xs[t], h, c));
        out.push_back(steps_.back().h);
    }
    return out;
}

Sequence LstmCell::backward(const Sequence& dhs) {
    const std::size_t T = xs_.size();
    if (dhs.size() != T) throw std::invalid_argument("LstmCell::backward: sequence length mismatch");
    const Matrix zero = Matrix::Zero(xs_[0].rows(), static_cast<Eigen::Index>(units_));
    Sequence dxs(T);
    Matrix dh_next = zero;
    Matrix dc_next = zero;
    for (std::size_t t = T; t-- > 0;) {
        const LstmStep& s = steps_[t];
        const Matrix& h_prev = t == 0 ? zero : steps_[t - 1].h;
        const Matrix& c_prev = t == 0 ? zero : steps_[t - 1].c;
        const Matrix gc = apply(g, s.c);
        const Matrix dh = dhs[t] + dh_next;
        const Matrix d_o = dh.cwiseProduct(gc);
        const Matrix dc = dc_next + dh.cwiseProduct(s.o).cwiseProduct(derivative_from_output(g, gc));
        const Matrix da_f = dc.cwiseProduct(c_prev).cwiseProduct(derivative_from_output(Activation::sigmoid, s.f));
        const Matrix da_i = dc.cwiseProduct(s.c_tilde).cwiseProduct(derivative_from_output(Activation::sigmoid, s.i));
        const Matrix da_c = dc.cwiseProduct(s.i).cwiseProduct(derivative_from_output(g, s.c_tilde));
        const Matrix da_o = d_o.cwiseProduct(derivative_from_output(Activation::sigmoid, s.o));

        Matrix dx = Matrix::Zero(xs_[t].rows(), xs_[t].cols());
        Matrix dhp = Matrix::Zero(zero.rows(), zero.cols());
        const std::pair<const Matrix*, std::array<Parameter*, 3>> gates[4] = {
            {&da_f, {&W_f, &V_f, &b_f}}, {&da_i, {&W_i, &V_i, &b_i}}, {&da_c, {&W_c, &V_c, &b_c}}, {&da_o, {&W_o, &V_o, &b_o}}};
        for (const auto& [da, p] : gates) {
            accumulate(*p[0], *da, xs_[t]);
            accumulate(*p[1], *da, h_prev);
            accumulate_bias(*p[2], *da);
            dx.noalias() += *da * p[0]->value.matrix();
            dhp.noalias() += *da * p[1]->value.matrix();
        }
        dxs[t] = std::move(dx);
        dh_next = std::move(dhp);
        dc_next = dc.cwiseProduct(s.f);
    }
    return dxs;
}

// ---------------------------------------------------------------- GRU

GruCell::GruCell(const std::string& name, std::size_t in, std::size_t units, Activation act)
    : W_r(name + ".W_r", Shape{units, in}), W_z(name + ".W_z", Shape{units, in}), W_h(name + ".W_h", Shape{units, in}),
      U_r(name + ".U_r", Shape{units, units}), U_z(name + ".U_z", Shape{units, units}),
      U_h(name + ".U_h", Shape{units, units}), b_r(name + ".b_r", Shape{units}), b_z(name + ".b_z", Shape{units}),
      b_h(name + ".b_h", Shape{units}), g(act), in_(in), units_(units) {
    if (in == 0 || units == 0) throw std::invalid_argument("GruCell: dimensions must be positive");
}

void GruCell::init(Rng& rng) {
    for (Parameter* w : {&W_r, &W_z, &W_h}) init_uniform_fan_in(*w, in_, rng);
    for (Parameter* u : {&U_r, &U_z, &U_h}) init_uniform_fan_in(*u, units_, rng);
    for (Parameter* bias : {&b_r, &b_z, &b_h}) bias->value.fill(0.0);
}

GruStep GruCell::step(const Matrix& x, const Matrix& h_prev) const {
    check_input(x, in_, "GruCell");
    check_state(h_prev, x, units_, "GruCell");
    GruStep s;
    s.r = sigmoid(gate_pre(x, W_r, h_prev, U_r, b_r));
    s.z = sigmoid(gate_pre(x, W_z, h_prev, U_z, b_z));
    s.h_tilde = apply(g, gate_pre(x, W_h, s.r.cwiseProduct(h_prev), U_h, b_h));
    s.h = s.z.cwiseProduct(h_prev) + (1.0 - s.z.array()).matrix().cwiseProduct(s.h_tilde);
    return s;
}

Sequence GruCell::forward(const Sequence& xs) {
    check_sequence(xs, "GruCell");
    xs_ = xs;
    steps_.clear();
    h_prev_.clear();
    Sequence out;
    out.reserve(xs.size());
    Matrix h = Matrix::Zero(xs[0].rows(), static_cast<Eigen::Index>(units_));
    for (const Matrix& x : xs) {
        h_prev_.push_back(h);
        steps_.push_back(step(x, h));
        h = steps_.back().h;
        out.push_back(h);
    }
    return out;
}

Sequence GruCell::backward(const Sequence& dhs) {
    const std::size_t T = xs_.size();
    if (dhs.size() != T) throw std::invalid_argument("GruCell::backward: sequence length mismatch");
    Sequence dxs(T);
    Matrix dh_next = Matrix::Zero(xs_[0].rows(), static_cast<Eigen::Index>(units_));
    for (std::size_t t = T; t-- > 0;) {
        const GruStep& s = steps_[t];
        const Matrix& hp = h_prev_[t];
        const Matrix dh = dhs[t] + dh_next;
        const Matrix dz = dh.cwiseProduct(hp - s.h_tilde);
        const Matrix dht = dh.cwiseProduct((1.0 - s.z.array()).matrix());
        Matrix dhp = dh.cwiseProduct(s.z);

        const Matrix da_h = dht.cwiseProduct(derivative_from_output(g, s.h_tilde));
        const Matrix rh = s.r.cwiseProduct(hp);
        accumulate(W_h, da_h, xs_[t]);
        accumulate(U_h, da_h, rh);
        accumulate_bias(b_h, da_h);
        const Matrix drh = da_h * U_h.value.matrix();
        const Matrix dr = drh.cwiseProduct(hp);
        dhp += drh.cwiseProduct(s.r);

        const Matrix da_z = dz.cwiseProduct(derivative_from_output(Activation::sigmoid, s.z));
        const Matrix da_r = dr.cwiseProduct(derivative_from_output(Activation::sigmoid, s.r));
        accumulate(W_z, da_z, xs_[t]);
        accumulate(U_z, da_z, hp);
        accumulate_bias(b_z, da_z);
        accumulate(W_r, da_r, xs_[t]);
        accumulate(U_r, da_r, hp);
        accumulate_bias(b_r, da_r);

        Matrix dx = da_h * W_h.value.matrix();
        dx.noalias() += da_z * W_z.value.matrix();
        dx.noalias() += da_r * W_r.value.matrix();
        dhp.noalias() += da_z * U_z.value.matrix();
        dhp.noalias() += da_r * U_r.value.matrix();
        dxs[t] = std::move(dx);
        dh_next = std::move(dhp);
    }
    return dxs;
}

// ---------------------------------------------------------------- Bidirectional

Bidirectional::Bidirectional(std::unique_ptr<SequenceLayer> fwd, std::unique_ptr<SequenceLayer> bwd)
    : fwd_(std::move(fwd)), bwd_(std::move(bwd)) {
    if (!fwd_ || !bwd_) throw std::invalid_argument("Bidirectional: null layer");
    if (fwd_->output_dim() != bwd_->output_dim()) throw std::invalid_argument("Bidirectional: unit counts differ");
    if (fwd_->input_dim() != bwd_->input_dim()) throw std::invalid_argument("Bidirectional: input dimensions differ");
}

Bidirectional::Bidirectional(const Bidirectional& other) : fwd_(other.fwd_->clone()), bwd_(other.bwd_->clone()) {}

std::vector<Parameter*> Bidirectional::parameters() {
    auto p = fwd_->parameters();
    const auto q = bwd_->parameters();
    p.insert(p.end(), q.begin(), q.end());
    return p;
}

void Bidirectional::init(Rng& rng) {
    fwd_->init(rng);
    bwd_->init(rng);
}

Sequence Bidirectional::forward(const Sequence& xs) {
    const Sequence f = fwd_->forward(xs);
    const Sequence b = bwd_->forward(Sequence(xs.rbegin(), xs.rend()));
    const std::size_t T = xs.size();
    const auto u = static_cast<Eigen::Index>(fwd_->output_dim());
    Sequence out(T);
    for (std::size_t t = 0; t < T; ++t) {
        out[t].resize(xs[t].rows(), 2 * u);
        out[t].leftCols(u) = f[t];
        out[t].rightCols(u) = b[T - 1 - t];
    }
    return out;
}

Sequence Bidirectional::backward(const Sequence& dhs) {
    const std::size_t T = dhs.size();
    const auto u = static_cast<Eigen::Index>(fwd_->output_dim());
    Sequence df(T), db(T);
    for (std::size_t t = 0; t < T; ++t) {
        df[t] = dhs[t].leftCols(u);
        db[T - 1 - t] = dhs[t].rightCols(u);
    }
    Sequence dx = fwd_->backward(df);
    const Sequence dxb = bwd_->backward(db);
    for (std::size_t t = 0; t < T; ++t) dx[t] += dxb[T - 1 - t];
    return dx;
}

// ---------------------------------------------------------------- step helpers

Vector rnn_step(const SimpleRnnCell& cell, const Vector& x, const Vector& h_prev) {
    return cell.step(row(x), row(h_prev)).row(0).transpose();
}

std::pair<Vector, Vector> lstm_step(const LstmCell& cell, const Vector& x, const Vector& h_prev, const Vector& c_prev) {
    const LstmStep s = cell.step(row(x), row(h_prev), row(c_prev));
    return {s.h.row(0).transpose(), s.c.row(0).transpose()};
}

Vector gru_step(const GruCell& cell, const Vector& x, const Vector& h_prev) {
    return cell.step(row(x), row(h_prev)).h.row(0).transpose();
}

// ---------------------------------------------------------------- stacked model

std::string to_string(HeadLoss h) { return h == HeadLoss::final_only ? "final_only" : "next_value"; }

HeadLoss head_loss_from_string(std::string_view name) {
    if (name == "next_value") return HeadLoss::next_value;
    if (name == "final_only") return HeadLoss::final_only;
    throw std::invalid_argument("unknown head loss '" + std::string(name) + "'");
}

void RecurrentConfig::validate() const {
    if (kind == ModelKind::transformer) throw std::invalid_argument("RecurrentConfig: transformer is not a recurrent kind");
    if (units == 0 || layers == 0 || window_len == 0) throw std::invalid_argument("RecurrentConfig: dimensions must be positive");
    if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("RecurrentConfig: dropout must lie in [0, 1)");
}

namespace {

std::unique_ptr<SequenceLayer> make_cell(ModelKind kind, const std::string& name, std::size_t in, std::size_t units,
                                         Activation g) {
    switch (kind) {
    case ModelKind::simple_rnn: return std::make_unique<SimpleRnnCell>(name, in, units, g);
    case ModelKind::lstm:
    case ModelKind::bilstm: return std::make_unique<LstmCell>(name, in, units, g);
    case ModelKind::gru:
    case ModelKind::bigru: return std::make_unique<GruCell>(name, in, units, g);
    case ModelKind::transformer: break;
    }
    throw std::invalid_argument("make_cell: not a recurrent kind");
}

bool is_bidirectional(ModelKind k) { return k == ModelKind::bilstm || k == ModelKind::bigru; }

} // namespace

RecurrentModel::RecurrentModel(RecurrentConfig config) : config_(config) {
    config_.validate();
    std::size_t in = 1;
    for (std::size_t l = 0; l < config_.layers; ++l) {
        const std::string name = "layer" + std::to_string(l);
        if (is_bidirectional(config_.kind)) {
            layers_.push_back(std::make_unique<Bidirectional>(
                make_cell(config_.kind, name + ".fwd", in, config_.units, config_.activation),
                make_cell(config_.kind, name + ".bwd", in, config_.units, config_.activation)));
        } else {
            layers_.push_back(make_cell(config_.kind, name, in, config_.units, config_.activation));
        }
        in = layers_.back()->output_dim();
    }
    head_ = DenseLayer("head", in, 1, Activation::identity);
}

RecurrentModel::RecurrentModel(const RecurrentModel& other)
    : SequenceRegressor(other), config_(other.config_), head_(other.head_), masks_(other.masks_), top_(other.top_),
      batch_(other.batch_) {
    for (const auto& l : other.layers_) layers_.push_back(l->clone());
}

std::vector<Parameter*> RecurrentModel::parameters() {
    std::vector<Parameter*> out;
    for (auto& l : layers_) {
        const auto p = l->parameters();
        out.insert(out.end(), p.begin(), p.end());
    }
    for (Parameter* p : head_.parameters()) out.push_back(p);
    return out;
}

void RecurrentModel::init(Rng& rng) {
    for (auto& l : layers_) l->init(rng);
    head_.init(rng);
}

void RecurrentModel::set_dropout_rate(double rate) {
    if (!(rate >= 0.0 && rate < 1.0)) throw std::invalid_argument("RecurrentModel: dropout must lie in [0, 1)");
    config_.dropout = rate;
}

Matrix RecurrentModel::forward(const Matrix& windows, bool training, Rng& rng) {
    if (static_cast<std::size_t>(windows.cols()) != config_.window_len) {
        throw std::invalid_argument("RecurrentModel: window length mismatch");
    }
    const Eigen::Index B = windows.rows();
    const std::size_t T = config_.window_len;
    batch_ = static_cast<std::size_t>(B);
    Sequence seq(T);
    for (std::size_t t = 0; t < T; ++t) seq[t] = windows.col(static_cast<Eigen::Index>(t));
    masks_.clear();
    for (auto& l : layers_) {
        seq = l->forward(seq);
        Sequence mask;
        if (training && config_.dropout > 0.0) {
            for (Matrix& h : seq) {
                mask.push_back(dropout_mask(h.rows(), h.cols(), config_.dropout, true, rng));
                h = h.cwiseProduct(mask.back());
            }
        }
        masks_.push_back(std::move(mask));
    }
    for (const Matrix& h : seq) check_finite(h, "recurrent activations");
    top_ = seq;

    if (config_.head_loss == HeadLoss::final_only) return head_.forward(seq.back());
    const auto H = seq[0].cols();
    Matrix stacked(static_cast<Eigen::Index>(T) * B, H);
    for (std::size_t t = 0; t < T; ++t) stacked.middleRows(static_cast<Eigen::Index>(t) * B, B) = seq[t];
    const Matrix y = head_.forward(stacked);
    Matrix out(B, static_cast<Eigen::Index>(T));
    for (std::size_t t = 0; t < T; ++t) out.col(static_cast<Eigen::Index>(t)) = y.middleRows(static_cast<Eigen::Index>(t) * B, B);
    return out;
}

void RecurrentModel::backward(const Matrix& d_output) {
    const std::size_t T = config_.window_len;
    const auto B = static_cast<Eigen::Index>(batch_);
    Sequence dseq(T);
    if (config_.head_loss == HeadLoss::final_only) {
        if (d_output.rows() != B || d_output.cols() != 1) throw std::invalid_argument("RecurrentModel::backward: shape mismatch");
        const Matrix dh = head_.backward(d_output);
        for (std::size_t t = 0; t + 1 < T; ++t) dseq[t] = Matrix::Zero(B, dh.cols());
        dseq[T - 1] = dh;
    } else {
        if (d_output.rows() != B || static_cast<std::size_t>(d_output.cols()) != T) {
            throw std::invalid_argument("RecurrentModel::backward: shape mismatch");
        }
        Matrix dy(static_cast<Eigen::Index>(T) * B, 1);
        for (std::size_t t = 0; t < T; ++t) dy.middleRows(static_cast<Eigen::Index>(t) * B, B) = d_output.col(static_cast<Eigen::Index>(t));
        const Matrix dh = head_.backward(dy);
        for (std::size_t t = 0; t < T; ++t) dseq[t] = dh.middleRows(static_cast<Eigen::Index>(t) * B, B);
    }
    for (std::size_t l = layers_.size(); l-- > 0;) {
        if (!masks_[l].empty()) {
            for (std::size_t t = 0; t < T; ++t) dseq[t] = dseq[t].cwiseProduct(masks_[l][t]);
        }
        dseq = layers_[l]->backward(dseq);
    }
}

Matrix RecurrentModel::training_targets(const Matrix& windows, const Vector& next) const {
    if (windows.rows() != next.size()) throw std::invalid_argument("training_targets: batch size mismatch");
    if (config_.head_loss == HeadLoss::final_only) return next;
    const Eigen::Index T = windows.cols();
    Matrix out(windows.rows(), T);
    out.leftCols(T - 1) = windows.rightCols(T - 1);
    out.col(T - 1) = next;
    return out;
}

std::unique_ptr<SequenceRegressor> RecurrentModel::clone() const { return std::make_unique<RecurrentModel>(*this); }

std::map<std::string, std::string> RecurrentModel::metadata() const {
    return {{"kind", to_string(config_.kind)},
            {"units", std::to_string(config_.units)},
            {"recurrent_layers", std::to_string(config_.layers)},
            {"layer_count_convention", "recurrent layers only; dense head extra"},
            {"activation", to_string(config_.activation)},
            {"gate_activation", "sigmoid"},
            {"dropout", std::to_string(config_.dropout)},
            {"dropout_placement", "after every recurrent layer"},
            {"window_len", std::to_string(config_.window_len)},
            {"head", "time-distributed dense"},
            {"head_loss", to_string(config_.head_loss)},
            {"gru_update_convention", "h = z*h_prev + (1-z)*h_tilde"}};
}

} // namespace tsf::nn
