#pragma once

// Element-by-element reference computations for the neural blocks, shared by
// the unit tests and the acceptance binary.

#include "test_support.hpp"

#include "tsf/nn/recurrent.hpp"
#include "tsf/nn/transformer.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace tsf::testing {

using nn::Activation;
using nn::GruCell;
using nn::LayerNorm;
using nn::LstmCell;
using nn::Matrix;
using nn::MultiHeadAttention;
using nn::Parameter;
using nn::Sequence;
using nn::SimpleRnnCell;
using nn::Vector;

// Scalar oracles written element by element, independent of the Eigen code paths.

inline double act(Activation a, double x) {
    switch (a) {
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-x));
    case Activation::tanh: return std::tanh(x);
    case Activation::relu: return x > 0.0 ? x : 0.0;
    case Activation::identity: return x;
    }
    return x;
}

inline double sig(double x) { return act(Activation::sigmoid, x); }

inline double W(const Parameter& p, std::size_t r, std::size_t c) { return p.value[r * p.value.shape()[1] + c]; }

// sum_j M(u, j) v[j]
inline double dot_row(const Parameter& M, std::size_t u, const Vector& v) {
    double s = 0.0;
    for (std::size_t j = 0; j < static_cast<std::size_t>(v.size()); ++j) s += W(M, u, j) * v(static_cast<Eigen::Index>(j));
    return s;
}

inline Vector rnn_oracle(const SimpleRnnCell& c, const Vector& x, const Vector& h) {
    Vector out(h.size());
    for (std::size_t u = 0; u < static_cast<std::size_t>(h.size()); ++u) {
        out(static_cast<Eigen::Index>(u)) = act(c.g, dot_row(c.W, u, x) + dot_row(c.U, u, h) + c.b.value[u]);
    }
    return out;
}

inline std::pair<Vector, Vector> lstm_oracle(const LstmCell& c, const Vector& x, const Vector& h, const Vector& cp) {
    const auto n = h.size();
    Vector hn(n), cn(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto u = static_cast<std::size_t>(k);
        const double f = sig(dot_row(c.W_f, u, x) + dot_row(c.V_f, u, h) + c.b_f.value[u]);
        const double i = sig(dot_row(c.W_i, u, x) + dot_row(c.V_i, u, h) + c.b_i.value[u]);
        const double ct = act(c.g, dot_row(c.W_c, u, x) + dot_row(c.V_c, u, h) + c.b_c.value[u]);
        cn(k) = f * cp(k) + i * ct;
        const double o = sig(dot_row(c.W_o, u, x) + dot_row(c.V_o, u, h) + c.b_o.value[u]);
        hn(k) = o * act(c.g, cn(k));
    }
    return {hn, cn};
}

inline Vector gru_oracle(const GruCell& c, const Vector& x, const Vector& h) {
    const auto n = h.size();
    Vector r(n), z(n), out(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto u = static_cast<std::size_t>(k);
        r(k) = sig(dot_row(c.W_r, u, x) + dot_row(c.U_r, u, h) + c.b_r.value[u]);
        z(k) = sig(dot_row(c.W_z, u, x) + dot_row(c.U_z, u, h) + c.b_z.value[u]);
    }
    const Vector rh = r.cwiseProduct(h);
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto u = static_cast<std::size_t>(k);
        const double ht = act(c.g, dot_row(c.W_h, u, x) + dot_row(c.U_h, u, rh) + c.b_h.value[u]);
        out(k) = z(k) * h(k) + (1.0 - z(k)) * ht;
    }
    return out;
}

inline Vector random_vector(Rng& rng, std::size_t n) {
    const auto v = uniform_vector(rng, n);
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(n));
}

inline Sequence random_sequence(Rng& rng, std::size_t T, Eigen::Index B, Eigen::Index F) {
    Sequence s;
    for (std::size_t t = 0; t < T; ++t) s.push_back(random_matrix(rng, B, F));
    return s;
}

inline double weighted_sum(const Sequence& hs, const Sequence& r) {
    double s = 0.0;
    for (std::size_t t = 0; t < hs.size(); ++t) s += (hs[t].array() * r[t].array()).sum();
    return s;
}

inline Matrix linear(const Matrix& x, const Parameter& W, const Parameter& b) {
    Matrix out = x * W.value.matrix().transpose();
    out.rowwise() += b.value.matrix().col(0).transpose();
    return out;
}

// Loop-based attention for one sequence: softmax(Q_h K_h^T / sqrt(dh)) V_h per head, concatenated, projected.
inline Matrix attention_oracle(const MultiHeadAttention& mha, const Matrix& x, std::size_t heads) {
    const Matrix q = linear(x, mha.W_q, mha.b_q), k = linear(x, mha.W_k, mha.b_k), v = linear(x, mha.W_v, mha.b_v);
    const auto L = x.rows();
    const auto d = x.cols();
    const auto dh = d / static_cast<Eigen::Index>(heads);
    Matrix concat = Matrix::Zero(L, d);
    for (Eigen::Index h = 0; h < static_cast<Eigen::Index>(heads); ++h) {
        for (Eigen::Index i = 0; i < L; ++i) {
            std::vector<double> w(static_cast<std::size_t>(L));
            for (Eigen::Index j = 0; j < L; ++j) {
                double s = 0.0;
                for (Eigen::Index c = 0; c < dh; ++c) s += q(i, h * dh + c) * k(j, h * dh + c);
                w[static_cast<std::size_t>(j)] = s / std::sqrt(static_cast<double>(dh));
            }
            const double mx = *std::max_element(w.begin(), w.end());
            double z = 0.0;
            for (double& e : w) z += (e = std::exp(e - mx));
            for (Eigen::Index j = 0; j < L; ++j) {
                for (Eigen::Index c = 0; c < dh; ++c) concat(i, h * dh + c) += w[static_cast<std::size_t>(j)] / z * v(j, h * dh + c);
            }
        }
    }
    return linear(concat, mha.W_o, mha.b_o);
}

inline Matrix layer_norm_oracle(const Matrix& x) {
    Matrix out(x.rows(), x.cols());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        double mean = 0.0, var = 0.0;
        for (Eigen::Index c = 0; c < x.cols(); ++c) mean += x(r, c);
        mean /= static_cast<double>(x.cols());
        for (Eigen::Index c = 0; c < x.cols(); ++c) var += (x(r, c) - mean) * (x(r, c) - mean);
        var /= static_cast<double>(x.cols());
        for (Eigen::Index c = 0; c < x.cols(); ++c) out(r, c) = (x(r, c) - mean) / std::sqrt(var + LayerNorm::kEpsilon);
    }
    return out;
}

} // namespace tsf::testing
