#include "tsf/nn/tensor.hpp"

#include "tsf/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace tsf::nn {

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)),
      data_(std::accumulate(shape_.begin(), shape_.end(), std::size_t{1}, std::multiplies<>()), fill) {
    if (shape_.empty() || shape_.size() > 2) throw std::invalid_argument("Tensor: only 1-D and 2-D shapes are supported");
}

Eigen::Index Tensor::rows() const { return static_cast<Eigen::Index>(shape_.empty() ? 0 : shape_[0]); }

Eigen::Index Tensor::cols() const { return static_cast<Eigen::Index>(shape_.size() == 2 ? shape_[1] : 1); }

Eigen::Map<RowMatrix> Tensor::matrix() { return {data_.data(), rows(), cols()}; }

Eigen::Map<const RowMatrix> Tensor::matrix() const { return {data_.data(), rows(), cols()}; }

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

void Tensor::check_finite(const std::string& what) const {
    for (double v : data_) {
        if (!std::isfinite(v)) throw NumericalError("non-finite value in " + what);
    }
}

void init_uniform_fan_in(Parameter& p, std::size_t fan_in, Rng& rng) {
    const double limit = std::sqrt(1.0 / static_cast<double>(std::max<std::size_t>(fan_in, 1)));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& v : p.value.data()) v = dist(rng);
}

void check_finite(const Matrix& m, const std::string& what) {
    if (!m.allFinite()) throw NumericalError("non-finite value in " + what);
}

} // namespace tsf::nn
