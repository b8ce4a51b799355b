#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace tsf::nn {

using Rng = std::mt19937_64;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Dense row-major buffer with an explicit shape.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);

    [[nodiscard]] const std::vector<std::size_t>& shape() const { return shape_; }
    [[nodiscard]] std::size_t size() const { return data_.size(); }
    [[nodiscard]] std::span<double> data() { return data_; }
    [[nodiscard]] std::span<const double> data() const { return data_; }
    [[nodiscard]] double& operator[](std::size_t i) { return data_[i]; }
    [[nodiscard]] double operator[](std::size_t i) const { return data_[i]; }

    /// Rows/cols of the 2-D view (a 1-D tensor is a single column).
    [[nodiscard]] Eigen::Index rows() const;
    [[nodiscard]] Eigen::Index cols() const;
    [[nodiscard]] Eigen::Map<RowMatrix> matrix();
    [[nodiscard]] Eigen::Map<const RowMatrix> matrix() const;

    void fill(double v);
    /// Throws NumericalError naming `what` if any entry is NaN or infinite.
    void check_finite(const std::string& what) const;

    friend bool operator==(const Tensor&, const Tensor&) = default;

private:
    std::vector<std::size_t> shape_;
    std::vector<double> data_;
};

/// A trainable tensor and its accumulated gradient.
struct Parameter {
    std::string name;
    Tensor value;
    Tensor grad;

    Parameter() = default;
    Parameter(std::string n, std::vector<std::size_t> shape)
        : name(std::move(n)), value(shape), grad(std::move(shape)) {}
};

/// uniform(-sqrt(1/fan_in), +sqrt(1/fan_in)).
void init_uniform_fan_in(Parameter& p, std::size_t fan_in, Rng& rng);

/// Throws NumericalError if the matrix has a non-finite entry.
void check_finite(const Matrix& m, const std::string& what);

} // namespace tsf::nn
