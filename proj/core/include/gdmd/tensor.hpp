#pragma once

#include <cstddef>
#include <vector>

namespace gdmd {

class Rng;

/// Dense row-major tensor of 64-bit floats.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    Tensor(std::vector<std::size_t> shape_in, std::vector<double> data_in);

    static Tensor zeros(std::vector<std::size_t> shape);
    static Tensor full(std::vector<std::size_t> shape, double value);
    static Tensor randn(std::vector<std::size_t> shape, Rng& rng);
    /// 1-D tensor from explicit values.
    static Tensor of(std::vector<double> values);

    std::size_t numel() const { return data.size(); }
    std::size_t rows() const;
    std::size_t cols() const;

    double& at(std::size_t i, std::size_t j);
    double at(std::size_t i, std::size_t j) const;
    double& operator[](std::size_t i) { return data[i]; }
    double operator[](std::size_t i) const { return data[i]; }

    bool same_shape(const Tensor& other) const { return shape == other.shape; }
    bool all_finite() const;

    /// Copy of row i of a 2-D tensor as a 1-D tensor.
    Tensor row_copy(std::size_t i) const;
};

void require_same_shape(const Tensor& a, const Tensor& b, const char* where);
void require_finite(const Tensor& t, const char* where);

Tensor operator+(const Tensor& a, const Tensor& b);
Tensor operator-(const Tensor& a, const Tensor& b);
Tensor operator*(double s, const Tensor& a);
Tensor& operator+=(Tensor& a, const Tensor& b);
Tensor& operator-=(Tensor& a, const Tensor& b);

double dot(const Tensor& a, const Tensor& b);
double squared_norm(const Tensor& a);

}  // namespace gdmd
