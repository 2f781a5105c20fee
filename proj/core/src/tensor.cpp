#include "gdmd/tensor.hpp"

#include "gdmd/error.hpp"
#include "gdmd/rng.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace gdmd {

namespace {

std::size_t shape_numel(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape_in, std::vector<double> data_in)
    : shape(std::move(shape_in)), data(std::move(data_in)) {
    if (shape_numel(shape) != data.size()) {
        throw contract_error("Tensor: shape/data size mismatch");
    }
}

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
    const std::size_t n = shape_numel(shape);
    return Tensor(std::move(shape), std::vector<double>(n, 0.0));
}

Tensor Tensor::full(std::vector<std::size_t> shape, double value) {
    const std::size_t n = shape_numel(shape);
    return Tensor(std::move(shape), std::vector<double>(n, value));
}

Tensor Tensor::randn(std::vector<std::size_t> shape, Rng& rng) {
    const std::size_t n = shape_numel(shape);
    std::vector<double> values(n);
    for (double& v : values) v = rng.normal();
    return Tensor(std::move(shape), std::move(values));
}

Tensor Tensor::of(std::vector<double> values) {
    const std::size_t n = values.size();
    return Tensor({n}, std::move(values));
}

std::size_t Tensor::rows() const {
    return shape.empty() ? 0 : shape[0];
}

std::size_t Tensor::cols() const {
    return shape.size() < 2 ? (shape.empty() ? 0 : 1) : shape[1];
}

double& Tensor::at(std::size_t i, std::size_t j) {
    return data[i * cols() + j];
}

double Tensor::at(std::size_t i, std::size_t j) const {
    return data[i * cols() + j];
}

bool Tensor::all_finite() const {
    for (double v : data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

Tensor Tensor::row_copy(std::size_t i) const {
    const std::size_t c = cols();
    std::vector<double> values(data.begin() + static_cast<std::ptrdiff_t>(i * c),
                               data.begin() + static_cast<std::ptrdiff_t>((i + 1) * c));
    return Tensor({c}, std::move(values));
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* where) {
    if (!a.same_shape(b)) {
        throw contract_error(std::string(where) + ": shape mismatch");
    }
}

void require_finite(const Tensor& t, const char* where) {
    if (!t.all_finite()) {
        throw numeric_error(std::string(where) + ": non-finite tensor entries");
    }
}

Tensor operator+(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "Tensor::operator+");
    Tensor out = a;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
    return out;
}

Tensor operator-(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "Tensor::operator-");
    Tensor out = a;
    for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] -= b.data[i];
    return out;
}

Tensor operator*(double s, const Tensor& a) {
    Tensor out = a;
    for (double& v : out.data) v *= s;
    return out;
}

Tensor& operator+=(Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "Tensor::operator+=");
    for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += b.data[i];
    return a;
}

Tensor& operator-=(Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "Tensor::operator-=");
    for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] -= b.data[i];
    return a;
}

double dot(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) s += a.data[i] * b.data[i];
    return s;
}

double squared_norm(const Tensor& a) {
    double s = 0.0;
    for (double v : a.data) s += v * v;
    return s;
}

}  // namespace gdmd
