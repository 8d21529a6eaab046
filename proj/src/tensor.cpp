#include "wavenode/tensor.hpp"

#include <cmath>
#include <sstream>

namespace wavenode {

static i64 shape_numel(const std::vector<i64> & shape) {
    i64 n = 1;
    for (i64 d : shape) n *= d;
    return n;
}

Tensor Tensor::zeros(std::vector<i64> shape) {
    Tensor t;
    i64 n = shape_numel(shape);
    t.shape = std::move(shape);
    t.data = std::make_shared<std::vector<real>>(static_cast<size_t>(n), 0.0);
    return t;
}

Tensor Tensor::full(std::vector<i64> shape, real value) {
    Tensor t = zeros(std::move(shape));
    for (real & v : *t.data) v = value;
    return t;
}

Tensor Tensor::scalar(real value) {
    Tensor t;
    t.data = std::make_shared<std::vector<real>>(1, value);
    return t;
}

Tensor Tensor::from(std::vector<real> values, std::vector<i64> shape) {
    if (static_cast<i64>(values.size()) != shape_numel(shape)) {
        throw ShapeError("Tensor::from: " + std::to_string(values.size()) +
                         " values do not fill shape " + shape_str(shape));
    }
    Tensor t;
    t.shape = std::move(shape);
    t.data = std::make_shared<std::vector<real>>(std::move(values));
    return t;
}

i64 Tensor::numel() const {
    if (!data) return 0;
    return static_cast<i64>(data->size());
}

i64 Tensor::dim(i64 i) const {
    if (i < 0 || i >= rank()) {
        throw ShapeError("dim " + std::to_string(i) + " out of range for shape " + shape_str(shape));
    }
    return shape[static_cast<size_t>(i)];
}

i64 Tensor::dim3(i64 i) const {
    if (rank() != 3) {
        throw ShapeError("expected a rank-3 (batch, channels, length) tensor, got shape " +
                         shape_str(shape));
    }
    return shape[static_cast<size_t>(i)];
}

real Tensor::item() const {
    if (numel() != 1) {
        throw ShapeError("item() requires a single-element tensor, got shape " + shape_str(shape));
    }
    return (*data)[0];
}

Tensor & Tensor::set_requires_grad() {
    if (!data) throw ShapeError("set_requires_grad on an undefined tensor");
    if (!grad) grad = std::make_shared<std::vector<real>>(data->size(), 0.0);
    return *this;
}

void Tensor::zero_grad() {
    if (grad) std::fill(grad->begin(), grad->end(), 0.0);
}

Tensor Tensor::detached() const {
    Tensor t;
    t.shape = shape;
    t.data = data;
    return t;
}

Tensor Tensor::clone() const {
    Tensor t;
    t.shape = shape;
    if (data) t.data = std::make_shared<std::vector<real>>(*data);
    return t;
}

std::string shape_str(const std::vector<i64> & shape) {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ",";
        os << shape[i];
    }
    os << "]";
    return os.str();
}

bool same_shape(const Tensor & a, const Tensor & b) {
    return a.shape == b.shape;
}

bool all_finite(const Tensor & t) {
    if (!t.data) return false;
    for (real v : *t.data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

}  // namespace wavenode
