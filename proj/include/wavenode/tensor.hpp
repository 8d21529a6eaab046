#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "wavenode/errors.hpp"

namespace wavenode {

using real = double;
using i64 = std::int64_t;

class Graph;

/// Dense row-major tensor of doubles. Copies share the underlying buffer;
/// once a tensor has been fed into an autodiff graph its values are treated
/// as immutable. A rank-0 tensor with one element plays the role of a scalar.
struct Tensor {
    std::vector<i64> shape;
    std::shared_ptr<std::vector<real>> data;
    std::shared_ptr<std::vector<real>> grad;  // allocated iff requires_grad
    i64 node = -1;                            // id on `owner` when recorded
    const Graph * owner = nullptr;

    Tensor() = default;

    static Tensor zeros(std::vector<i64> shape);
    static Tensor full(std::vector<i64> shape, real value);
    static Tensor scalar(real value);
    static Tensor from(std::vector<real> values, std::vector<i64> shape);

    bool defined() const { return static_cast<bool>(data); }
    i64 numel() const;
    i64 rank() const { return static_cast<i64>(shape.size()); }
    i64 dim(i64 i) const;

    // Rank-3 accessors for the ubiquitous (batch, channels, length) layout.
    i64 b() const { return dim3(0); }
    i64 c() const { return dim3(1); }
    i64 l() const { return dim3(2); }

    real * ptr() { return data->data(); }
    const real * ptr() const { return data->data(); }
    real item() const;

    bool requires_grad() const { return static_cast<bool>(grad); }
    Tensor & set_requires_grad();
    void zero_grad();

    /// Same data, no graph attachment.
    Tensor detached() const;
    /// Deep copy of the value buffer.
    Tensor clone() const;

  private:
    i64 dim3(i64 i) const;
};

std::string shape_str(const std::vector<i64> & shape);
bool same_shape(const Tensor & a, const Tensor & b);
bool all_finite(const Tensor & t);

}  // namespace wavenode
