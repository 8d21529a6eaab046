#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "wavenode/tensor.hpp"

namespace wavenode {

/// Deterministic random source. All randomness in the project flows from one
/// root seed; independent components derive their own stream with
/// `derive(root, "component")` so adding a consumer never shifts another
/// component's stream. Gaussian variates use an explicit Box-Muller transform
/// (std::normal_distribution is not bit-stable across standard libraries).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static std::uint64_t derive(std::uint64_t root, const std::string & component);
    static Rng derived(std::uint64_t root, const std::string & component) {
        return Rng(derive(root, component));
    }

    std::uint64_t next_u64() { return engine_(); }
    i64 uniform_int(i64 lo, i64 hi);     // inclusive bounds
    real uniform(real lo, real hi);      // half-open [lo, hi)
    real gaussian();                     // standard normal
    real rademacher() { return (next_u64() & 1u) ? 1.0 : -1.0; }

    void fill_uniform(Tensor & t, real lo, real hi);
    void fill_gaussian(Tensor & t, real stddev = 1.0);
    void fill_rademacher(Tensor & t);

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    real spare_ = 0.0;
};

}  // namespace wavenode
