#include "wavenode/rng.hpp"

#include <cmath>

namespace wavenode {

static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

std::uint64_t Rng::derive(std::uint64_t root, const std::string & component) {
    std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a over the component name
    for (unsigned char ch : component) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return splitmix64(root ^ h);
}

i64 Rng::uniform_int(i64 lo, i64 hi) {
    std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<i64>(next_u64() % span);
}

real Rng::uniform(real lo, real hi) {
    // 53-bit mantissa in [0, 1).
    real u = static_cast<real>(next_u64() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

real Rng::gaussian() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    real u1 = 0.0;
    do {
        u1 = uniform(0.0, 1.0);
    } while (u1 <= 0.0);
    real u2 = uniform(0.0, 1.0);
    real r = std::sqrt(-2.0 * std::log(u1));
    real theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

void Rng::fill_uniform(Tensor & t, real lo, real hi) {
    for (real & v : *t.data) v = uniform(lo, hi);
}

void Rng::fill_gaussian(Tensor & t, real stddev) {
    for (real & v : *t.data) v = stddev * gaussian();
}

void Rng::fill_rademacher(Tensor & t) {
    for (real & v : *t.data) v = rademacher();
}

}  // namespace wavenode
