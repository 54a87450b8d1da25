#pragma once

#include "chemo/core.hpp"

#include <cstdint>
#include <random>

namespace chemo {

/// The single random stream of one realisation. All draws for
/// initialisation, diffusion and reactions come from this stream in a fixed
/// order, so (seed, config) fully determines a trajectory.
template <typename Scalar>
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    Scalar normal() { return normal_(engine_); }

    Vector2<Scalar> normal2() {
        const Scalar x = normal();
        const Scalar y = normal();
        return {x, y};
    }

    /// Uniform on [0, 1).
    Scalar uniform() { return uniform_(engine_); }

    /// Uniform on (0, 1]; safe as the argument of log.
    Scalar uniform_open_zero() { return Scalar(1) - uniform(); }

    std::size_t index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<Scalar> normal_{Scalar(0), Scalar(1)};
    std::uniform_real_distribution<Scalar> uniform_{Scalar(0), Scalar(1)};
};

/// Seed of realisation `sample` for a population of `n_total` particles.
inline std::uint64_t realisation_seed(std::uint64_t n_total, std::uint64_t sample) {
    return n_total * sample;
}

}  // namespace chemo
