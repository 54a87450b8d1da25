#pragma once

#include "chemo/core.hpp"
#include "chemo/random.hpp"

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace chemo {

template <typename Scalar>
struct Particle {
    std::size_t id = 0;
    Vector2<Scalar> position = Vector2<Scalar>::Zero();
    Vector2<Scalar> next_position = Vector2<Scalar>::Zero();
    Species species = Species::Alpha;
    /// chi * grad c at the particle; zero for Alpha.
    Vector2<Scalar> drift = Vector2<Scalar>::Zero();
    Scalar local_concentration = 0;
    /// MSD reference, translated with the particle across periodic wraps.
    Vector2<Scalar> start_anchor = Vector2<Scalar>::Zero();
};

/// Flat particle storage indexed by id, with cached species tallies.
template <typename Scalar>
class Population {
public:
    using particle_type = Particle<Scalar>;

    Population() = default;

    explicit Population(std::vector<particle_type> particles) : particles_(std::move(particles)) {
        recount();
    }

    std::size_t size() const { return particles_.size(); }
    bool empty() const { return particles_.empty(); }

    particle_type& operator[](std::size_t i) { return particles_[i]; }
    const particle_type& operator[](std::size_t i) const { return particles_[i]; }

    auto begin() { return particles_.begin(); }
    auto end() { return particles_.end(); }
    auto begin() const { return particles_.begin(); }
    auto end() const { return particles_.end(); }

    std::size_t n_alpha() const { return n_alpha_; }
    std::size_t n_beta() const { return n_beta_; }

    void set_species(std::size_t i, Species s) {
        Species& current = particles_[i].species;
        if (current == s) return;
        if (s == Species::Alpha) {
            ++n_alpha_;
            --n_beta_;
            particles_[i].drift.setZero();
        } else {
            --n_alpha_;
            ++n_beta_;
        }
        current = s;
    }

    void recount() {
        n_alpha_ = 0;
        for (const auto& p : particles_) n_alpha_ += p.species == Species::Alpha ? 1 : 0;
        n_beta_ = particles_.size() - n_alpha_;
    }

    std::vector<Vector2<Scalar>> positions() const {
        std::vector<Vector2<Scalar>> out;
        out.reserve(particles_.size());
        for (const auto& p : particles_) out.push_back(p.position);
        return out;
    }

private:
    std::vector<particle_type> particles_;
    std::size_t n_alpha_ = 0;
    std::size_t n_beta_ = 0;
};

template <typename Scalar>
struct InitialCondition {
    long n_alpha = 100;
    long n_beta = 100;
    /// Alpha spread as a fraction of the domain width.
    Scalar sigma = Scalar(0.1);
};

/// Alpha particles (ids 0..n_alpha-1) from a centred 2-D normal, resampled
/// until inside the domain; then Beta particles uniform over the domain.
/// Draw order: for each Alpha, x then y normals (repeating on rejection);
/// for each Beta, x then y uniforms.
template <typename Scalar>
Population<Scalar> init_population(const InitialCondition<Scalar>& ic, const Domain<Scalar>& domain,
                                   RandomStream<Scalar>& rng) {
    if (ic.n_alpha < 0 || ic.n_beta < 0 || ic.n_alpha + ic.n_beta <= 0)
        throw std::invalid_argument("particle counts must be non-negative with a positive total");
    if (!(ic.sigma > 0)) throw std::invalid_argument("sigma must be positive");

    const Vector2<Scalar> width = domain.extent();
    const Scalar sd = ic.sigma * width[0];
    const Vector2<Scalar> centre = (domain.min + domain.max) / 2;

    std::vector<Particle<Scalar>> particles;
    particles.reserve(static_cast<std::size_t>(ic.n_alpha + ic.n_beta));

    auto push = [&](const Vector2<Scalar>& x, Species s) {
        Particle<Scalar> p;
        p.id = particles.size();
        p.position = x;
        p.next_position = x;
        p.start_anchor = x;
        p.species = s;
        particles.push_back(p);
    };

    for (long k = 0; k < ic.n_alpha; ++k) {
        Vector2<Scalar> x;
        do {
            x = centre + sd * rng.normal2();
        } while (!domain.contains(x));
        push(x, Species::Alpha);
    }
    for (long k = 0; k < ic.n_beta; ++k) {
        Vector2<Scalar> x;
        do {
            const Scalar ux = rng.uniform();
            const Scalar uy = rng.uniform();
            x = domain.min + Vector2<Scalar>(ux * width[0], uy * width[1]);
        } while (!domain.contains(x));  // guards rounding onto a periodic upper edge
        push(x, Species::Beta);
    }
    return Population<Scalar>(std::move(particles));
}

template <typename Scalar>
std::pair<std::size_t, std::size_t> species_counts(const Population<Scalar>& pop) {
    return {pop.n_alpha(), pop.n_beta()};
}

}  // namespace chemo
