#pragma once

#include "chemo/core.hpp"
#include "chemo/particles.hpp"
#include "chemo/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace chemo {

enum class Scheduler { FixedStep, GillespieAlpha };

template <typename Scalar>
struct ReactionParams {
    /// alpha -> beta, constant rate.
    Scalar r_alpha = Scalar(10);
    /// beta -> alpha, effective rate r_beta * c at the particle.
    Scalar r_beta = Scalar(0);
    Scheduler scheduler = Scheduler::FixedStep;
};

template <typename Scalar>
void validate(const ReactionParams<Scalar>& p, Scalar dt) {
    if (!(p.r_alpha >= 0) || !(p.r_beta >= 0)) throw std::invalid_argument("reaction rates must be >= 0");
    if (p.scheduler == Scheduler::FixedStep && p.r_alpha * dt > Scalar(0.1)) {
        std::ostringstream msg;
        msg << "r_alpha * dt = " << p.r_alpha * dt << " is not small; fixed-step reactions are inaccurate";
        warn_once(msg.str());
    }
}

/// Bernoulli probability for rate * dt, clamped to [0, 1].
template <typename Scalar>
Scalar flip_probability(Scalar rate_dt) {
    if (rate_dt > 1) {
        warn_once("reaction probability rate*dt exceeded 1 and was clamped");
        return 1;
    }
    return rate_dt > 0 ? rate_dt : Scalar(0);
}

/// Draws one uniform per particle in id order and flips those that react.
/// Decisions use the start-of-step state and are applied together, so no
/// particle flips twice in a step. Returns the number of flips.
template <typename Scalar>
std::size_t fixed_step_reactions(Population<Scalar>& pop, const ReactionParams<Scalar>& params, Scalar dt,
                                 RandomStream<Scalar>& rng) {
    const Scalar p_alpha = flip_probability(params.r_alpha * dt);
    std::vector<std::size_t> flips;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        const auto& p = pop[i];
        const Scalar u = rng.uniform();
        const Scalar prob =
            p.species == Species::Alpha ? p_alpha : flip_probability(params.r_beta * p.local_concentration * dt);
        if (u < prob) flips.push_back(i);
    }
    for (std::size_t i : flips)
        pop.set_species(i, pop[i].species == Species::Alpha ? Species::Beta : Species::Alpha);
    return flips.size();
}

/// Waiting time until the next alpha -> beta event: ln(1/zeta) / (n r).
/// Infinite when no event can happen.
template <typename Scalar>
Scalar gillespie_alpha_time(std::size_t n_alpha, Scalar r_alpha, Scalar zeta) {
    if (n_alpha == 0 || !(r_alpha > 0)) return std::numeric_limits<Scalar>::infinity();
    return std::log(1 / zeta) / (static_cast<Scalar>(n_alpha) * r_alpha);
}

template <typename Scalar>
Scalar gillespie_alpha_time(std::size_t n_alpha, Scalar r_alpha, RandomStream<Scalar>& rng) {
    if (n_alpha == 0 || !(r_alpha > 0)) return std::numeric_limits<Scalar>::infinity();
    return gillespie_alpha_time(n_alpha, r_alpha, rng.uniform_open_zero());
}

/// Absolute time of the next alpha -> beta event, interleaved with the
/// fixed motion steps.
template <typename Scalar>
struct GillespieClock {
    Scalar next_event = std::numeric_limits<Scalar>::infinity();

    void reset(Scalar now, std::size_t n_alpha, Scalar r_alpha, RandomStream<Scalar>& rng) {
        next_event = now + gillespie_alpha_time(n_alpha, r_alpha, rng);
    }
};

/// Reactions over [t, t + dt) with the alpha channel driven by the clock.
/// Draw order: one uniform per Beta particle (id order) for beta -> alpha,
/// then for each alpha event one index draw (victim among start-of-step
/// Alphas not yet chosen) and one waiting-time draw. If any beta -> alpha
/// flip happened the clock is redrawn at t + dt with the new count.
template <typename Scalar>
std::size_t gillespie_reactions(Population<Scalar>& pop, const ReactionParams<Scalar>& params, Scalar t, Scalar dt,
                                GillespieClock<Scalar>& clock, RandomStream<Scalar>& rng) {
    std::vector<std::size_t> to_alpha;
    std::vector<std::size_t> alphas;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        const auto& p = pop[i];
        if (p.species == Species::Alpha) {
            alphas.push_back(i);
            continue;
        }
        const Scalar u = rng.uniform();
        if (u < flip_probability(params.r_beta * p.local_concentration * dt)) to_alpha.push_back(i);
    }

    const Scalar t_end = t + dt;
    std::vector<std::size_t> to_beta;
    while (clock.next_event < t_end && !alphas.empty()) {
        const std::size_t k = rng.index(alphas.size());
        to_beta.push_back(alphas[k]);
        alphas.erase(alphas.begin() + static_cast<std::ptrdiff_t>(k));
        clock.next_event += gillespie_alpha_time(alphas.size(), params.r_alpha, rng);
    }

    for (std::size_t i : to_beta) pop.set_species(i, Species::Beta);
    for (std::size_t i : to_alpha) pop.set_species(i, Species::Alpha);
    if (!to_alpha.empty()) clock.reset(t_end, pop.n_alpha(), params.r_alpha, rng);
    return to_beta.size() + to_alpha.size();
}

}  // namespace chemo
