#pragma once

#include "chemo/core.hpp"
#include "chemo/particles.hpp"
#include "chemo/random.hpp"
#include "chemo/spatial_index.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace chemo {

enum class Interaction { None, SoftExponential, HardSphere };
enum class Integrator { EulerMaruyama, Tamed };

template <typename Scalar>
struct MotionParams {
    Scalar D_alpha = Scalar(0.1);
    Scalar D_beta = Scalar(1);
    Scalar chi = Scalar(1);
    /// Interaction range of the soft potential; diameter for hard spheres.
    Scalar epsilon = Scalar(0.02);
    Scalar dt = Scalar(5.29e-6);
    Interaction interaction = Interaction::SoftExponential;
    /// Soft-potential cutoff radius.
    Scalar cutoff = Scalar(0.1);
    Integrator integrator = Integrator::EulerMaruyama;

    Scalar diffusivity(Species s) const { return s == Species::Alpha ? D_alpha : D_beta; }

    /// Radius of the neighbour searches this configuration performs.
    Scalar interaction_radius() const {
        return interaction == Interaction::HardSphere ? epsilon : cutoff;
    }
};

template <typename Scalar>
void validate(const MotionParams<Scalar>& p) {
    if (!(p.D_alpha >= 0) || !(p.D_beta >= 0)) throw std::invalid_argument("diffusion coefficients must be >= 0");
    if (!(p.epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
    if (!(p.dt > 0)) throw std::invalid_argument("dt must be positive");
    if (!(p.chi >= 0)) throw std::invalid_argument("chi must be >= 0");
    if (p.interaction == Interaction::SoftExponential && !(p.cutoff > 0))
        throw std::invalid_argument("interaction cutoff must be positive");
    if (p.interaction != Interaction::None) {
        const Scalar relative = std::sqrt(2 * (p.D_alpha + p.D_beta) * p.dt);
        if (relative > p.epsilon) {
            std::ostringstream msg;
            msg << "time step under-resolves interactions: sqrt(2(D_alpha+D_beta)dt) = " << relative
                << " exceeds epsilon = " << p.epsilon;
            warn_once(msg.str());
        }
    }
}

/// Force on particle i from the potential u(r) = exp(-r/epsilon), where dx
/// points from i to j and r = |dx| > 0. Repulsive: directed along -dx.
template <typename Derived>
auto pair_force(const Eigen::MatrixBase<Derived>& dx, typename Derived::Scalar r,
                typename Derived::Scalar epsilon) {
    using Scalar = typename Derived::Scalar;
    const Scalar magnitude = std::exp(-r / epsilon) / epsilon;
    return Vector2<Scalar>(-(magnitude / r) * dx);
}

/// Soft-potential interaction force on every particle, f_i = -sum_j grad_i u.
/// Each pair is evaluated once (j > i) and applied to both ends. Pairs at
/// exact overlap (r = 0) contribute nothing. `index` must reflect the
/// current positions.
template <typename Scalar>
std::vector<Vector2<Scalar>> accumulate_forces(const Population<Scalar>& pop, const CellIndex<Scalar>& index,
                                               const MotionParams<Scalar>& params) {
    std::vector<Vector2<Scalar>> forces(pop.size(), Vector2<Scalar>::Zero());
    if (params.interaction != Interaction::SoftExponential) return forces;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        index.for_each_neighbor(pop[i].position, params.cutoff,
                                [&](std::size_t j, const Vector2<Scalar>& dx, Scalar d2) {
                                    if (j <= i || !(d2 > 0)) return;
                                    const Vector2<Scalar> f = pair_force(dx, std::sqrt(d2), params.epsilon);
                                    forces[i] += f;
                                    forces[j] -= f;
                                });
    }
    return forces;
}

/// Euler-Maruyama proposal for one particle given the standard normal pair xi.
template <typename Scalar>
Vector2<Scalar> em_step(const Particle<Scalar>& p, const Vector2<Scalar>& force, const MotionParams<Scalar>& params,
                        const Vector2<Scalar>& xi) {
    const Scalar D = params.diffusivity(p.species);
    Vector2<Scalar> next = p.position + std::sqrt(2 * D * params.dt) * xi + force * params.dt;
    if (p.species == Species::Beta) next += p.drift * params.dt;
    return next;
}

template <typename Scalar>
Vector2<Scalar> em_step(const Particle<Scalar>& p, const Vector2<Scalar>& force, const MotionParams<Scalar>& params,
                        RandomStream<Scalar>& rng) {
    return em_step(p, force, params, rng.normal2());
}

/// Interaction increment of the tamed scheme: f dt / (1 + |f| dt). Its norm
/// is strictly below one for every finite force.
template <typename Scalar>
Vector2<Scalar> tamed_increment(const Vector2<Scalar>& force, Scalar dt) {
    const Scalar scaled = force.norm() * dt;
    if (!std::isfinite(scaled)) {
        // |f| dt overflowed; the limit is the unit vector along f
        const Scalar m = force.cwiseAbs().maxCoeff();
        return (force / m).normalized();
    }
    return force * dt / (1 + scaled);
}

/// Same as em_step but with the interaction increment tamed; Brownian and
/// chemotactic terms are unchanged.
template <typename Scalar>
Vector2<Scalar> tamed_step(const Particle<Scalar>& p, const Vector2<Scalar>& force,
                           const MotionParams<Scalar>& params, const Vector2<Scalar>& xi) {
    const Scalar D = params.diffusivity(p.species);
    Vector2<Scalar> next = p.position + std::sqrt(2 * D * params.dt) * xi + tamed_increment(force, params.dt);
    if (p.species == Species::Beta) next += p.drift * params.dt;
    return next;
}

template <typename Scalar>
Vector2<Scalar> tamed_step(const Particle<Scalar>& p, const Vector2<Scalar>& force,
                           const MotionParams<Scalar>& params, RandomStream<Scalar>& rng) {
    return tamed_step(p, force, params, rng.normal2());
}

/// Writes next_position for every particle, drawing one normal pair per
/// particle in id order.
template <typename Scalar>
void propose_positions(Population<Scalar>& pop, const std::vector<Vector2<Scalar>>& forces,
                       const MotionParams<Scalar>& params, RandomStream<Scalar>& rng) {
    for (std::size_t i = 0; i < pop.size(); ++i) {
        auto& p = pop[i];
        const Vector2<Scalar> xi = rng.normal2();
        p.next_position = params.integrator == Integrator::Tamed ? tamed_step(p, forces[i], params, xi)
                                                                 : em_step(p, forces[i], params, xi);
    }
}

namespace detail {

// Folds a proposal into the domain for bucketing only: wrap on periodic
// axes, clamp on reflecting ones. Clamping is non-expansive, so distances
// between folded points never exceed the true ones.
template <typename Scalar>
Vector2<Scalar> fold(Vector2<Scalar> x, const Domain<Scalar>& domain) {
    const Vector2<Scalar> len = domain.extent();
    for (int a = 0; a < 2; ++a) {
        if (domain.periodic[a]) {
            x[a] -= len[a] * std::floor((x[a] - domain.min[a]) / len[a]);
            if (!(x[a] < domain.max[a])) x[a] = domain.min[a];
        } else {
            x[a] = std::clamp(x[a], domain.min[a], domain.max[a]);
        }
    }
    return x;
}

}  // namespace detail

/// Displacements that separate an overlapping pair at distance d < epsilon
/// to distance 2 epsilon - d. `dir` is the unit vector from i to j. The
/// total 2 (epsilon - d) is split D_i / (D_i + D_j) to i, the rest to j;
/// two immobile particles share it equally.
template <typename Scalar>
std::pair<Vector2<Scalar>, Vector2<Scalar>> hard_sphere_split(const Vector2<Scalar>& dir, Scalar d, Scalar epsilon,
                                                              Scalar D_i, Scalar D_j) {
    const Scalar total = 2 * (epsilon - d);
    const Scalar share_i = D_i + D_j > 0 ? D_i / (D_i + D_j) : Scalar(0.5);
    return {-(share_i * total) * dir, ((1 - share_i) * total) * dir};
}

/// One sweep of overlap correction over next_position, pairs (i < j) in
/// id order. Candidate pairs come from the proposals at sweep start; each
/// pair's distance is re-measured at the time it is processed, so earlier
/// corrections are seen by later pairs. A coincident pair is pushed apart
/// along x when i + j is even and along y otherwise.
template <typename Scalar>
void resolve_hard_sphere(Population<Scalar>& pop, const Domain<Scalar>& domain, const MotionParams<Scalar>& params) {
    if (pop.empty()) return;
    std::vector<Vector2<Scalar>> folded;
    folded.reserve(pop.size());
    for (const auto& p : pop) folded.push_back(detail::fold(p.next_position, domain));

    CellIndex<Scalar> index(domain, params.epsilon);
    index.rebuild(folded);

    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < pop.size(); ++i) {
        candidates.clear();
        index.for_each_neighbor(folded[i], params.epsilon, [&](std::size_t j, const Vector2<Scalar>&, Scalar) {
            if (j > i) candidates.push_back(j);
        });
        std::sort(candidates.begin(), candidates.end());
        for (std::size_t j : candidates) {
            auto& pi = pop[i];
            auto& pj = pop[j];
            const Vector2<Scalar> dx = minimum_image<Scalar>(pj.next_position - pi.next_position, domain);
            const Scalar d = dx.norm();
            if (!(d < params.epsilon)) continue;
            Vector2<Scalar> dir;
            if (d > 0) {
                dir = dx / d;
            } else {
                dir = (i + j) % 2 == 0 ? Vector2<Scalar>::UnitX() : Vector2<Scalar>::UnitY();
            }
            const auto [move_i, move_j] = hard_sphere_split(dir, d, params.epsilon, params.diffusivity(pi.species),
                                                            params.diffusivity(pj.species));
            pi.next_position += move_i;
            pj.next_position += move_j;
        }
    }
}

/// Maps one proposed coordinate back into [lo, hi]. Returns the lattice shift
/// applied on periodic axes (a multiple of the period) so anchors can follow.
template <typename Scalar>
Scalar apply_axis_boundary(Scalar& x, Scalar lo, Scalar hi, bool periodic) {
    const Scalar len = hi - lo;
    if (periodic) {
        if (x >= lo && x < hi) return 0;
        if (x < lo - len || x >= hi + len)
            throw SimulationError("particle moved more than one period in a single step");
        const Scalar shift = x < lo ? len : -len;
        x += shift;
        if (!(x < hi)) x = lo;
        if (x < lo) x = lo;
        return shift;
    }
    for (int bounce = 0; bounce < 4 && (x < lo || x > hi); ++bounce) {
        if (x < lo - len || x > hi + len)
            throw SimulationError("reflection overshoot exceeds the domain width");
        x = x > hi ? 2 * hi - x : 2 * lo - x;
    }
    if (x < lo || x > hi) throw SimulationError("reflection failed to return the particle to the domain");
    return 0;
}

/// Applies reflecting / periodic boundaries to next_position, moves anchors
/// with periodic wraps, and commits position <- next_position.
template <typename Scalar>
void apply_boundaries(Population<Scalar>& pop, const Domain<Scalar>& domain) {
    for (auto& p : pop) {
        if (!p.next_position.allFinite()) {
            std::ostringstream msg;
            msg << "non-finite position proposed for particle " << p.id << " (time step too large?)";
            throw SimulationError(msg.str());
        }
        for (int a = 0; a < 2; ++a) {
            const Scalar shift =
                apply_axis_boundary(p.next_position[a], domain.min[a], domain.max[a], domain.periodic[a]);
            p.start_anchor[a] += shift;
        }
        p.position = p.next_position;
    }
}

}  // namespace chemo
