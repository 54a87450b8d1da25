#pragma once

#include "chemo/core.hpp"
#include "chemo/particles.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <vector>

namespace chemo {

template <typename Scalar>
struct Neighbor {
    std::size_t id;
    /// Shortest displacement from the query point to the neighbour.
    Vector2<Scalar> dx;
    Scalar distance;
};

enum class CellSizing {
    /// Cell side equals the dominant query radius (3x3 search ring).
    QueryRadius,
    /// Roughly ten particles per cell for a uniform population.
    TenPerCell,
};

template <typename Scalar>
Scalar cell_side_for(CellSizing sizing, Scalar query_radius, std::size_t n_particles,
                     const Domain<Scalar>& domain) {
    if (sizing == CellSizing::QueryRadius) return query_radius;
    const Scalar area = domain.extent().prod();
    const Scalar per_cell = Scalar(10);
    return std::sqrt(area * per_cell / static_cast<Scalar>(std::max<std::size_t>(n_particles, 1)));
}

/// Bucket grid over a domain. Buckets are stored as a counting sort of the
/// particle ids (cell_start / sorted_ids) and rebuilt from scratch in O(N).
template <typename Scalar>
class CellIndex {
public:
    static constexpr long kMaxCellsPerAxis = 2048;

    CellIndex(const Domain<Scalar>& domain, Scalar cell_side) : domain_(domain) {
        if (!(cell_side > 0)) throw std::invalid_argument("cell_side must be positive");
        const Vector2<Scalar> len = domain.extent();
        for (int a = 0; a < 2; ++a) {
            const auto n = static_cast<long>(std::floor(len[a] / cell_side + Scalar(1e-9)));
            cells_[a] = std::clamp(n, 1L, kMaxCellsPerAxis);
            side_[a] = len[a] / static_cast<Scalar>(cells_[a]);
        }
        cell_start_.assign(static_cast<std::size_t>(cells_[0] * cells_[1]) + 1, 0);
    }

    const Domain<Scalar>& domain() const { return domain_; }
    long cells(int axis) const { return cells_[axis]; }
    Scalar side(int axis) const { return side_[axis]; }
    std::size_t bucket_count() const { return cell_start_.size() - 1; }
    std::size_t size() const { return positions_.size(); }

    std::size_t bucket_occupancy(std::size_t bucket) const {
        return cell_start_[bucket + 1] - cell_start_[bucket];
    }

    /// Throws if any position lies outside the domain.
    void rebuild(std::span<const Vector2<Scalar>> positions) {
        positions_.assign(positions.begin(), positions.end());
        cell_of_.resize(positions_.size());
        std::fill(cell_start_.begin(), cell_start_.end(), 0);

        for (std::size_t i = 0; i < positions_.size(); ++i) {
            const auto& x = positions_[i];
            if (!domain_.contains(x)) {
                std::ostringstream msg;
                msg << "particle " << i << " at (" << x[0] << ", " << x[1]
                    << ") lies outside the domain";
                throw SimulationError(msg.str());
            }
            cell_of_[i] = flat(cell_coord(x, 0), cell_coord(x, 1));
            ++cell_start_[cell_of_[i] + 1];
        }
        for (std::size_t c = 1; c < cell_start_.size(); ++c) cell_start_[c] += cell_start_[c - 1];

        sorted_ids_.resize(positions_.size());
        std::vector<std::size_t> fill(cell_start_.begin(), cell_start_.end() - 1);
        for (std::size_t i = 0; i < positions_.size(); ++i) sorted_ids_[fill[cell_of_[i]]++] = i;
    }

    /// Calls f(id, dx, squared_distance) for every stored point whose
    /// minimum-image distance to `point` is at most `radius`.
    template <typename F>
    void for_each_neighbor(const Vector2<Scalar>& point, Scalar radius, F&& f) const {
        const Scalar r2 = radius * radius;
        const AxisRange rx = axis_range(point, radius, 0);
        const AxisRange ry = axis_range(point, radius, 1);

        for (long ky = 0; ky < ry.count; ++ky) {
            const long cy = ry.at(ky, cells_[1]);
            for (long kx = 0; kx < rx.count; ++kx) {
                const std::size_t c = flat(rx.at(kx, cells_[0]), cy);
                for (std::size_t k = cell_start_[c]; k < cell_start_[c + 1]; ++k) {
                    const std::size_t j = sorted_ids_[k];
                    const Vector2<Scalar> dx = minimum_image<Scalar>(positions_[j] - point, domain_);
                    const Scalar d2 = dx.squaredNorm();
                    if (d2 <= r2) f(j, dx, d2);
                }
            }
        }
    }

    std::vector<Neighbor<Scalar>> query(const Vector2<Scalar>& point, Scalar radius) const {
        std::vector<Neighbor<Scalar>> out;
        for_each_neighbor(point, radius, [&](std::size_t j, const Vector2<Scalar>& dx, Scalar d2) {
            out.push_back({j, dx, std::sqrt(d2)});
        });
        return out;
    }

private:
    long cell_coord(const Vector2<Scalar>& x, int a) const {
        const auto c = static_cast<long>(std::floor((x[a] - domain_.min[a]) / side_[a]));
        return std::clamp(c, 0L, cells_[a] - 1);
    }

    std::size_t flat(long cx, long cy) const { return static_cast<std::size_t>(cy * cells_[0] + cx); }

    // Contiguous run of cell coordinates along one axis, wrapped when periodic.
    struct AxisRange {
        long first = 0;
        long count = 0;
        bool wrap = false;

        long at(long k, long n) const {
            const long c = first + k;
            return wrap ? ((c % n) + n) % n : c;
        }
    };

    AxisRange axis_range(const Vector2<Scalar>& point, Scalar radius, int a) const {
        const long n = cells_[a];
        const long ring = static_cast<long>(std::ceil(radius / side_[a]));
        if (domain_.periodic[a]) {
            if (2 * ring + 1 >= n) return {0, n, false};
            return {cell_coord(point, a) - ring, 2 * ring + 1, true};
        }
        const long centre = cell_coord(point, a);
        const long lo = std::max(0L, centre - ring);
        const long hi = std::min(n - 1, centre + ring);
        return {lo, std::max(0L, hi - lo + 1), false};
    }

    Domain<Scalar> domain_;
    std::array<long, 2> cells_{};
    Vector2<Scalar> side_;
    std::vector<Vector2<Scalar>> positions_;
    std::vector<std::size_t> cell_of_;
    std::vector<std::size_t> cell_start_;
    std::vector<std::size_t> sorted_ids_;
};

template <typename Scalar>
CellIndex<Scalar> build(const Population<Scalar>& pop, const Domain<Scalar>& domain, Scalar cell_side) {
    CellIndex<Scalar> index(domain, cell_side);
    const auto positions = pop.positions();
    index.rebuild(positions);
    return index;
}

template <typename Scalar>
std::vector<Neighbor<Scalar>> query(const CellIndex<Scalar>& index, const Vector2<Scalar>& point,
                                    Scalar radius) {
    return index.query(point, radius);
}

}  // namespace chemo
