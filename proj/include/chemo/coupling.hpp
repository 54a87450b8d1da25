#pragma once

#include "chemo/core.hpp"
#include "chemo/field.hpp"
#include "chemo/particles.hpp"
#include "chemo/spatial_index.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace chemo {

enum class KernelKind { Gaussian, CloudInCell };

template <typename Scalar>
struct Kernel {
    KernelKind kind = KernelKind::Gaussian;
    /// Gaussian bandwidth.
    Scalar h = Scalar(0.02);
    /// Gaussian truncation radius; 3h keeps 1 - exp(-4.5) ~ 98.9% of the mass.
    Scalar cutoff = Scalar(0.06);

    static Kernel gaussian(Scalar h, Scalar cutoff_in_bandwidths = 3) {
        return {KernelKind::Gaussian, h, cutoff_in_bandwidths * h};
    }
    static Kernel cloud_in_cell() { return {KernelKind::CloudInCell, 0, 0}; }
};

/// K_h(x) = exp(-|x|^2 / 2h^2) / (2 pi h^2), evaluated from |x|^2.
template <typename Scalar>
Scalar gaussian_kernel(Scalar r2, Scalar h) {
    return std::exp(-r2 / (2 * h * h)) / (2 * std::numbers::pi_v<Scalar> * h * h);
}

/// The four grid nodes around a point and their bilinear weights (sum 1).
template <typename Scalar>
struct BilinearStencil {
    std::array<long, 4> nodes;
    std::array<Scalar, 4> weights;
    bool clamped = false;
};

namespace detail {

template <typename Scalar>
void locate_axis(const Grid<Scalar>& grid, Scalar x, Scalar lo, long& i0, long& i1, Scalar& frac, bool& clamped) {
    const long n = grid.n();
    const Scalar s = (x - lo) / grid.spacing();
    if (grid.periodic()) {
        const Scalar fl = std::floor(s);
        frac = s - fl;
        i0 = ((static_cast<long>(fl) % n) + n) % n;
        i1 = (i0 + 1) % n;
        return;
    }
    Scalar sc = s;
    if (sc < 0 || sc > Scalar(n - 1)) {
        clamped = true;
        sc = std::clamp(sc, Scalar(0), Scalar(n - 1));
    }
    i0 = std::min(static_cast<long>(std::floor(sc)), n - 2);
    i1 = i0 + 1;
    frac = sc - Scalar(i0);
}

}  // namespace detail

template <typename Scalar>
BilinearStencil<Scalar> bilinear_stencil(const Grid<Scalar>& grid, const Vector2<Scalar>& point) {
    long i0, i1, j0, j1;
    Scalar fx, fy;
    BilinearStencil<Scalar> s;
    detail::locate_axis(grid, point[0], grid.min()[0], i0, i1, fx, s.clamped);
    detail::locate_axis(grid, point[1], grid.min()[1], j0, j1, fy, s.clamped);
    s.nodes = {grid.index(i0, j0), grid.index(i1, j0), grid.index(i0, j1), grid.index(i1, j1)};
    s.weights = {(1 - fx) * (1 - fy), fx * (1 - fy), (1 - fx) * fy, fx * fy};
    return s;
}

namespace detail {

// Node indices (unwrapped) whose coordinate lies within `reach` of x along
// one axis; offsets are node - x.
template <typename Scalar>
void kernel_axis(const Grid<Scalar>& grid, Scalar x, Scalar lo, Scalar reach, std::vector<long>& nodes,
                 std::vector<Scalar>& offsets) {
    nodes.clear();
    offsets.clear();
    const long n = grid.n();
    const Scalar h = grid.spacing();
    long first = static_cast<long>(std::ceil((x - lo - reach) / h));
    long last = static_cast<long>(std::floor((x - lo + reach) / h));
    if (grid.periodic()) {
        if (last - first + 1 >= n) {
            // every node once, at its nearest image
            for (long i = 0; i < n; ++i) {
                Scalar d = lo + Scalar(i) * h - x;
                const Scalar len = grid.length();
                if (d > len / 2) d -= len;
                if (d < -len / 2) d += len;
                nodes.push_back(i);
                offsets.push_back(d);
            }
            return;
        }
        for (long i = first; i <= last; ++i) {
            nodes.push_back(((i % n) + n) % n);
            offsets.push_back(lo + Scalar(i) * h - x);
        }
        return;
    }
    first = std::max(first, 0L);
    last = std::min(last, n - 1);
    for (long i = first; i <= last; ++i) {
        nodes.push_back(i);
        offsets.push_back(lo + Scalar(i) * h - x);
    }
}

}  // namespace detail

/// Density estimate of one species at every node. Gaussian: truncated kernel
/// sum scattered from each particle (no renormalisation near walls).
/// CloudInCell: unit mass per particle split bilinearly, divided by h^2.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> deposit(const Population<Scalar>& pop, const Grid<Scalar>& grid,
                                                 const Kernel<Scalar>& kernel, Species species) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> rho = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(grid.size());
    if (kernel.kind == KernelKind::CloudInCell) {
        const Scalar inv_area = 1 / (grid.spacing() * grid.spacing());
        for (const auto& p : pop) {
            if (p.species != species) continue;
            const auto s = bilinear_stencil(grid, p.position);
            for (int k = 0; k < 4; ++k) rho[s.nodes[k]] += s.weights[k] * inv_area;
        }
        return rho;
    }

    const Scalar cutoff2 = kernel.cutoff * kernel.cutoff;
    const Scalar norm = 1 / (2 * std::numbers::pi_v<Scalar> * kernel.h * kernel.h);
    const Scalar inv_2h2 = 1 / (2 * kernel.h * kernel.h);
    std::vector<long> ix, iy;
    std::vector<Scalar> ox, oy, gx, gy;
    for (const auto& p : pop) {
        if (p.species != species) continue;
        detail::kernel_axis(grid, p.position[0], grid.min()[0], kernel.cutoff, ix, ox);
        detail::kernel_axis(grid, p.position[1], grid.min()[1], kernel.cutoff, iy, oy);
        gx.resize(ox.size());
        gy.resize(oy.size());
        for (std::size_t a = 0; a < ox.size(); ++a) gx[a] = std::exp(-ox[a] * ox[a] * inv_2h2);
        for (std::size_t b = 0; b < oy.size(); ++b) gy[b] = std::exp(-oy[b] * oy[b] * inv_2h2);
        for (std::size_t b = 0; b < iy.size(); ++b) {
            for (std::size_t a = 0; a < ix.size(); ++a) {
                if (ox[a] * ox[a] + oy[b] * oy[b] > cutoff2) continue;
                rho[grid.index(ix[a], iy[b])] += norm * gx[a] * gy[b];
            }
        }
    }
    return rho;
}

/// Node-centric Gaussian deposit: one radius query per node against a cell
/// index of the species. Same sum as the scatter form, different order.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> deposit_gather(const Population<Scalar>& pop, const Grid<Scalar>& grid,
                                                        const Kernel<Scalar>& kernel, Species species,
                                                        const Domain<Scalar>& domain) {
    std::vector<Vector2<Scalar>> positions;
    for (const auto& p : pop)
        if (p.species == species) positions.push_back(p.position);
    CellIndex<Scalar> index(domain, kernel.cutoff);
    index.rebuild(positions);

    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> rho(grid.size());
    for (long l = 0; l < grid.size(); ++l) {
        Scalar sum = 0;
        index.for_each_neighbor(grid.node(l), kernel.cutoff,
                                [&](std::size_t, const Vector2<Scalar>&, Scalar d2) {
                                    sum += gaussian_kernel(d2, kernel.h);
                                });
        rho[l] = sum;
    }
    return rho;
}

template <typename Scalar>
struct PointValue {
    Scalar c;
    Vector2<Scalar> grad_c;
};

/// Bilinear interpolation of c and grad c. Points outside a Neumann grid are
/// clamped to its hull with a warning.
template <typename Scalar>
PointValue<Scalar> interpolate(const Field<Scalar>& field, const Grid<Scalar>& grid, const Vector2<Scalar>& point) {
    const auto s = bilinear_stencil(grid, point);
    if (s.clamped) warn_once("interpolation point outside the grid was clamped to its hull");
    PointValue<Scalar> out{0, Vector2<Scalar>::Zero()};
    for (int k = 0; k < 4; ++k) {
        out.c += s.weights[k] * field.c[s.nodes[k]];
        out.grad_c += s.weights[k] * field.grad_c.row(s.nodes[k]).transpose();
    }
    return out;
}

/// Caches c at every particle and chi * grad c as the drift of every Beta
/// particle (Alpha drift stays zero).
template <typename Scalar>
void refresh_particle_fields(Population<Scalar>& pop, const Field<Scalar>& field, const Grid<Scalar>& grid,
                             Scalar chi) {
    for (auto& p : pop) {
        const auto v = interpolate(field, grid, p.position);
        p.local_concentration = v.c;
        if (p.species == Species::Beta) {
            p.drift = chi * v.grad_c;
        } else {
            p.drift.setZero();
        }
    }
}

}  // namespace chemo
