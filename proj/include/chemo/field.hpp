#pragma once

#include "chemo/core.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

namespace chemo {

enum class FieldBoundary { Neumann, Periodic };

/// Node-centred square grid. Neumann grids include both boundary lines
/// (spacing L / (n - 1)); periodic grids cover the half-open fundamental
/// cell (spacing L / n). Node (i, j) sits at min + (i, j) * spacing and is
/// stored at l = j * n + i.
template <typename Scalar>
class Grid {
public:
    Grid(long n, Vector2<Scalar> min, Scalar length, FieldBoundary boundary)
        : n_(n), min_(std::move(min)), length_(length), boundary_(boundary) {
        if (n < 3) throw std::invalid_argument("grid needs at least 3 nodes per axis");
        if (!(length > 0)) throw std::invalid_argument("grid length must be positive");
        spacing_ = boundary == FieldBoundary::Neumann ? length / Scalar(n - 1) : length / Scalar(n);
    }

    long n() const { return n_; }
    long size() const { return n_ * n_; }
    Scalar spacing() const { return spacing_; }
    Scalar length() const { return length_; }
    const Vector2<Scalar>& min() const { return min_; }
    FieldBoundary boundary() const { return boundary_; }
    bool periodic() const { return boundary_ == FieldBoundary::Periodic; }

    long index(long i, long j) const { return j * n_ + i; }

    Vector2<Scalar> node(long i, long j) const {
        return min_ + spacing_ * Vector2<Scalar>(Scalar(i), Scalar(j));
    }

    Vector2<Scalar> node(long l) const { return node(l % n_, l / n_); }

    /// Trapezoid quadrature weights (area per node).
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> quadrature_weights() const {
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w(size());
        for (long j = 0; j < n_; ++j) {
            for (long i = 0; i < n_; ++i) {
                Scalar wx = 1, wy = 1;
                if (!periodic()) {
                    if (i == 0 || i == n_ - 1) wx = Scalar(0.5);
                    if (j == 0 || j == n_ - 1) wy = Scalar(0.5);
                }
                w[index(i, j)] = wx * wy * spacing_ * spacing_;
            }
        }
        return w;
    }

    /// Samples f(x, y) at every node.
    template <typename F>
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> sample(F&& f) const {
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v(size());
        for (long l = 0; l < size(); ++l) {
            const Vector2<Scalar> p = node(l);
            v[l] = f(p[0], p[1]);
        }
        return v;
    }

private:
    long n_;
    Vector2<Scalar> min_;
    Scalar length_;
    FieldBoundary boundary_;
    Scalar spacing_;
};

template <typename Scalar>
struct Field {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Gradient = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>;

    Vector c;
    Gradient grad_c;
    Vector rho_alpha;
    Vector rho_beta;

    explicit Field(long n_nodes)
        : c(Vector::Zero(n_nodes)),
          grad_c(Gradient::Zero(n_nodes, 2)),
          rho_alpha(Vector::Zero(n_nodes)),
          rho_beta(Vector::Zero(n_nodes)) {}
};

template <typename Scalar>
struct FieldParams {
    Scalar D_c = Scalar(1);
    Scalar k_alpha = Scalar(0.1);
    Scalar k_beta = Scalar(0.03);
    Scalar gamma = Scalar(0);

    bool frozen() const { return D_c == 0 && k_alpha == 0 && k_beta == 0 && gamma == 0; }
};

template <typename Scalar>
void validate(const FieldParams<Scalar>& p) {
    if (!(p.D_c >= 0) || !(p.k_alpha >= 0) || !(p.k_beta >= 0) || !(p.gamma >= 0))
        throw std::invalid_argument("field parameters must be >= 0");
}

/// Finite-difference operators on a grid plus the factorised implicit
/// diffusion system. The Neumann Laplacian is symmetric only under the
/// trapezoid inner product, so the system is stored as W (I - dt D_c L)
/// with W the quadrature weights over h^2, which is symmetric positive
/// definite.
template <typename Scalar>
struct Operators {
    using Sparse = Eigen::SparseMatrix<Scalar>;

    Sparse laplacian;
    Sparse d1x;
    Sparse d1y;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> weights;
    Sparse system;
    std::shared_ptr<Eigen::SimplicialLDLT<Sparse>> solver;
};

namespace detail {

// 1-D second-difference stencil entries for node i: (neighbour, weight) with
// Neumann closure through a reflected ghost node.
template <typename Scalar>
void second_difference(long i, long n, bool periodic, Scalar inv_h2, std::vector<std::pair<long, Scalar>>& out) {
    out.clear();
    out.emplace_back(i, -2 * inv_h2);
    if (periodic) {
        out.emplace_back((i + n - 1) % n, inv_h2);
        out.emplace_back((i + 1) % n, inv_h2);
    } else if (i == 0) {
        out.emplace_back(1, 2 * inv_h2);
    } else if (i == n - 1) {
        out.emplace_back(n - 2, 2 * inv_h2);
    } else {
        out.emplace_back(i - 1, inv_h2);
        out.emplace_back(i + 1, inv_h2);
    }
}

// Centred first difference; one-sided second order on Neumann edges.
template <typename Scalar>
void first_difference(long i, long n, bool periodic, Scalar h, std::vector<std::pair<long, Scalar>>& out) {
    out.clear();
    const Scalar inv = 1 / (2 * h);
    if (periodic) {
        out.emplace_back((i + n - 1) % n, -inv);
        out.emplace_back((i + 1) % n, inv);
    } else if (i == 0) {
        out.emplace_back(0, -3 * inv);
        out.emplace_back(1, 4 * inv);
        out.emplace_back(2, -inv);
    } else if (i == n - 1) {
        out.emplace_back(n - 1, 3 * inv);
        out.emplace_back(n - 2, -4 * inv);
        out.emplace_back(n - 3, inv);
    } else {
        out.emplace_back(i - 1, -inv);
        out.emplace_back(i + 1, inv);
    }
}

}  // namespace detail

template <typename Scalar>
Operators<Scalar> build_operators(const Grid<Scalar>& grid, const FieldParams<Scalar>& params, Scalar dt) {
    using Triplet = Eigen::Triplet<Scalar>;
    const long n = grid.n();
    const long size = grid.size();
    const Scalar h = grid.spacing();
    const Scalar inv_h2 = 1 / (h * h);
    const bool periodic = grid.periodic();

    std::vector<Triplet> lap, dx, dy;
    std::vector<std::pair<long, Scalar>> stencil;
    for (long j = 0; j < n; ++j) {
        for (long i = 0; i < n; ++i) {
            const long row = grid.index(i, j);
            detail::second_difference(i, n, periodic, inv_h2, stencil);
            for (auto [ii, w] : stencil) lap.emplace_back(row, grid.index(ii, j), w);
            detail::second_difference(j, n, periodic, inv_h2, stencil);
            for (auto [jj, w] : stencil) lap.emplace_back(row, grid.index(i, jj), w);

            detail::first_difference(i, n, periodic, h, stencil);
            for (auto [ii, w] : stencil) dx.emplace_back(row, grid.index(ii, j), w);
            detail::first_difference(j, n, periodic, h, stencil);
            for (auto [jj, w] : stencil) dy.emplace_back(row, grid.index(i, jj), w);
        }
    }

    Operators<Scalar> ops;
    ops.laplacian.resize(size, size);
    ops.laplacian.setFromTriplets(lap.begin(), lap.end());
    ops.d1x.resize(size, size);
    ops.d1x.setFromTriplets(dx.begin(), dx.end());
    ops.d1y.resize(size, size);
    ops.d1y.setFromTriplets(dy.begin(), dy.end());

    ops.weights = grid.quadrature_weights() * inv_h2;
    typename Operators<Scalar>::Sparse identity(size, size);
    identity.setIdentity();
    ops.system = ops.weights.asDiagonal() * (identity - (dt * params.D_c) * ops.laplacian);
    ops.system.makeCompressed();

    ops.solver = std::make_shared<Eigen::SimplicialLDLT<typename Operators<Scalar>::Sparse>>();
    ops.solver->compute(ops.system);
    if (ops.solver->info() != Eigen::Success) throw SimulationError("implicit diffusion system is singular");
    return ops;
}

/// Implicit diffusion, explicit sources:
/// (I - dt D_c L) c' = c + dt (k_alpha rho_alpha - k_beta rho_beta c - gamma c).
template <typename Scalar>
void step_field(Field<Scalar>& field, const Operators<Scalar>& ops, const FieldParams<Scalar>& params, Scalar dt) {
    using Vector = typename Field<Scalar>::Vector;
    const Vector rhs = field.c + dt * (params.k_alpha * field.rho_alpha -
                                       params.k_beta * field.rho_beta.cwiseProduct(field.c) - params.gamma * field.c);
    // Solved for the increment so near-stationary fields do not pick up
    // factorisation round-off.
    const Vector residual = ops.weights.cwiseProduct(rhs) - ops.system * field.c;
    Vector next = field.c + ops.solver->solve(residual);
    if (ops.solver->info() != Eigen::Success || !next.allFinite())
        throw SimulationError("chemical field solve failed");
    field.c = std::move(next);

    if (field.c.cwiseMin(Scalar(0)).sum() < Scalar(-1e-12))
        warn_once("chemical concentration went negative; reduce dt or k_beta");
}

template <typename Scalar>
void gradient(Field<Scalar>& field, const Operators<Scalar>& ops) {
    field.grad_c.col(0) = ops.d1x * field.c;
    field.grad_c.col(1) = ops.d1y * field.c;
}

}  // namespace chemo
