#include "doctest.h"

#include "chemo/coupling.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace chemo;

namespace {

Grid<double> neumann(long n) { return Grid<double>(n, Vector2d(-0.5, -0.5), 1.0, FieldBoundary::Neumann); }
Grid<double> periodic(long n) { return Grid<double>(n, Vector2d(-0.5, -0.5), 1.0, FieldBoundary::Periodic); }

Population<double> population_at(const std::vector<Vector2d>& pts, Species s = Species::Alpha) {
    std::vector<Particle<double>> ps;
    for (const auto& x : pts) {
        Particle<double> p;
        p.id = ps.size();
        p.position = p.next_position = p.start_anchor = x;
        p.species = s;
        ps.push_back(p);
    }
    return Population<double>(std::move(ps));
}

}  // namespace

TEST_CASE("Gaussian kernel value at zero") {
    CHECK(gaussian_kernel(0.0, 0.02) == doctest::Approx(1 / (2 * std::numbers::pi * 0.0004)));
    CHECK(gaussian_kernel(0.0004, 0.02) == doctest::Approx(gaussian_kernel(0.0, 0.02) * 0.6065306597126334));
}

TEST_CASE("CIC deposit of a particle on a node") {
    const auto g = neumann(11);
    const auto pop = population_at({g.node(4, 6)});
    const auto rho = deposit(pop, g, Kernel<double>::cloud_in_cell(), Species::Alpha);
    CHECK(rho[g.index(4, 6)] == doctest::Approx(1 / (g.spacing() * g.spacing())));
    CHECK(rho.sum() == doctest::Approx(1 / (g.spacing() * g.spacing())));
}

TEST_CASE("CIC deposit conserves mass for interior particles") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-0.45, 0.45);
    const auto g = neumann(21);
    std::vector<Vector2d> pts;
    for (int i = 0; i < 300; ++i) pts.emplace_back(u(gen), u(gen));
    const auto rho = deposit(population_at(pts), g, Kernel<double>::cloud_in_cell(), Species::Alpha);
    CHECK(rho.sum() * g.spacing() * g.spacing() == doctest::Approx(300.0).epsilon(1e-12));
}

TEST_CASE("Gaussian deposit integrates to ~1 for an interior particle") {
    const auto pop = population_at({Vector2d(0.01, -0.02)});
    const auto coarse = neumann(52);
    const auto kernel = Kernel<double>::gaussian(0.02);
    const double m = coarse.quadrature_weights().dot(deposit(pop, coarse, kernel, Species::Alpha));
    CHECK(m == doctest::Approx(0.9888910034617577).epsilon(0.015));
    const auto fine = neumann(401);
    const double mf = fine.quadrature_weights().dot(deposit(pop, fine, kernel, Species::Alpha));
    CHECK(mf == doctest::Approx(0.9888910034617577).epsilon(0.002));
}

TEST_CASE("Gaussian scatter and gather agree") {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (bool per : {false, true}) {
        const auto d = Domain<double>::centered_square(1.0, per);
        const auto g = per ? periodic(40) : neumann(40);
        std::vector<Vector2d> pts;
        for (int i = 0; i < 200; ++i) pts.emplace_back(u(gen), u(gen));
        const auto pop = population_at(pts, Species::Beta);
        const auto kernel = Kernel<double>::gaussian(0.03);
        const auto a = deposit(pop, g, kernel, Species::Beta);
        const auto b = deposit_gather(pop, g, kernel, Species::Beta, d);
        CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-9 * a.cwiseAbs().maxCoeff());
        CHECK(deposit(pop, g, kernel, Species::Alpha).isZero(0.0));
    }
}

TEST_CASE("periodic deposit is translation covariant") {
    const auto g = periodic(20);
    const double h = g.spacing();
    const auto kernel = Kernel<double>::gaussian(0.04);
    const auto a = deposit(population_at({Vector2d(0.47, 0.01)}), g, kernel, Species::Alpha);
    const auto b = deposit(population_at({Vector2d(0.47 + 3 * h - 1.0, 0.01 + h)}), g, kernel, Species::Alpha);
    for (long j = 0; j < g.n(); ++j)
        for (long i = 0; i < g.n(); ++i)
            CHECK(b[g.index((i + 3) % g.n(), (j + 1) % g.n())] == doctest::Approx(a[g.index(i, j)]).epsilon(1e-9));
}

TEST_CASE("bilinear interpolation is exact for affine fields") {
    for (const auto& g : {neumann(13), periodic(13)}) {
        Field<double> f(g.size());
        f.c = g.sample([](double x, double y) { return 2 + 3 * x - y; });
        f.grad_c.col(0).setConstant(3);
        f.grad_c.col(1).setConstant(-1);
        std::mt19937_64 gen(1);
        std::uniform_real_distribution<double> u(-0.45, 0.45);
        for (int k = 0; k < 50; ++k) {
            const Vector2d p(u(gen), u(gen));
            if (g.periodic() && (p.array() > g.node(g.n() - 1, 0)[0]).any()) continue;
            const auto v = interpolate(f, g, p);
            CHECK(v.c == doctest::Approx(2 + 3 * p[0] - p[1]));
            CHECK(v.grad_c.isApprox(Vector2d(3, -1)));
        }
    }
}

TEST_CASE("interpolation at a cell centre averages the four corners") {
    const auto g = neumann(6);
    Field<double> f(g.size());
    f.c[g.index(1, 1)] = 1;
    f.c[g.index(2, 1)] = 2;
    f.c[g.index(1, 2)] = 3;
    f.c[g.index(2, 2)] = 6;
    const Vector2d centre = (g.node(1, 1) + g.node(2, 2)) / 2;
    CHECK(interpolate(f, g, centre).c == doctest::Approx(3.0));
    const auto s = bilinear_stencil(g, centre);
    CHECK(s.weights[0] + s.weights[1] + s.weights[2] + s.weights[3] == doctest::Approx(1.0));
}

TEST_CASE("drift of betas follows chi grad c; alphas have none") {
    const auto g = neumann(30);
    Field<double> f(g.size());
    f.c = g.sample([](double x, double) { return x; });
    const auto ops = build_operators(g, FieldParams<double>{}, 1e-3);
    gradient(f, ops);
    std::vector<Particle<double>> ps(2);
    ps[0].position = Vector2d(0.1, 0.2);
    ps[0].species = Species::Beta;
    ps[1].position = Vector2d(-0.3, 0.4);
    ps[1].species = Species::Alpha;
    Population<double> pop(std::move(ps));
    refresh_particle_fields(pop, f, g, 2.0);
    CHECK(pop[0].drift.isApprox(Vector2d(2, 0)));
    CHECK(pop[0].local_concentration == doctest::Approx(0.1));
    CHECK(pop[1].drift.isZero(0.0));
    CHECK(pop[1].local_concentration == doctest::Approx(-0.3));
}
