#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "mrwp/stationary.hpp"

using namespace mrwp;

namespace {

double density_oracle(double x, double y, double L)
{
    return 3.0 * (x + y) / (L * L * L) - 3.0 * (x * x + y * y) / (L * L * L * L);
}

double midpoint_quadrature(double x0, double y0, double side, double L, int k = 256)
{
    const double h = side / k;
    double sum = 0.0;
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            sum += density_oracle(x0 + (i + 0.5) * h, y0 + (j + 0.5) * h, L);
        }
    }
    return sum * h * h;
}

// The midpoint rule is exact for linear terms and under-counts each x^2 term by h^2/12 per unit area.
double midpoint_correction(double side, double L, int k = 256)
{
    const double h = side / k;
    return 2.0 * 3.0 / (L * L * L * L) * side * side * h * h / 12.0;
}

} // namespace

TEST_SUITE("stationary") {

TEST_CASE("spatial density values")
{
    CHECK(spatial_density({0.0, 0.0}, 7.0) == 0.0);
    CHECK(spatial_density({5.0, 5.0}, 10.0) == doctest::Approx(0.015).epsilon(1e-15));
    CHECK(spatial_density_max(10.0) == 0.015);
    CHECK_THROWS_AS(spatial_density({-0.1, 1.0}, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(spatial_density({1.0, 10.5}, 10.0), std::invalid_argument);

    RngStream rng(3);
    const double L = 4.0;
    for (int i = 0; i < 200; ++i) {
        const Point p{rng.uniform(0, L), rng.uniform(0, L)};
        const double f = spatial_density(p, L);
        CHECK(f >= 0.0);
        CHECK(f <= spatial_density_max(L) * (1 + 1e-15));
        CHECK(f == doctest::Approx(spatial_density({p.y, p.x}, L)).epsilon(1e-14));
        CHECK(f == doctest::Approx(spatial_density({L - p.x, L - p.y}, L)).epsilon(1e-12));
    }
}

TEST_CASE("cell probability closed form")
{
    for (double L : {1.0, 10.0, 44.72}) {
        CHECK(std::abs(cell_probability({0.0, 0.0}, L, L) - 1.0) < 1e-12);
        for (double ell : {0.1 * L, 0.37 * L}) {
            const double corner = ell * ell * ell * (3.0 * L - 2.0 * ell) / (L * L * L * L);
            CHECK(cell_probability({0.0, 0.0}, ell, L) == doctest::Approx(corner).epsilon(1e-14));
        }
    }
    CHECK_THROWS_AS(cell_probability({0.5, 0.5}, 0.6, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(cell_probability({-0.1, 0.0}, 0.2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(cell_probability({0.0, 0.0}, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("cell probability matches quadrature")
{
    RngStream rng(11);
    const double L = 20.0;
    for (int i = 0; i < 100; ++i) {
        const double side = rng.uniform(0.05, 0.5) * L;
        const double x0 = rng.uniform(0.0, L - side);
        const double y0 = rng.uniform(0.0, L - side);
        const double q = midpoint_quadrature(x0, y0, side, L) - midpoint_correction(side, L);
        const double c = cell_probability({x0, y0}, side, L);
        CHECK(std::abs(c - q) <= 1e-9 * c);
    }
}

TEST_CASE("cell probability grows toward the center")
{
    const double L = 10.0;
    const double ell = 1.0;
    double prev = -1.0;
    for (int k = 0; k <= 45; ++k) {
        const double t = k * 0.1;
        const double p = cell_probability({t, t}, ell, L);
        CHECK(p > prev);
        prev = p;
    }
}

TEST_CASE("destination law at the center")
{
    const double L = 3.0;
    const DestinationLaw law = destination_law({L / 2, L / 2}, L);
    CHECK(law.cross.south == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(law.cross.north == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(law.cross.west == doctest::Approx(0.125).epsilon(1e-15));
    CHECK(law.cross.east == doctest::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("destination law identities at random origins")
{
    RngStream rng(5);
    const double L = 17.0;
    for (int i = 0; i < 1000; ++i) {
        const Point o{rng.uniform(0, L), rng.uniform(0, L)};
        const DestinationLaw law = destination_law(o, L);
        CHECK(law.cross.south == law.cross.north);
        CHECK(law.cross.west == law.cross.east);
        CHECK(std::abs(law.cross.total() - 0.5) < 1e-12);
        CHECK(std::abs(law.total_mass() - 1.0) < 1e-9);
        for (double d : law.quadrant_density) {
            CHECK(d >= 0.0);
        }
    }
}

TEST_CASE("destination law rejects corners and outside points")
{
    const double L = 2.0;
    for (Point c : {Point{0, 0}, Point{L, L}, Point{0, L}, Point{L, 0}}) {
        CHECK_THROWS_AS(destination_law(c, L), std::invalid_argument);
    }
    CHECK_THROWS_AS(destination_law({-1.0, 1.0}, L), std::invalid_argument);
    CHECK_NOTHROW(destination_law({1e-9, 1e-9}, L));
    CHECK_NOTHROW(destination_law({0.0, 1.0}, L));
}

TEST_CASE("stationary sampler matches cell masses and moments")
{
    RngStream rng(21);
    const double L = 1.0;
    constexpr int N = 400'000;
    int in_corner = 0;
    double sum_x2 = 0.0;
    for (int i = 0; i < N; ++i) {
        const Point p = sample_stationary_position(rng, L);
        REQUIRE(inside_square(p, L));
        in_corner += (p.x < 0.25 && p.y < 0.25) ? 1 : 0;
        sum_x2 += p.x * p.x;
    }
    const double pc = cell_probability({0, 0}, 0.25, L);
    CHECK(std::abs(in_corner / double(N) - pc) < 3.0 * std::sqrt(pc * (1 - pc) / N));

    // E[x^2] and E[x^4] by quadrature
    const int k = 400;
    const double h = L / k;
    double m2 = 0.0;
    double m4 = 0.0;
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            const double x = (i + 0.5) * h;
            const double f = density_oracle(x, (j + 0.5) * h, L) * h * h;
            m2 += x * x * f;
            m4 += x * x * x * x * f;
        }
    }
    const double se = std::sqrt((m4 - m2 * m2) / N);
    CHECK(std::abs(sum_x2 / N - m2) < 3.0 * se);
}

TEST_CASE("destination sampler frequencies")
{
    RngStream rng(8);
    const double L = 1.0;
    constexpr int N = 200'000;

    int on_cross = 0;
    for (int i = 0; i < N; ++i) {
        const DestinationSample d = sample_destination_detailed({0.5, 0.5}, rng, L);
        on_cross += d.on_cross ? 1 : 0;
        REQUIRE(inside_square(d.point, L));
        REQUIRE(d.on_cross == (d.point.x == 0.5 || d.point.y == 0.5));
    }
    CHECK(std::abs(on_cross / double(N) - 0.5) < 3.0 * std::sqrt(0.25 / N));

    const Point o{0.2, 0.7};
    const DestinationLaw law = destination_law(o, L);
    int hits[4] = {};
    for (int i = 0; i < N; ++i) {
        const Point d = sample_destination(o, rng, L);
        if (d.x == o.x || d.y == o.y) {
            continue;
        }
        const bool west = d.x < o.x;
        const bool south = d.y < o.y;
        const Quadrant q = west ? (south ? Quadrant::SW : Quadrant::NW) : (south ? Quadrant::SE : Quadrant::NE);
        ++hits[static_cast<int>(q)];
    }
    for (int q = 0; q < 4; ++q) {
        const double p = law.quadrant_mass(static_cast<Quadrant>(q));
        CHECK(std::abs(hits[q] / double(N) - p) < 3.0 * std::sqrt(p * (1 - p) / N) + 1e-12);
    }

    const double eps = L / 1e6;
    const DestinationLaw near = destination_law({eps, eps}, L);
    CHECK(near.quadrant_mass(Quadrant::SW) < 1e-5);
}

}
