#include "mrwp/stationary.hpp"

#include <stdexcept>

namespace mrwp {

double spatial_density(Point p, double L)
{
    if (!inside_square(p, L)) {
        throw std::invalid_argument("spatial_density: point outside the square");
    }
    const double L3 = L * L * L;
    const double L4 = L3 * L;
    return 3.0 / L3 * (p.x + p.y) - 3.0 / L4 * (p.x * p.x + p.y * p.y);
}

double cell_probability(Point sw, double side, double L)
{
    const double slack = 1e-12 * L; // absorbs rounding in x0 + side for cells tiling the square
    if (!(side > 0.0) || sw.x < 0.0 || sw.y < 0.0 || sw.x + side > L + slack || sw.y + side > L + slack) {
        throw std::invalid_argument("cell_probability: cell extends outside the square");
    }
    const double L4 = L * L * L * L;
    const double inner = side / 3.0 * (3.0 * L - 2.0 * side) + sw.x * (L - side - sw.x) + sw.y * (L - side - sw.y);
    return 3.0 * side * side / L4 * inner;
}

double DestinationLaw::quadrant_area(Quadrant q) const
{
    const double x0 = origin.x;
    const double y0 = origin.y;
    switch (q) {
    case Quadrant::SW: return x0 * y0;
    case Quadrant::NE: return (L - x0) * (L - y0);
    case Quadrant::NW: return x0 * (L - y0);
    case Quadrant::SE: return (L - x0) * y0;
    }
    return 0.0;
}

double DestinationLaw::total_mass() const
{
    double total = cross.total();
    for (int q = 0; q < 4; ++q) {
        total += quadrant_mass(static_cast<Quadrant>(q));
    }
    return total;
}

DestinationLaw destination_law(Point origin, double L)
{
    if (!inside_square(origin, L)) {
        throw std::invalid_argument("destination_law: origin outside the square");
    }
    const double x0 = origin.x;
    const double y0 = origin.y;
    // x0(L-x0) + y0(L-y0) vanishes exactly on the four corners.
    const double g = L * (x0 + y0) - (x0 * x0 + y0 * y0);
    if (!(g > 0.0)) {
        throw std::invalid_argument("destination_law: degenerate origin on a corner of the square");
    }
    const double denom = 4.0 * L * g;

    DestinationLaw law;
    law.origin = origin;
    law.L = L;
    law.quadrant_density[static_cast<int>(Quadrant::SW)] = (2.0 * L - x0 - y0) / denom;
    law.quadrant_density[static_cast<int>(Quadrant::NE)] = (x0 + y0) / denom;
    law.quadrant_density[static_cast<int>(Quadrant::NW)] = (L - x0 + y0) / denom;
    law.quadrant_density[static_cast<int>(Quadrant::SE)] = (L + x0 - y0) / denom;

    const double cross_denom = 4.0 * g;
    law.cross.south = y0 * (L - y0) / cross_denom;
    law.cross.north = law.cross.south;
    law.cross.west = x0 * (L - x0) / cross_denom;
    law.cross.east = law.cross.west;
    return law;
}

Point sample_stationary_position(RngStream& rng, double L)
{
    const double fmax = spatial_density_max(L);
    for (int i = 0; i < 1'000'000; ++i) {
        const Point p{rng.uniform(0.0, L), rng.uniform(0.0, L)};
        if (rng.uniform() * fmax < spatial_density(p, L)) {
            return p;
        }
    }
    throw std::runtime_error("sample_stationary_position: rejection cap exceeded");
}

DestinationSample sample_destination_detailed(Point origin, RngStream& rng, double L)
{
    const DestinationLaw law = destination_law(origin, L);
    const double x0 = origin.x;
    const double y0 = origin.y;

    double u = rng.uniform() * law.total_mass();
    const CrossProbabilities& c = law.cross;
    if (u < c.total()) {
        const double t = rng.uniform();
        if (u < c.south) {
            return {{x0, t * y0}, true};
        }
        u -= c.south;
        if (u < c.north) {
            return {{x0, L - t * (L - y0)}, true};
        }
        u -= c.north;
        if (u < c.west) {
            return {{t * x0, y0}, true};
        }
        return {{L - t * (L - x0), y0}, true};
    }
    u -= c.total();

    int q = 0;
    for (; q < 3; ++q) {
        const double mass = law.quadrant_mass(static_cast<Quadrant>(q));
        if (u < mass) {
            break;
        }
        u -= mass;
    }
    // Corners of each quadrant box, then a uniform point inside it.
    double xlo = 0.0, xhi = x0, ylo = 0.0, yhi = y0;
    switch (static_cast<Quadrant>(q)) {
    case Quadrant::SW: break;
    case Quadrant::NE: xlo = x0, xhi = L, ylo = y0, yhi = L; break;
    case Quadrant::NW: xlo = 0.0, xhi = x0, ylo = y0, yhi = L; break;
    case Quadrant::SE: xlo = x0, xhi = L, ylo = 0.0, yhi = y0; break;
    }
    Point p{rng.uniform(xlo, xhi), rng.uniform(ylo, yhi)};
    // Zero-width boxes (origin on an edge) collapse onto the cross; keep the tag honest.
    return {p, p.x == x0 || p.y == y0};
}

} // namespace mrwp
