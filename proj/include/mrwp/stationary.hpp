#pragma once

#include <array>

#include "mrwp/core.hpp"

namespace mrwp {

/// Stationary position density (3/L^3)(x+y) - (3/L^4)(x^2+y^2). Throws outside [0,L]^2.
double spatial_density(Point p, double L);

/// Maximum of spatial_density, attained at the center: 1.5 / L^2.
inline double spatial_density_max(double L) { return 1.5 / (L * L); }

/// Stationary mass of the cell [x0, x0+side] x [y0, y0+side] in closed form.
double cell_probability(Point sw_corner, double side, double L);

/// Destination masses on the four axis-parallel segments leaving the origin.
struct CrossProbabilities {
    double south = 0.0;
    double north = 0.0;
    double west = 0.0;
    double east = 0.0;

    double total() const { return south + north + west + east; }
};

/// Open quadrants around an origin, in the order SW, NE, NW, SE.
enum class Quadrant { SW = 0, NE = 1, NW = 2, SE = 3 };

/// Stationary law of the destination of an agent observed at `origin`.
struct DestinationLaw {
    Point origin;
    double L = 1.0;
    std::array<double, 4> quadrant_density{}; ///< per unit area, indexed by Quadrant
    CrossProbabilities cross;

    double quadrant_area(Quadrant q) const;
    double quadrant_mass(Quadrant q) const { return quadrant_density[static_cast<int>(q)] * quadrant_area(q); }
    double total_mass() const;
};

/// Throws std::invalid_argument for origins outside the square or on one of its four corners.
DestinationLaw destination_law(Point origin, double L);

/// Rejection sampling of the stationary position against a uniform proposal.
Point sample_stationary_position(RngStream& rng, double L);

struct DestinationSample {
    Point point;
    bool on_cross = false; ///< shares the x or the y coordinate with the origin
};

DestinationSample sample_destination_detailed(Point origin, RngStream& rng, double L);

inline Point sample_destination(Point origin, RngStream& rng, double L)
{
    return sample_destination_detailed(origin, rng, L).point;
}

} // namespace mrwp
