#pragma once

#include <cstdint>
#include <vector>

#include "mrwp/core.hpp"

namespace mrwp {

enum class CellLabel : std::uint8_t { Central, Suburb };

struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

    bool contains(Point p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
};

/**
 * The m x m cell grid over the square, with the Central Zone / Suburb split.
 *
 * Cells are addressed by (row, col) with row along y and col along x; the flat
 * id is row * m + col. A cell is central iff its stationary mass is at least
 * (3/8) log n / n.
 */
class ZoneMap {
public:
    ZoneMap() = default;
    ZoneMap(int m, double L, std::int64_t n, std::vector<CellLabel> labels, std::vector<double> probabilities);

    int m() const { return m_; }
    double ell() const { return ell_; }
    double L() const { return L_; }
    std::int64_t n() const { return n_; }
    int cell_count() const { return m_ * m_; }
    int id(int row, int col) const { return row * m_ + col; }
    int row_of(int id) const { return id / m_; }
    int col_of(int id) const { return id % m_; }

    CellLabel label(int id) const { return labels_[static_cast<std::size_t>(id)]; }
    bool is_central(int id) const { return label(id) == CellLabel::Central; }
    double probability(int id) const { return probabilities_[static_cast<std::size_t>(id)]; }
    bool in_extended_suburb(int id) const { return extended_[static_cast<std::size_t>(id)] != 0; }

    Point sw_corner(int id) const { return {col_of(id) * ell_, row_of(id) * ell_}; }
    Rect cell_rect(int id) const;
    /// Concentric subsquare of side ell/3.
    Rect core(int id) const;

    /// Cell containing p; cells are half-open except along the far edges.
    int cell_of(Point p) const;

    /// (3/2) L^3 log n / (ell^2 n).
    double S() const { return S_; }
    int cz_size() const { return cz_size_; }
    int suburb_size() const { return cell_count() - cz_size_; }

    /// 4-neighbors of a cell inside the grid.
    std::vector<int> neighbors(int id) const;

private:
    int m_ = 0;
    double L_ = 0.0;
    double ell_ = 0.0;
    std::int64_t n_ = 1;
    double S_ = 0.0;
    int cz_size_ = 0;
    std::vector<CellLabel> labels_;
    std::vector<double> probabilities_;
    std::vector<std::uint8_t> extended_;
};

/// Central-cell threshold (3/8) log n / n.
double central_threshold(std::int64_t n);

/// Suburb diameter bound (3/2) L^3 log n / (ell^2 n).
double suburb_diameter_bound(double L, double ell, std::int64_t n);

/**
 * m = ceil(sqrt(5) L / R) tiling cells. Throws std::invalid_argument when
 * R > sqrt(2) L or when the tiling side misses R/(1+sqrt 5) <= ell <= R/sqrt 5.
 */
ZoneMap build_zone_map(const WorldParams& p);

/// Membership over all m^2 cells; valid sets contain central cells only.
struct CellSet {
    std::vector<std::uint8_t> member;

    static CellSet empty(const ZoneMap& z) { return {std::vector<std::uint8_t>(static_cast<std::size_t>(z.cell_count()), 0)}; }
    static CellSet central_zone(const ZoneMap& z);

    bool contains(int id) const { return member[static_cast<std::size_t>(id)] != 0; }
    void insert(int id) { member[static_cast<std::size_t>(id)] = 1; }
    std::size_t size() const;
};

/// Central cells outside B that are 4-adjacent to B. Throws if B holds a suburb cell.
CellSet boundary(const CellSet& B, const ZoneMap& z);

struct RowColumnCounts {
    int rows = 0;    ///< rows containing at least one central cell
    int columns = 0; ///< columns containing at least one central cell
    double bound = 0.0; ///< m / sqrt 2

    bool ok() const { return rows >= bound && columns >= bound; }
};

RowColumnCounts cz_row_column_counts(const ZoneMap& z);

struct ExpansionViolation {
    std::vector<int> cells; ///< B as flat cell ids
    std::size_t boundary_size = 0;
    double required = 0.0;
};

struct ExpansionMode {
    enum class Kind { Exhaustive, Random };

    Kind kind = Kind::Exhaustive;
    std::int64_t samples = 0;
    std::uint64_t seed = 1;

    static ExpansionMode exhaustive() { return {Kind::Exhaustive, 0, 1}; }
    static ExpansionMode random(std::int64_t k, std::uint64_t seed = 1) { return {Kind::Random, k, seed}; }
};

struct ExpansionReport {
    std::int64_t subsets_checked = 0;
    std::int64_t violation_count = 0;
    std::vector<ExpansionViolation> violations; ///< first few violators only
};

/// Checks |boundary(B)| >= sqrt(min(|B|, |CZ| - |B|)). Exhaustive mode needs |CZ| <= 20.
ExpansionReport check_expansion(const ZoneMap& z, ExpansionMode mode);

struct SuburbViolation {
    int cell = -1;
    double x_extent = 0.0; ///< farthest x of the cell, measured from its nearest corner
    double y_extent = 0.0;
    double limit = 0.0;
};

/// Every suburb cell must lie within `limit` of its nearest corner along both axes.
std::vector<SuburbViolation> check_suburb_diameter(const ZoneMap& z, double limit);
inline std::vector<SuburbViolation> check_suburb_diameter(const ZoneMap& z) { return check_suburb_diameter(z, z.S()); }

} // namespace mrwp
