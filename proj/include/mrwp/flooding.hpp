#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "mrwp/core.hpp"
#include "mrwp/mobility.hpp"
#include "mrwp/zones.hpp"

namespace mrwp {

/**
 * Uniform bucket grid for fixed-radius queries.
 *
 * Buckets have side >= radius, so a query of radius r <= radius() only
 * inspects the 3x3 block around the query point. Distances are compared
 * squared and the ball is closed.
 */
class NeighborIndex {
public:
    /// Indexes positions[i] for every i with include[i] != 0 (all of them when include is empty).
    NeighborIndex(std::span<const Point> positions, double radius, double L, std::span<const std::uint8_t> include = {});

    double radius() const { return radius_; }
    std::size_t indexed() const { return ids_.size(); }

    /// Calls fn(id, point) for every indexed agent within r of q until fn returns true.
    template <class Fn>
    bool any_within(Point q, double r, Fn&& fn) const;

    /// Indexed agents within r of q, in ascending id order.
    std::vector<int> query(Point q, double r) const;

private:
    int bucket_coord(double x) const;

    double radius_ = 0.0;
    double side_ = 0.0;
    int buckets_ = 1;
    std::vector<int> start_; ///< CSR offsets, buckets_^2 + 1 entries
    std::vector<int> ids_;
    std::vector<Point> points_;
};

NeighborIndex build_index(std::span<const Point> positions, double R, double L);

/// Informed agents plus step bookkeeping.
struct FloodState {
    std::vector<std::uint8_t> informed;
    std::int64_t informed_count = 0;
    std::int64_t step = 0;
    std::int64_t source = -1;

    static FloodState start(std::size_t n, std::int64_t source);
    bool complete() const { return informed_count == static_cast<std::int64_t>(informed.size()); }
};

/**
 * One synchronous exchange round: an uninformed agent becomes informed iff an
 * agent informed at the start of the round lies within R. The index may cover
 * all agents or only the informed ones; candidates are filtered either way.
 */
FloodState flood_step(const FloodState& state, std::span<const Point> positions, const NeighborIndex& index, double R,
                      unsigned threads = 1);

/// Q_t: central cells whose every current occupant is informed (empty cells qualify).
CellSet informed_cells(const FloodState& state, std::span<const Point> positions, const ZoneMap& z);

/// Unordered pairs (i < j) within (3/4) R, sorted.
std::vector<std::pair<int, int>> detect_meetings(std::span<const Point> positions, double R, double L);

/// Core occupancy needed by the density condition: at least eta log n agents, and at least one.
double core_occupancy_requirement(double eta, std::int64_t n);

struct DensityReport {
    std::int64_t violations = 0; ///< (step, central cell) pairs below eta log n
    std::int64_t steps_checked = 0;
    std::int64_t min_core_count = -1;
};

/// Steps a copy of the population through t = 0..horizon, counting cores below eta log n.
DensityReport density_monitor(Population population, const ZoneMap& z, double eta, std::int64_t horizon,
                              unsigned threads = 1);

enum class SourceRule { Random, InCentralZone, InSuburb };

std::string_view to_string(SourceRule r);

struct ProgressRow {
    std::int64_t step = 0;
    std::int64_t informed_count = 0;
    std::int64_t cz_cells_informed = 0;
    std::int64_t suburb_informed_count = 0;
};

struct ViolationCounters {
    std::int64_t frontier = 0;          ///< T < (d_far - R) / (R + 2v)
    std::int64_t stability = 0;         ///< informed central cell with an occupied core failed to keep itself and its neighbors
    std::int64_t stability_checks = 0;
};

struct BoundConstants {
    double a = 18.0;
    double b = 600.0;
};

struct RunRecord {
    WorldParams params;
    InitMode init;
    SourceRule source_rule = SourceRule::Random;
    std::int64_t source = -1;
    std::int64_t max_steps = 0;
    std::int64_t steps_run = 0;
    bool timed_out = false;
    std::optional<std::int64_t> flooding_time;
    std::optional<std::int64_t> cz_spread_time;
    BoundConstants constants;
    std::optional<double> theoretical_bound;
    AssumptionReport assumptions;
    bool zones_available = false;
    double d_far = 0.0;
    double frontier_bound = 0.0;
    ViolationCounters violations;
    std::optional<std::int64_t> watched_first_informed; ///< earliest step any watched agent got informed
    double wall_seconds = 0.0;
    std::string_view rng_algorithm = RngStream::algorithm_id;
    std::vector<ProgressRow> progress;
};

struct FloodOptions {
    std::optional<std::int64_t> max_steps; ///< unset selects the default envelope
    BoundConstants constants;
    unsigned threads = 1;
    bool record_progress = true;
    bool track_zones = true; ///< off skips Q_t, T_c, the stability check and the bound
    std::vector<std::int64_t> watch; ///< agents whose first informed step is reported
};

/// 100 (18 L/R + 600 S/v) when the assumptions hold and the bound is finite, else 10^7.
std::int64_t default_max_steps(const WorldParams& p);

/// Move, re-index, exchange; repeated until every agent is informed or max_steps is reached.
RunRecord run_flood(const WorldParams& p, InitMode init, SourceRule source_rule, const FloodOptions& options = {});

/// Same, starting from a prepared population and a fixed source agent.
RunRecord run_flood_from(Population population, std::int64_t source, const FloodOptions& options = {});

template <class Fn>
bool NeighborIndex::any_within(Point q, double r, Fn&& fn) const
{
    if (r > radius_) {
        throw std::invalid_argument("NeighborIndex: query radius exceeds the indexed radius");
    }
    const double r2 = r * r;
    const int bx = bucket_coord(q.x);
    const int by = bucket_coord(q.y);
    for (int yy = std::max(0, by - 1); yy <= std::min(buckets_ - 1, by + 1); ++yy) {
        for (int xx = std::max(0, bx - 1); xx <= std::min(buckets_ - 1, bx + 1); ++xx) {
            const int b = yy * buckets_ + xx;
            for (int k = start_[static_cast<std::size_t>(b)]; k < start_[static_cast<std::size_t>(b) + 1]; ++k) {
                const Point p = points_[static_cast<std::size_t>(k)];
                const double dx = p.x - q.x;
                const double dy = p.y - q.y;
                if (dx * dx + dy * dy <= r2 && fn(ids_[static_cast<std::size_t>(k)], p)) {
                    return true;
                }
            }
        }
    }
    return false;
}

} // namespace mrwp
