#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mrwp/core.hpp"

namespace mrwp {

enum class Leg : std::uint8_t { First, Second };
enum class Heading : std::uint8_t { North, South, East, West };

std::string_view to_string(Heading h);
std::string_view to_string(Leg leg);

/**
 * One agent on a Manhattan trip.
 *
 * The agent moves axis-parallel toward turn_point while on the first leg and
 * toward destination on the second leg. turn_point equals destination for
 * axis-aligned trips and once the second leg has started.
 */
struct AgentState {
    Point position;
    Point destination;
    Point turn_point;
    Leg leg = Leg::Second;
    Heading heading = Heading::East;
};

struct MotionEvent {
    enum class Kind : std::uint8_t { Turn, Arrival };

    Kind kind = Kind::Turn;
    double time = 0.0; ///< continuous time; step k covers (k-1, k]
    Point where;
    Heading before = Heading::East;
    Heading after = Heading::East;

    bool changes_direction() const { return before != after; }
};

/// Uniform destination, fair choice between vertical-first and horizontal-first paths.
AgentState new_trip(Point position, RngStream& rng, double L);

/// Trip toward a given destination along the chosen path; leg SECOND when axis-aligned.
AgentState trip_toward(Point position, Point destination, bool vertical_first);

/**
 * Advances one time step: exactly v of path length, rolling over through
 * waypoints and fresh trips. `step_index` is the index of the step being
 * taken; waypoints are appended to `events` when given.
 */
AgentState step(const AgentState& agent, RngStream& rng, const WorldParams& p, std::int64_t step_index = 1,
                std::vector<MotionEvent>* events = nullptr);

struct InitMode {
    enum class Kind { Warmup, ApproxStationary };

    Kind kind = Kind::Warmup;
    std::optional<std::int64_t> warmup_steps; ///< unset selects ceil(10 L / v)

    static InitMode warmup(std::optional<std::int64_t> steps = std::nullopt) { return {Kind::Warmup, steps}; }
    static InitMode approx_stationary() { return {Kind::ApproxStationary, std::nullopt}; }
};

std::string_view to_string(InitMode::Kind k);

/// ceil(10 L / v), or 1 when v == 0.
std::int64_t default_warmup_steps(const WorldParams& p);

/// Agents plus their private random streams.
class Population {
public:
    Population(const WorldParams& p, std::vector<AgentState> agents, std::vector<RngStream> streams);

    const WorldParams& params() const { return params_; }
    std::size_t size() const { return agents_.size(); }
    std::span<const AgentState> agents() const { return agents_; }
    std::span<const Point> positions() const { return positions_; }
    RngStream& stream(std::size_t i) { return streams_[i]; }

    /// Moves every agent by one step; results do not depend on `threads`.
    void advance(unsigned threads = 1);
    std::int64_t time() const { return time_; }

private:
    WorldParams params_;
    std::vector<AgentState> agents_;
    std::vector<RngStream> streams_;
    std::vector<Point> positions_;
    std::int64_t time_ = 0;
};

/// Agent i uses derive_substream(p.seed, i). Throws on a warm-up of zero steps.
Population init_population(const WorldParams& p, InitMode mode, unsigned threads = 1);

/// Approximately stationary agent: stationary position, stationary destination, fair heading.
AgentState approx_stationary_agent(RngStream& rng, double L);

/// Event log and integer-step positions of one agent.
struct Trajectory {
    double L = 1.0;
    double v = 0.0;
    std::int64_t first_step = 0;
    std::vector<Point> positions; ///< positions[k] is the position at first_step + k
    std::vector<MotionEvent> events;

    std::int64_t last_step() const { return first_step + static_cast<std::int64_t>(positions.size()) - 1; }
};

/// Steps a copy of `agent` for `steps` steps, logging every waypoint.
Trajectory record_trajectory(AgentState agent, RngStream& rng, const WorldParams& p, std::int64_t steps,
                             std::int64_t first_step = 0);

struct TurnWindowStats {
    std::int64_t agent = -1;
    std::int64_t t = 0;
    std::int64_t tau = 0;
    int turns = 0;
    double longest_good_segment = 0.0;
};

/// Turns and the longest inward axis-parallel run inside [t, t+tau]. Throws if the window leaves the log.
TurnWindowStats count_turns(const Trajectory& traj, std::int64_t t, std::int64_t tau);

/// 4 log n / log(L / (v tau)).
double turn_count_bound(std::int64_t n, double L, double v, double tau);

} // namespace mrwp
