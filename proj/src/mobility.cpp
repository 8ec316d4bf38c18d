#include "mrwp/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mrwp/parallel.hpp"
#include "mrwp/stationary.hpp"

namespace mrwp {

namespace {

constexpr int kMaxRollovers = 10'000;

Heading direction(Point from, Point to)
{
    if (from.x == to.x) {
        return to.y > from.y ? Heading::North : Heading::South;
    }
    return to.x > from.x ? Heading::East : Heading::West;
}

Point move_along(Point p, Heading h, double d)
{
    switch (h) {
    case Heading::North: p.y += d; break;
    case Heading::South: p.y -= d; break;
    case Heading::East: p.x += d; break;
    case Heading::West: p.x -= d; break;
    }
    return p;
}

bool is_inward(Heading h, Point start, double L)
{
    const bool west_half = start.x <= 0.5 * L;
    const bool south_half = start.y <= 0.5 * L;
    switch (h) {
    case Heading::East: return west_half;
    case Heading::West: return !west_half;
    case Heading::North: return south_half;
    case Heading::South: return !south_half;
    }
    return false;
}

} // namespace

std::string_view to_string(Heading h)
{
    switch (h) {
    case Heading::North: return "N";
    case Heading::South: return "S";
    case Heading::East: return "E";
    case Heading::West: return "W";
    }
    return "?";
}

std::string_view to_string(Leg leg) { return leg == Leg::First ? "first" : "second"; }

std::string_view to_string(InitMode::Kind k) { return k == InitMode::Kind::Warmup ? "warmup" : "approx-stationary"; }

AgentState trip_toward(Point position, Point destination, bool vertical_first)
{
    AgentState a;
    a.position = position;
    a.destination = destination;
    if (position.x == destination.x || position.y == destination.y) {
        a.leg = Leg::Second;
        a.turn_point = destination;
        a.heading = direction(position, destination);
        return a;
    }
    a.leg = Leg::First;
    a.turn_point = vertical_first ? Point{position.x, destination.y} : Point{destination.x, position.y};
    a.heading = direction(position, a.turn_point);
    return a;
}

AgentState new_trip(Point position, RngStream& rng, double L)
{
    for (;;) {
        const Point dest{rng.uniform(0.0, L), rng.uniform(0.0, L)};
        const bool vertical_first = rng.coin();
        if (dest != position) {
            return trip_toward(position, dest, vertical_first);
        }
    }
}

AgentState step(const AgentState& agent, RngStream& rng, const WorldParams& p, std::int64_t step_index,
                std::vector<MotionEvent>* events)
{
    if (p.v == 0.0) {
        return agent;
    }
    AgentState a = agent;
    double remaining = p.v;
    for (int rollovers = 0;; ++rollovers) {
        if (rollovers > kMaxRollovers) {
            throw std::runtime_error("step: waypoint rollover cap exceeded (v too large for L)");
        }
        const Point target = a.leg == Leg::First ? a.turn_point : a.destination;
        const double dist = std::abs(target.x - a.position.x) + std::abs(target.y - a.position.y);
        if (dist > remaining) {
            a.position = move_along(a.position, a.heading, remaining);
            return a;
        }
        a.position = target;
        remaining -= dist;

        MotionEvent ev;
        ev.time = static_cast<double>(step_index - 1) + (p.v - remaining) / p.v;
        ev.where = target;
        ev.before = a.heading;
        if (a.leg == Leg::First) {
            a.leg = Leg::Second;
            a.turn_point = a.destination;
            a.heading = direction(a.position, a.destination);
            ev.kind = MotionEvent::Kind::Turn;
        } else {
            a = new_trip(a.position, rng, p.L);
            ev.kind = MotionEvent::Kind::Arrival;
        }
        ev.after = a.heading;
        if (events != nullptr) {
            events->push_back(ev);
        }
    }
}

std::int64_t default_warmup_steps(const WorldParams& p)
{
    if (p.v == 0.0) {
        return 1;
    }
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(10.0 * p.L / p.v)));
}

Population::Population(const WorldParams& p, std::vector<AgentState> agents, std::vector<RngStream> streams)
    : params_(p), agents_(std::move(agents)), streams_(std::move(streams))
{
    if (agents_.size() != streams_.size()) {
        throw std::invalid_argument("Population: one stream per agent required");
    }
    positions_.reserve(agents_.size());
    for (const AgentState& a : agents_) {
        positions_.push_back(a.position);
    }
}

void Population::advance(unsigned threads)
{
    const std::int64_t next = time_ + 1;
    parallel_for(agents_.size(), threads, [&](std::size_t i) {
        agents_[i] = step(agents_[i], streams_[i], params_, next);
        positions_[i] = agents_[i].position;
    });
    time_ = next;
}

AgentState approx_stationary_agent(RngStream& rng, double L)
{
    const Point pos = sample_stationary_position(rng, L);
    const DestinationSample d = sample_destination_detailed(pos, rng, L);
    if (d.point == pos) {
        return new_trip(pos, rng, L);
    }
    // Cross destinations put the agent on its last leg; quadrant ones on the first, with a fair heading.
    const bool vertical_first = rng.coin();
    return trip_toward(pos, d.point, vertical_first);
}

Population init_population(const WorldParams& p, InitMode mode, unsigned threads)
{
    p.validate();
    const auto n = static_cast<std::size_t>(p.n);
    std::vector<AgentState> agents(n);
    std::vector<RngStream> streams;
    streams.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        streams.push_back(derive_substream(p.seed, i));
    }

    if (mode.kind == InitMode::Kind::ApproxStationary) {
        parallel_for(n, threads, [&](std::size_t i) { agents[i] = approx_stationary_agent(streams[i], p.L); });
        return Population(p, std::move(agents), std::move(streams));
    }

    const std::int64_t steps = mode.warmup_steps.value_or(default_warmup_steps(p));
    if (steps < 1) {
        throw std::invalid_argument("init_population: warm-up needs at least one step");
    }
    parallel_for(n, threads, [&](std::size_t i) {
        const Point start{streams[i].uniform(0.0, p.L), streams[i].uniform(0.0, p.L)};
        AgentState a = new_trip(start, streams[i], p.L);
        for (std::int64_t k = 1; k <= steps; ++k) {
            a = step(a, streams[i], p, k);
        }
        agents[i] = a;
    });
    return Population(p, std::move(agents), std::move(streams));
}

Trajectory record_trajectory(AgentState agent, RngStream& rng, const WorldParams& p, std::int64_t steps,
                             std::int64_t first_step)
{
    Trajectory traj;
    traj.L = p.L;
    traj.v = p.v;
    traj.first_step = first_step;
    traj.positions.reserve(static_cast<std::size_t>(steps) + 1);
    traj.positions.push_back(agent.position);
    for (std::int64_t k = 1; k <= steps; ++k) {
        agent = step(agent, rng, p, first_step + k, &traj.events);
        traj.positions.push_back(agent.position);
    }
    return traj;
}

TurnWindowStats count_turns(const Trajectory& traj, std::int64_t t, std::int64_t tau)
{
    if (tau < 0 || t < traj.first_step || t + tau > traj.last_step()) {
        throw std::out_of_range("count_turns: window outside the logged horizon");
    }
    TurnWindowStats stats;
    stats.t = t;
    stats.tau = tau;

    const auto t0 = static_cast<double>(t);
    const auto t1 = static_cast<double>(t + tau);
    auto first = std::upper_bound(traj.events.begin(), traj.events.end(), t0,
                                  [](double value, const MotionEvent& e) { return value < e.time; });
    auto last = std::upper_bound(first, traj.events.end(), t1,
                                 [](double value, const MotionEvent& e) { return value < e.time; });

    const Point start = traj.positions[static_cast<std::size_t>(t - traj.first_step)];
    std::vector<Point> polyline{start};
    for (auto it = first; it != last; ++it) {
        stats.turns += it->changes_direction() ? 1 : 0;
        polyline.push_back(it->where);
    }
    polyline.push_back(traj.positions[static_cast<std::size_t>(t + tau - traj.first_step)]);

    // Merge consecutive pieces with the same heading into maximal straight runs.
    bool have_run = false;
    Heading run_heading = Heading::East;
    double run_length = 0.0;
    auto close_run = [&] {
        if (have_run && is_inward(run_heading, start, traj.L)) {
            stats.longest_good_segment = std::max(stats.longest_good_segment, run_length);
        }
    };
    for (std::size_t i = 1; i < polyline.size(); ++i) {
        const Point a = polyline[i - 1];
        const Point b = polyline[i];
        const double len = std::abs(b.x - a.x) + std::abs(b.y - a.y);
        if (len == 0.0) {
            continue;
        }
        const Heading h = direction(a, b);
        if (have_run && h == run_heading) {
            run_length += len;
            continue;
        }
        close_run();
        have_run = true;
        run_heading = h;
        run_length = len;
    }
    close_run();
    return stats;
}

double turn_count_bound(std::int64_t n, double L, double v, double tau)
{
    return 4.0 * log_n(n) / std::log(L / (v * tau));
}

} // namespace mrwp
