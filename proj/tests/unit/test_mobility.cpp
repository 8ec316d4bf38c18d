#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "mrwp/mobility.hpp"
#include "mrwp/zones.hpp"

using namespace mrwp;

namespace {

WorldParams params(double L, double v, std::int64_t n = 10)
{
    WorldParams p;
    p.n = n;
    p.L = L;
    p.R = L / 4;
    p.v = v;
    return p;
}

double polyline_length(const Trajectory& t, std::int64_t k)
{
    // positions and events interleaved in time order
    double len = 0.0;
    Point cur = t.positions[0];
    std::size_t e = 0;
    for (std::int64_t s = 1; s <= k; ++s) {
        while (e < t.events.size() && t.events[e].time <= static_cast<double>(s)) {
            len += std::abs(t.events[e].where.x - cur.x) + std::abs(t.events[e].where.y - cur.y);
            cur = t.events[e].where;
            ++e;
        }
        const Point next = t.positions[static_cast<std::size_t>(s)];
        len += std::abs(next.x - cur.x) + std::abs(next.y - cur.y);
        cur = next;
    }
    return len;
}

} // namespace

TEST_SUITE("mobility") {

TEST_CASE("new trip destinations are uniform and paths fair")
{
    RngStream rng(1);
    const double L = 1.0;
    constexpr int N = 100'000;
    int bins[100] = {};
    int vertical_first = 0;
    int two_leg = 0;
    const Point start{0.3, 0.6};
    for (int i = 0; i < N; ++i) {
        const AgentState a = new_trip(start, rng, L);
        const int bx = std::min(9, static_cast<int>(a.destination.x * 10));
        const int by = std::min(9, static_cast<int>(a.destination.y * 10));
        ++bins[by * 10 + bx];
        if (a.leg == Leg::First) {
            ++two_leg;
            vertical_first += a.turn_point.x == start.x ? 1 : 0;
        }
    }
    double chi2 = 0.0;
    for (int b : bins) {
        chi2 += (b - N / 100.0) * (b - N / 100.0) / (N / 100.0);
    }
    // 99 degrees of freedom: mean 99, sd sqrt(198)
    CHECK(chi2 < 99.0 + 3.0 * std::sqrt(198.0));
    CHECK(std::abs(vertical_first / double(two_leg) - 0.5) < 3.0 * std::sqrt(0.25 / two_leg));
}

TEST_CASE("axis-aligned trip has a single leg")
{
    const AgentState a = trip_toward({0.2, 0.2}, {0.2, 0.9}, false);
    CHECK(a.leg == Leg::Second);
    CHECK(a.heading == Heading::North);
    CHECK(a.turn_point == a.destination);
    const AgentState b = trip_toward({0.2, 0.2}, {0.7, 0.9}, true);
    CHECK(b.leg == Leg::First);
    CHECK(b.turn_point == Point{0.2, 0.9});
    CHECK(b.heading == Heading::North);
}

TEST_CASE("zero speed freezes the agent")
{
    RngStream rng(2);
    const WorldParams p = params(10.0, 0.0);
    const AgentState a = new_trip({1, 1}, rng, p.L);
    std::vector<MotionEvent> ev;
    const AgentState b = step(a, rng, p, 1, &ev);
    CHECK(b.position == a.position);
    CHECK(b.destination == a.destination);
    CHECK(ev.empty());
}

TEST_CASE("hand simulation: straight trip arrives on step 3")
{
    RngStream rng(3);
    const double v = 0.5;
    const WorldParams p = params(10.0, v);
    AgentState a = trip_toward({0.0, 0.0}, {3 * v, 0.0}, false);
    std::vector<MotionEvent> ev;
    for (int k = 1; k <= 2; ++k) {
        a = step(a, rng, p, k, &ev);
    }
    CHECK(ev.empty());
    CHECK(a.position.x == doctest::Approx(2 * v));
    const AgentState before = a;
    a = step(a, rng, p, 3, &ev);
    REQUIRE(ev.size() == 1);
    CHECK(ev[0].kind == MotionEvent::Kind::Arrival);
    CHECK(ev[0].where == Point{3 * v, 0.0});
    CHECK(ev[0].time == doctest::Approx(3.0));
    // the arrival lands exactly at the end of the step, so the new trip has not moved yet
    CHECK(a.position == Point{3 * v, 0.0});
    CHECK(a.destination != before.destination);
}

TEST_CASE("hand simulation: turn mid-step")
{
    RngStream rng(4);
    const double v = 1.0;
    const WorldParams p = params(10.0, v);
    AgentState a = trip_toward({2.0, 2.0}, {2.5, 6.0}, false); // east to (2.5, 2), then north
    REQUIRE(a.heading == Heading::East);
    std::vector<MotionEvent> ev;
    a = step(a, rng, p, 1, &ev);
    REQUIRE(ev.size() == 1);
    CHECK(ev[0].kind == MotionEvent::Kind::Turn);
    CHECK(ev[0].before == Heading::East);
    CHECK(ev[0].after == Heading::North);
    CHECK(ev[0].time == doctest::Approx(0.5));
    CHECK(a.heading == Heading::North);
    CHECK(a.leg == Leg::Second);
    CHECK(a.position.x == doctest::Approx(2.5));
    CHECK(a.position.y == doctest::Approx(2.5));
}

TEST_CASE("path length is conserved and agents stay inside")
{
    const WorldParams p = params(5.0, 0.37);
    RngStream rng(9);
    const AgentState a = new_trip({1.0, 4.0}, rng, p.L);
    const std::int64_t k = 2000;
    const Trajectory t = record_trajectory(a, rng, p, k);
    CHECK(polyline_length(t, k) == doctest::Approx(k * p.v).epsilon(1e-9));
    for (const Point q : t.positions) {
        REQUIRE(inside_square(q, p.L));
    }
    CHECK(t.last_step() == k);
}

TEST_CASE("core agents stay in their cell for one step")
{
    WorldParams p;
    p.n = 2000;
    p.L = std::sqrt(2000.0);
    p.c1 = 2.0;
    p.R = radius_threshold(p.n, p.L, p.c1);
    p.v = p.R / p.c2;
    p.seed = 77;
    const ZoneMap z = build_zone_map(p);
    Population pop = init_population(p, InitMode::approx_stationary());
    int checked = 0;
    for (int s = 0; s < 20; ++s) {
        std::vector<int> core_cell(pop.size(), -1);
        for (std::size_t i = 0; i < pop.size(); ++i) {
            const int c = z.cell_of(pop.positions()[i]);
            if (z.core(c).contains(pop.positions()[i])) {
                core_cell[i] = c;
            }
        }
        pop.advance();
        for (std::size_t i = 0; i < pop.size(); ++i) {
            if (core_cell[i] >= 0) {
                ++checked;
                CHECK(z.cell_rect(core_cell[i]).contains(pop.positions()[i]));
            }
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("initialization modes")
{
    WorldParams p = params(20.0, 0.5, 300);
    p.seed = 5;
    CHECK_THROWS_AS(init_population(p, InitMode::warmup(0)), std::invalid_argument);
    CHECK(default_warmup_steps(p) == 400);

    const Population serial = init_population(p, InitMode::warmup(50), 1);
    const Population parallel = init_population(p, InitMode::warmup(50), 4);
    for (std::size_t i = 0; i < serial.size(); ++i) {
        REQUIRE(serial.positions()[i] == parallel.positions()[i]);
        REQUIRE(serial.agents()[i].destination == parallel.agents()[i].destination);
    }

    const Population approx = init_population(p, InitMode::approx_stationary(), 2);
    int second = 0;
    for (const AgentState& a : approx.agents()) {
        REQUIRE(inside_square(a.position, p.L));
        if (a.leg == Leg::Second) {
            ++second;
            REQUIRE((a.destination.x == a.position.x || a.destination.y == a.position.y));
        }
    }
    // half of the destinations fall on the cross
    CHECK(std::abs(second / 300.0 - 0.5) < 4.0 * std::sqrt(0.25 / 300));
}

TEST_CASE("stepping is independent of the thread count")
{
    WorldParams p = params(20.0, 0.8, 500);
    Population a = init_population(p, InitMode::approx_stationary(), 1);
    Population b = init_population(p, InitMode::approx_stationary(), 3);
    for (int k = 0; k < 50; ++k) {
        a.advance(1);
        b.advance(3);
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a.positions()[i] == b.positions()[i]);
    }
    CHECK(a.time() == 50);
}

TEST_CASE("count turns: straight window")
{
    RngStream rng(6);
    const double v = 0.25;
    const WorldParams p = params(10.0, v);
    const AgentState a = trip_toward({1.0, 1.0}, {9.0, 1.0}, false);
    const Trajectory t = record_trajectory(a, rng, p, 20);
    const TurnWindowStats s = count_turns(t, 2, 10);
    CHECK(s.turns == 0);
    CHECK(s.longest_good_segment == doctest::Approx(v * 10));
    CHECK_THROWS_AS(count_turns(t, 15, 10), std::out_of_range);
    CHECK_THROWS_AS(count_turns(t, -1, 3), std::out_of_range);
}

TEST_CASE("count turns: hand-built zigzag")
{
    Trajectory t;
    t.L = 10.0;
    t.v = 1.0;
    t.first_step = 0;
    // (1,1) E to (3,1), N to (3,3), E to (5,3), N to (5,5)
    t.positions = {{1, 1}, {2, 1}, {3, 1}, {3, 2}, {3, 3}, {4, 3}, {5, 3}, {5, 4}, {5, 5}};
    auto turn = [](double time, Point w, Heading b, Heading a) {
        MotionEvent e;
        e.kind = MotionEvent::Kind::Turn;
        e.time = time;
        e.where = w;
        e.before = b;
        e.after = a;
        return e;
    };
    t.events = {turn(2.0, {3, 1}, Heading::East, Heading::North), turn(4.0, {3, 3}, Heading::North, Heading::East),
                turn(6.0, {5, 3}, Heading::East, Heading::North)};
    const TurnWindowStats s = count_turns(t, 0, 8);
    CHECK(s.turns == 3);
    CHECK(s.longest_good_segment == doctest::Approx(2.0));
    CHECK(s.longest_good_segment <= t.v * 8);
    // arrivals that keep the heading are not turns
    MotionEvent straight = turn(1.0, {2, 1}, Heading::East, Heading::East);
    straight.kind = MotionEvent::Kind::Arrival;
    t.events.insert(t.events.begin(), straight);
    CHECK(count_turns(t, 0, 8).turns == 3);
    CHECK(count_turns(t, 0, 1).turns == 0);
    CHECK(count_turns(t, 0, 2).turns == 1); // the window (t, t+tau] includes its right end
    CHECK(count_turns(t, 2, 2).turns == 1);
}

TEST_CASE("good segments stay within v tau")
{
    const WorldParams p = params(30.0, 0.7);
    RngStream rng(12);
    const Trajectory t = record_trajectory(new_trip({5, 5}, rng, p.L), rng, p, 500);
    for (int w = 0; w < 200; ++w) {
        const auto tau = static_cast<std::int64_t>(1 + rng.below(40));
        const auto s = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(500 - tau)));
        const TurnWindowStats st = count_turns(t, s, tau);
        CHECK(st.turns >= 0);
        CHECK(st.longest_good_segment <= p.v * static_cast<double>(tau) + 1e-9);
    }
}

TEST_CASE("turn bound formula")
{
    CHECK(turn_count_bound(1000, 100.0, 1.0, 5.0) == doctest::Approx(4.0 * std::log(1000.0) / std::log(20.0)));
}

}
