#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mrwp/experiments.hpp"
#include "mrwp/flooding.hpp"

using namespace mrwp;

namespace {

std::vector<Point> random_points(RngStream& rng, std::size_t n, double L)
{
    std::vector<Point> pts(n);
    for (Point& p : pts) {
        p = {rng.uniform(0, L), rng.uniform(0, L)};
    }
    return pts;
}

std::vector<int> brute_force(std::span<const Point> pts, Point q, double r)
{
    std::vector<int> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double dx = pts[i].x - q.x;
        const double dy = pts[i].y - q.y;
        if (dx * dx + dy * dy <= r * r) {
            out.push_back(static_cast<int>(i));
        }
    }
    return out;
}

Population static_population(const WorldParams& p, std::vector<Point> where)
{
    std::vector<AgentState> agents;
    std::vector<RngStream> streams;
    for (std::size_t i = 0; i < where.size(); ++i) {
        AgentState a;
        a.position = where[i];
        a.destination = where[i];
        a.turn_point = where[i];
        agents.push_back(a);
        streams.push_back(derive_substream(p.seed, i));
    }
    return Population(p, std::move(agents), std::move(streams));
}

} // namespace

TEST_SUITE("flooding") {

TEST_CASE("neighbor index equals brute force")
{
    RngStream rng(17);
    for (int config = 0; config < 20; ++config) {
        const double L = rng.uniform(1.0, 30.0);
        const double R = rng.uniform(0.05, 1.2) * L;
        const auto pts = random_points(rng, 50, L);
        const NeighborIndex idx(pts, R, L);
        CHECK(idx.indexed() == 50);
        for (int q = 0; q < 100; ++q) {
            const Point at{rng.uniform(0, L), rng.uniform(0, L)};
            CHECK(idx.query(at, R) == brute_force(pts, at, R));
            CHECK(idx.query(at, 0.75 * R) == brute_force(pts, at, 0.75 * R));
        }
    }
}

TEST_CASE("neighbor index edge cases")
{
    const std::vector<Point> pair{{1.0, 1.0}, {1.0, 3.0}};
    const NeighborIndex idx(pair, 2.0, 4.0);
    CHECK(idx.query(pair[0], 2.0) == std::vector<int>{0, 1});
    CHECK(idx.query(pair[1], 2.0) == std::vector<int>{0, 1});
    CHECK_THROWS_AS(idx.query(pair[0], 2.5), std::invalid_argument);

    const std::vector<Point> one{{0.5, 0.5}};
    const NeighborIndex single(one, 0.3, 1.0);
    CHECK(single.query({0.5, 0.5}, 0.3) == std::vector<int>{0});
    CHECK(single.query({0.0, 0.0}, 0.3).empty());

    const std::vector<std::uint8_t> mask{0, 1};
    const NeighborIndex partial(pair, 2.0, 4.0, mask);
    CHECK(partial.indexed() == 1);
    CHECK(partial.query(pair[0], 2.0) == std::vector<int>{1});
}

TEST_CASE("flood step is synchronous and monotone")
{
    const std::vector<Point> pts{{0, 0}, {1, 0}, {2, 0}, {5, 5}};
    const NeighborIndex idx(pts, 1.0, 6.0);
    FloodState s = FloodState::start(4, 0);
    CHECK(s.informed_count == 1);
    s = flood_step(s, pts, idx, 1.0);
    CHECK(s.informed == std::vector<std::uint8_t>{1, 1, 0, 0}); // no second hop within a round
    CHECK(s.step == 1);
    s = flood_step(s, pts, idx, 1.0);
    CHECK(s.informed == std::vector<std::uint8_t>{1, 1, 1, 0});
    const FloodState fixed = flood_step(s, pts, idx, 1.0);
    CHECK(fixed.informed == s.informed);
    CHECK_THROWS_AS(FloodState::start(4, 4), std::invalid_argument);
}

TEST_CASE("static chain floods in k - 1 steps")
{
    for (int k : {2, 5, 9}) {
        WorldParams p;
        p.n = k;
        p.L = 10.0;
        p.R = 1.0;
        p.v = 0.0;
        std::vector<Point> where;
        for (int i = 0; i < k; ++i) {
            where.push_back({0.5 + i * 1.0, 5.0});
        }
        FloodOptions opts;
        opts.max_steps = 50;
        const RunRecord r = run_flood_from(static_population(p, where), 0, opts);
        REQUIRE(r.flooding_time.has_value());
        CHECK(*r.flooding_time == k - 1);
        CHECK(r.progress.size() == static_cast<std::size_t>(k));
        for (std::size_t t = 0; t < r.progress.size(); ++t) {
            CHECK(r.progress[t].informed_count == static_cast<std::int64_t>(t) + 1);
        }
    }
}

TEST_CASE("single agent and isolated source")
{
    WorldParams p;
    p.n = 1;
    p.L = 5.0;
    p.R = 1.0;
    p.v = 0.1;
    const RunRecord one = run_flood(p, InitMode::approx_stationary(), SourceRule::Random);
    REQUIRE(one.flooding_time.has_value());
    CHECK(*one.flooding_time == 0);

    p.n = 3;
    p.v = 0.0;
    FloodOptions opts;
    opts.max_steps = 25;
    const RunRecord stuck = run_flood_from(static_population(p, {{0.5, 0.5}, {4.0, 4.0}, {4.2, 4.0}}), 0, opts);
    CHECK(stuck.timed_out);
    CHECK_FALSE(stuck.flooding_time.has_value());
    CHECK(stuck.steps_run == 25);
    CHECK(stuck.progress.back().informed_count == 1);
}

TEST_CASE("runs satisfy the frontier bound and are reproducible")
{
    WorldParams p = desk_params(600, 2.0, 1.0, kDefaultC2, 31);
    for (SourceRule rule : {SourceRule::Random, SourceRule::InCentralZone, SourceRule::InSuburb}) {
        const RunRecord a = run_flood(p, InitMode::approx_stationary(), rule);
        REQUIRE(a.flooding_time.has_value());
        CHECK(static_cast<double>(*a.flooding_time) >= a.frontier_bound);
        CHECK(a.violations.frontier == 0);
        CHECK(a.violations.stability == 0);
        CHECK(a.cz_spread_time.has_value());
        CHECK(*a.cz_spread_time <= *a.flooding_time);
        for (std::size_t t = 1; t < a.progress.size(); ++t) {
            CHECK(a.progress[t].informed_count >= a.progress[t - 1].informed_count);
        }
        FloodOptions par;
        par.threads = 4;
        const RunRecord b = run_flood(p, InitMode::approx_stationary(), rule, par);
        CHECK(b.source == a.source);
        CHECK(*b.flooding_time == *a.flooding_time);
        REQUIRE(b.progress.size() == a.progress.size());
        for (std::size_t t = 0; t < a.progress.size(); ++t) {
            CHECK(b.progress[t].informed_count == a.progress[t].informed_count);
            CHECK(b.progress[t].cz_cells_informed == a.progress[t].cz_cells_informed);
        }
        const ZoneMap z = build_zone_map(p);
        CHECK(*a.theoretical_bound == theoretical_bound(p, z, a.constants));
    }
}

TEST_CASE("source rules pick matching agents")
{
    const WorldParams p = desk_params(800, 2.0, 1.0, kDefaultC2, 3);
    const ZoneMap z = build_zone_map(p);
    const Population pop = init_population(p, InitMode::warmup(20));
    FloodOptions opts;
    opts.max_steps = 0;
    const RunRecord cz = run_flood(p, InitMode::warmup(20), SourceRule::InCentralZone, opts);
    CHECK(z.is_central(z.cell_of(pop.positions()[static_cast<std::size_t>(cz.source)])));
    const RunRecord sub = run_flood(p, InitMode::warmup(20), SourceRule::InSuburb, opts);
    CHECK_FALSE(z.is_central(z.cell_of(pop.positions()[static_cast<std::size_t>(sub.source)])));
}

TEST_CASE("informed cells count empty central cells")
{
    std::vector<CellLabel> labels(4, CellLabel::Central);
    labels[3] = CellLabel::Suburb;
    const ZoneMap z(2, 2.0, 10, labels, {0.25, 0.25, 0.25, 0.25});
    const std::vector<Point> pts{{0.5, 0.5}, {0.6, 0.4}, {1.5, 0.5}, {1.5, 1.5}};
    FloodState s = FloodState::start(4, 0);
    s.informed[1] = 1;
    s.informed_count = 2;
    const CellSet q = informed_cells(s, pts, z);
    CHECK(q.contains(0));
    CHECK_FALSE(q.contains(1)); // holds an uninformed agent
    CHECK(q.contains(2));       // empty
    CHECK_FALSE(q.contains(3)); // suburb
}

TEST_CASE("meetings")
{
    const double R = 2.0;
    const std::vector<Point> pts{{1, 1}, {1 + 0.7 * R, 1}, {5, 5}, {5 + 0.8 * R, 5}};
    const auto pairs = detect_meetings(pts, R, 10.0);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0] == std::pair<int, int>{0, 1});

    RngStream rng(2);
    const auto many = random_points(rng, 50, 10.0);
    std::vector<std::pair<int, int>> oracle;
    for (int i = 0; i < 50; ++i) {
        for (int j = i + 1; j < 50; ++j) {
            const double d = std::hypot(many[i].x - many[j].x, many[i].y - many[j].y);
            if (d <= 0.75 * R) {
                oracle.emplace_back(i, j);
            }
        }
    }
    CHECK(detect_meetings(many, R, 10.0) == oracle);
}

TEST_CASE("density monitor")
{
    const WorldParams p = desk_params(2000, 2.0, 1.0, kDefaultC2, 2);
    const ZoneMap z = build_zone_map(p);
    const Population pop = init_population(p, InitMode::approx_stationary());
    const DensityReport none = density_monitor(pop, z, 0.0, 20);
    CHECK(none.violations == 0);
    CHECK(none.steps_checked == 21);
    const DensityReport strict = density_monitor(pop, z, 10.0, 5);
    CHECK(strict.violations > 0);
    CHECK(core_occupancy_requirement(0.02, 2000) == 1.0);
}

TEST_CASE("default step envelope")
{
    WorldParams p = desk_params(1000, 2.0, 1.0, kDefaultC2, 1);
    p.c1 = 2.0;
    const ZoneMap z = build_zone_map(p);
    CHECK(default_max_steps(p) == static_cast<std::int64_t>(std::ceil(100.0 * theoretical_bound(p, z))));
    p.c1 = 200.0;
    CHECK(default_max_steps(p) == 10'000'000);
}

}
