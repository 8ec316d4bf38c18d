#include "mrwp/flooding.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "mrwp/experiments.hpp"
#include "mrwp/parallel.hpp"

namespace mrwp {

namespace {

/// Stream reserved for choosing the source; agent streams use indices < n.
constexpr std::uint64_t kSourceStream = 0xF100D50000000001ULL;

} // namespace

NeighborIndex::NeighborIndex(std::span<const Point> positions, double radius, double L,
                             std::span<const std::uint8_t> include)
    : radius_(radius)
{
    if (!(radius > 0.0) || !(L > 0.0)) {
        throw std::invalid_argument("NeighborIndex: radius and L must be positive");
    }
    if (!include.empty() && include.size() != positions.size()) {
        throw std::invalid_argument("NeighborIndex: include mask size mismatch");
    }
    buckets_ = std::max(1, static_cast<int>(std::floor(L / radius)));
    side_ = L / buckets_;

    const auto nb = static_cast<std::size_t>(buckets_) * static_cast<std::size_t>(buckets_);
    std::vector<int> bucket_of(positions.size(), -1);
    start_.assign(nb + 1, 0);
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (!include.empty() && include[i] == 0) {
            continue;
        }
        const int b = bucket_coord(positions[i].y) * buckets_ + bucket_coord(positions[i].x);
        bucket_of[i] = b;
        ++start_[static_cast<std::size_t>(b) + 1];
    }
    std::partial_sum(start_.begin(), start_.end(), start_.begin());
    ids_.resize(static_cast<std::size_t>(start_.back()));
    points_.resize(ids_.size());
    std::vector<int> fill(start_.begin(), start_.end() - 1);
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (bucket_of[i] < 0) {
            continue;
        }
        const auto slot = static_cast<std::size_t>(fill[static_cast<std::size_t>(bucket_of[i])]++);
        ids_[slot] = static_cast<int>(i);
        points_[slot] = positions[i];
    }
}

int NeighborIndex::bucket_coord(double x) const
{
    return std::clamp(static_cast<int>(std::floor(x / side_)), 0, buckets_ - 1);
}

std::vector<int> NeighborIndex::query(Point q, double r) const
{
    std::vector<int> out;
    any_within(q, r, [&](int id, Point) {
        out.push_back(id);
        return false;
    });
    std::sort(out.begin(), out.end());
    return out;
}

NeighborIndex build_index(std::span<const Point> positions, double R, double L) { return {positions, R, L}; }

FloodState FloodState::start(std::size_t n, std::int64_t source)
{
    if (source < 0 || static_cast<std::size_t>(source) >= n) {
        throw std::invalid_argument("FloodState: source index out of range");
    }
    FloodState s;
    s.informed.assign(n, 0);
    s.informed[static_cast<std::size_t>(source)] = 1;
    s.informed_count = 1;
    s.source = source;
    return s;
}

FloodState flood_step(const FloodState& state, std::span<const Point> positions, const NeighborIndex& index, double R,
                      unsigned threads)
{
    if (positions.size() != state.informed.size()) {
        throw std::invalid_argument("flood_step: position count does not match the flood state");
    }
    FloodState next = state;
    next.step = state.step + 1;
    if (state.complete()) {
        return next;
    }
    parallel_for(positions.size(), threads, [&](std::size_t i) {
        if (state.informed[i] != 0) {
            return;
        }
        const bool reached = index.any_within(positions[i], R, [&](int j, Point) {
            return state.informed[static_cast<std::size_t>(j)] != 0;
        });
        if (reached) {
            next.informed[i] = 1;
        }
    });
    next.informed_count = std::accumulate(next.informed.begin(), next.informed.end(), std::int64_t{0});
    return next;
}

CellSet informed_cells(const FloodState& state, std::span<const Point> positions, const ZoneMap& z)
{
    std::vector<std::uint8_t> dirty(static_cast<std::size_t>(z.cell_count()), 0);
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (state.informed[i] == 0) {
            dirty[static_cast<std::size_t>(z.cell_of(positions[i]))] = 1;
        }
    }
    CellSet q = CellSet::empty(z);
    for (int id = 0; id < z.cell_count(); ++id) {
        if (z.is_central(id) && dirty[static_cast<std::size_t>(id)] == 0) {
            q.insert(id);
        }
    }
    return q;
}

std::vector<std::pair<int, int>> detect_meetings(std::span<const Point> positions, double R, double L)
{
    const double r = 0.75 * R;
    const NeighborIndex index(positions, r, L);
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        index.any_within(positions[i], r, [&](int j, Point) {
            if (static_cast<std::size_t>(j) > i) {
                pairs.emplace_back(static_cast<int>(i), j);
            }
            return false;
        });
    }
    std::sort(pairs.begin(), pairs.end());
    return pairs;
}

double core_occupancy_requirement(double eta, std::int64_t n) { return std::max(1.0, eta * log_n(n)); }

namespace {

/// Per-cell occupant, uninformed-occupant and core counts for one snapshot.
struct CellCensus {
    std::vector<std::int32_t> occupants;
    std::vector<std::int32_t> uninformed;
    std::vector<std::int32_t> core;
    std::int64_t suburb_informed = 0;

    CellCensus(const ZoneMap& z, std::span<const Point> positions, const std::vector<std::uint8_t>* informed)
        : occupants(static_cast<std::size_t>(z.cell_count()), 0),
          uninformed(static_cast<std::size_t>(z.cell_count()), 0), core(static_cast<std::size_t>(z.cell_count()), 0)
    {
        for (std::size_t i = 0; i < positions.size(); ++i) {
            const int id = z.cell_of(positions[i]);
            const auto k = static_cast<std::size_t>(id);
            ++occupants[k];
            if (z.core(id).contains(positions[i])) {
                ++core[k];
            }
            if (informed != nullptr) {
                if ((*informed)[i] == 0) {
                    ++uninformed[k];
                } else if (!z.is_central(id)) {
                    ++suburb_informed;
                }
            }
        }
    }

    bool cell_informed(const ZoneMap& z, int id) const
    {
        return z.is_central(id) && uninformed[static_cast<std::size_t>(id)] == 0;
    }

    std::int64_t informed_cz_cells(const ZoneMap& z) const
    {
        std::int64_t count = 0;
        for (int id = 0; id < z.cell_count(); ++id) {
            count += cell_informed(z, id) ? 1 : 0;
        }
        return count;
    }
};

} // namespace

DensityReport density_monitor(Population population, const ZoneMap& z, double eta, std::int64_t horizon,
                              unsigned threads)
{
    DensityReport report;
    const double need = eta * log_n(population.params().n);
    for (std::int64_t t = 0; t <= horizon; ++t) {
        if (t > 0) {
            population.advance(threads);
        }
        const CellCensus census(z, population.positions(), nullptr);
        for (int id = 0; id < z.cell_count(); ++id) {
            if (!z.is_central(id)) {
                continue;
            }
            const std::int32_t c = census.core[static_cast<std::size_t>(id)];
            if (c < need) {
                ++report.violations;
            }
            if (report.min_core_count < 0 || c < report.min_core_count) {
                report.min_core_count = c;
            }
        }
        ++report.steps_checked;
    }
    return report;
}

std::string_view to_string(SourceRule r)
{
    switch (r) {
    case SourceRule::Random: return "random";
    case SourceRule::InCentralZone: return "cz";
    case SourceRule::InSuburb: return "suburb";
    }
    return "?";
}

std::int64_t default_max_steps(const WorldParams& p)
{
    constexpr std::int64_t fallback = 10'000'000;
    if (!p.assumptions_hold()) {
        return fallback;
    }
    try {
        const ZoneMap z = build_zone_map(p);
        const double bound = theoretical_bound(p, z, BoundConstants{});
        const double steps = std::ceil(100.0 * bound);
        return std::isfinite(steps) && steps < 1e15 ? static_cast<std::int64_t>(steps) : fallback;
    } catch (const std::invalid_argument&) {
        return fallback;
    }
}

namespace {

std::optional<ZoneMap> try_zone_map(const WorldParams& p)
{
    try {
        return build_zone_map(p);
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

std::int64_t pick_source(const Population& pop, const std::optional<ZoneMap>& z, SourceRule rule)
{
    RngStream rng = derive_substream(pop.params().seed, kSourceStream);
    const std::size_t n = pop.size();
    if (rule == SourceRule::Random) {
        return static_cast<std::int64_t>(rng.below(n));
    }
    if (!z) {
        throw std::invalid_argument("run_flood: zone-based source rule needs a valid zone map");
    }
    const bool want_central = rule == SourceRule::InCentralZone;
    std::vector<std::int64_t> pool;
    for (std::size_t i = 0; i < n; ++i) {
        if (z->is_central(z->cell_of(pop.positions()[i])) == want_central) {
            pool.push_back(static_cast<std::int64_t>(i));
        }
    }
    if (pool.empty()) {
        throw std::runtime_error(std::string("run_flood: no agent available for source rule ") +
                                 std::string(to_string(rule)));
    }
    return pool[rng.below(pool.size())];
}

} // namespace

RunRecord run_flood_from(Population population, std::int64_t source, const FloodOptions& options)
{
    const auto clock_start = std::chrono::steady_clock::now();
    const WorldParams& p = population.params();
    const std::optional<ZoneMap> z = options.track_zones ? try_zone_map(p) : std::nullopt;

    RunRecord rec;
    rec.params = p;
    rec.source = source;
    rec.constants = options.constants;
    rec.assumptions = check_assumptions(p);
    rec.zones_available = z.has_value();
    rec.max_steps = options.max_steps ? *options.max_steps : default_max_steps(p);
    if (z) {
        try {
            rec.theoretical_bound = theoretical_bound(p, *z, options.constants);
        } catch (const std::invalid_argument&) {
            rec.theoretical_bound.reset();
        }
    }

    FloodState state = FloodState::start(population.size(), source);
    const Point origin = population.positions()[static_cast<std::size_t>(source)];
    for (const Point q : population.positions()) {
        rec.d_far = std::max(rec.d_far, std::hypot(q.x - origin.x, q.y - origin.y));
    }
    rec.frontier_bound = (rec.d_far - p.R) / (p.R + 2.0 * p.v);

    const double core_need = core_occupancy_requirement(p.eta, p.n);
    // A core agent stays inside its cell for one step only when v <= ell / 3.
    const bool stability_applies = z && p.v <= z->ell() / 3.0;

    auto note_watched = [&](const FloodState& s, std::int64_t t) {
        if (rec.watched_first_informed) {
            return;
        }
        for (std::int64_t w : options.watch) {
            if (s.informed[static_cast<std::size_t>(w)] != 0) {
                rec.watched_first_informed = t;
                return;
            }
        }
    };

    std::optional<CellCensus> previous;
    auto observe = [&](std::int64_t t) {
        note_watched(state, t);
        if (!z) {
            if (options.record_progress) {
                rec.progress.push_back({t, state.informed_count, 0, 0});
            }
            return;
        }
        CellCensus census(*z, population.positions(), &state.informed);
        const std::int64_t q_size = census.informed_cz_cells(*z);
        if (options.record_progress) {
            rec.progress.push_back({t, state.informed_count, q_size, census.suburb_informed});
        }
        if (!rec.cz_spread_time && q_size == z->cz_size()) {
            rec.cz_spread_time = t;
        }
        if (stability_applies && previous && t <= p.n) {
            for (int id = 0; id < z->cell_count(); ++id) {
                if (!previous->cell_informed(*z, id) || previous->core[static_cast<std::size_t>(id)] < core_need) {
                    continue;
                }
                ++rec.violations.stability_checks;
                bool kept = census.cell_informed(*z, id);
                for (int nb : z->neighbors(id)) {
                    kept = kept && (!z->is_central(nb) || census.cell_informed(*z, nb));
                }
                rec.violations.stability += kept ? 0 : 1;
            }
        }
        previous = std::move(census);
    };

    observe(0);
    std::int64_t t = 0;
    while (!state.complete() && t < rec.max_steps) {
        ++t;
        population.advance(options.threads);
        const NeighborIndex informed_index(population.positions(), p.R, p.L, state.informed);
        state = flood_step(state, population.positions(), informed_index, p.R, options.threads);
        observe(t);
    }
    rec.steps_run = t;
    if (state.complete()) {
        rec.flooding_time = t;
        if (static_cast<double>(t) < rec.frontier_bound) {
            ++rec.violations.frontier;
        }
    } else {
        rec.timed_out = true;
    }
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
    return rec;
}

RunRecord run_flood(const WorldParams& p, InitMode init, SourceRule source_rule, const FloodOptions& options)
{
    p.validate();
    Population population = init_population(p, init, options.threads);
    const std::int64_t source = pick_source(population, try_zone_map(p), source_rule);
    RunRecord rec = run_flood_from(std::move(population), source, options);
    rec.init = init;
    rec.source_rule = source_rule;
    return rec;
}

} // namespace mrwp
