#include "mrwp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mrwp/parallel.hpp"
#include "mrwp/stationary.hpp"

namespace mrwp {

namespace {

constexpr std::uint64_t kApproxSalt = 0xA99;
constexpr std::uint64_t kLowerBoundSalt = 0xB0B;
constexpr std::uint64_t kTurnSalt = 0x7C7;
constexpr std::uint64_t kExpansionSalt = 0xE59;

} // namespace

double theoretical_bound(const WorldParams& p, const ZoneMap& z, BoundConstants constants)
{
    const double spread = constants.a * p.L / p.R;
    if (z.suburb_size() == 0) {
        return spread;
    }
    if (p.v == 0.0) {
        throw std::invalid_argument("theoretical_bound: undefined for v = 0 with a nonempty Suburb");
    }
    return spread + constants.b * z.S() / p.v;
}

WorldParams desk_params(std::int64_t n, double c1, double multiplier, double c2, std::uint64_t seed)
{
    WorldParams p;
    p.n = n;
    p.L = std::sqrt(static_cast<double>(n));
    p.c1 = c1;
    p.c2 = c2;
    p.R = std::min(multiplier * radius_threshold(n, p.L, c1), std::sqrt(2.0) * p.L);
    p.v = p.R / c2;
    p.seed = seed;
    return p;
}

// ---------------------------------------------------------------------------

PositionHistogram::PositionHistogram(int bins_, double L_)
    : bins(bins_), L(L_), counts(static_cast<std::size_t>(bins_) * static_cast<std::size_t>(bins_), 0)
{
    if (bins_ < 1) {
        throw std::invalid_argument("PositionHistogram: bins must be positive");
    }
}

void PositionHistogram::add(std::span<const Point> positions)
{
    const double w = L / bins;
    for (const Point q : positions) {
        const int c = std::clamp(static_cast<int>(q.x / w), 0, bins - 1);
        const int r = std::clamp(static_cast<int>(q.y / w), 0, bins - 1);
        ++counts[static_cast<std::size_t>(r * bins + c)];
    }
    samples += static_cast<std::int64_t>(positions.size());
}

std::vector<double> PositionHistogram::frequencies() const
{
    std::vector<double> f(counts.size(), 0.0);
    if (samples > 0) {
        for (std::size_t i = 0; i < counts.size(); ++i) {
            f[i] = static_cast<double>(counts[i]) / static_cast<double>(samples);
        }
    }
    return f;
}

std::vector<double> stationary_bin_masses(int bins, double L)
{
    const double w = L / bins;
    std::vector<double> masses;
    masses.reserve(static_cast<std::size_t>(bins) * static_cast<std::size_t>(bins));
    for (int r = 0; r < bins; ++r) {
        for (int c = 0; c < bins; ++c) {
            masses.push_back(cell_probability({c * w, r * w}, w, L));
        }
    }
    return masses;
}

double total_variation(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) {
        throw std::invalid_argument("total_variation: size mismatch");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += std::abs(a[i] - b[i]);
    }
    return 0.5 * sum;
}

StationarityReport validate_stationary(const StationarityConfig& cfg)
{
    const WorldParams& p = cfg.params;
    p.validate();
    if (p.v <= 0.0) {
        throw std::invalid_argument("validate_stationary: needs v > 0");
    }
    StationarityReport rep;
    rep.spacing = cfg.spacing.value_or(static_cast<std::int64_t>(std::ceil(p.L / p.v)));
    rep.expected = stationary_bin_masses(cfg.bins, p.L);

    auto pooled = [&](Population pop) {
        PositionHistogram h(cfg.bins, p.L);
        for (std::int64_t s = 0; s < cfg.snapshots; ++s) {
            if (s > 0) {
                for (std::int64_t k = 0; k < rep.spacing; ++k) {
                    pop.advance(cfg.threads);
                }
            }
            h.add(pop.positions());
        }
        return h.frequencies();
    };

    rep.warmup_freq = pooled(init_population(p, InitMode::warmup(cfg.warmup_steps), cfg.threads));
    WorldParams q = p;
    q.seed = derive_seed(p.seed, kApproxSalt);
    rep.approx_freq = pooled(init_population(q, InitMode::approx_stationary(), cfg.threads));

    rep.tv_warmup = total_variation(rep.warmup_freq, rep.expected);
    rep.tv_approx = total_variation(rep.approx_freq, rep.expected);
    rep.tv_between = total_variation(rep.warmup_freq, rep.approx_freq);
    return rep;
}

// ---------------------------------------------------------------------------

double median(std::vector<double> values)
{
    if (values.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    std::sort(values.begin(), values.end());
    const std::size_t h = values.size() / 2;
    return values.size() % 2 == 1 ? values[h] : 0.5 * (values[h - 1] + values[h]);
}

double fit_slope(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("fit_slope: needs at least two paired points");
    }
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) {
        throw std::invalid_argument("fit_slope: x values are all equal");
    }
    return sxy / sxx;
}

ScalingResult scaling_experiment(const ScalingConfig& cfg)
{
    if (cfg.replicas < 1 || cfg.scales.empty() || cfg.sources.empty()) {
        throw std::invalid_argument("scaling_experiment: needs scales, sources and at least one replica");
    }
    ScalingResult res;
    for (std::int64_t n : cfg.scales) {
        WorldParams base = desk_params(n, cfg.c1, cfg.radius_multiplier, cfg.c2, cfg.seed);
        base.eta = cfg.eta;
        const ZoneMap z = build_zone_map(base);
        const double bound = theoretical_bound(base, z, cfg.constants);
        for (SourceRule rule : cfg.sources) {
            ScalingRow row;
            row.n = n;
            row.source = rule;
            row.params = base;
            row.m = z.m();
            row.S = z.S();
            row.bound = bound;
            std::vector<double> times;
            std::vector<double> spreads;
            for (int r = 0; r < cfg.replicas; ++r) {
                WorldParams p = base;
                p.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r));
                FloodOptions opts;
                opts.max_steps = cfg.max_steps;
                opts.constants = cfg.constants;
                opts.threads = cfg.threads;
                opts.record_progress = false;
                RunRecord rec = run_flood(p, cfg.init, rule, opts);
                if (rec.timed_out) {
                    ++row.timeouts;
                    times.push_back(static_cast<double>(rec.max_steps));
                } else {
                    times.push_back(static_cast<double>(*rec.flooding_time));
                }
                if (rec.cz_spread_time) {
                    spreads.push_back(static_cast<double>(*rec.cz_spread_time));
                    row.spread_constant =
                        std::max(row.spread_constant, static_cast<double>(*rec.cz_spread_time) * p.R / p.L);
                } else {
                    row.spread_constant = std::numeric_limits<double>::infinity();
                }
                row.frontier_violations += rec.violations.frontier;
                row.stability_violations += rec.violations.stability;
                row.stability_checks += rec.violations.stability_checks;
                res.runs.push_back(std::move(rec));
            }
            row.median_T = median(times);
            row.median_Tc = median(spreads);
            row.ratio = row.median_T / bound;
            res.fitted_C = std::max(res.fitted_C, row.ratio);
            if (rule == SourceRule::InCentralZone) {
                res.spread_C = std::max(res.spread_C, row.spread_constant);
            }
            res.timeouts += row.timeouts;
            res.rows.push_back(row);
        }
    }
    if (cfg.scales.size() >= 2) {
        for (SourceRule rule : cfg.sources) {
            std::vector<double> x;
            std::vector<double> y;
            for (const ScalingRow& row : res.rows) {
                if (row.source == rule) {
                    x.push_back(std::log(static_cast<double>(row.n)));
                    y.push_back(std::log(row.ratio));
                }
            }
            res.slopes.emplace_back(rule, fit_slope(x, y));
        }
    }
    return res;
}

// ---------------------------------------------------------------------------

LowerBoundScenario LowerBoundScenario::at_sw_corner(double d)
{
    return {d, Rect{0.0, 0.0, d, d}, Rect{0.0, 0.0, 3.0 * d, 3.0 * d}};
}

bool LowerBoundScenario::event_b(std::span<const Point> positions) const
{
    bool any_f = false;
    for (const Point q : positions) {
        if (in_E_minus_F(q)) {
            return false;
        }
        any_f = any_f || in_F(q);
    }
    return any_f;
}

double event_b_probability(std::int64_t n, double L, double d)
{
    if (!(d > 0.0) || 3.0 * d > L) {
        throw std::invalid_argument("event_b_probability: needs 0 < 3d <= L");
    }
    const double pf = cell_probability({0.0, 0.0}, d, L);
    const double pe = cell_probability({0.0, 0.0}, 3.0 * d, L);
    const auto nn = static_cast<double>(n);
    return std::exp(nn * std::log1p(-(pe - pf))) - std::exp(nn * std::log1p(-pe));
}

double best_kappa(std::int64_t n)
{
    // P(B) is unimodal in kappa; golden-section search on the scale-free form with L = 1.
    const double scale = std::cbrt(static_cast<double>(n));
    const double hi_limit = std::min(scale / 3.0, 4.0);
    auto f = [&](double k) { return event_b_probability(n, 1.0, k / scale); };
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 1e-6;
    double hi = hi_limit;
    double a = hi - g * (hi - lo);
    double b = lo + g * (hi - lo);
    double fa = f(a);
    double fb = f(b);
    for (int it = 0; it < 200; ++it) {
        if (fa < fb) {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        }
    }
    return 0.5 * (lo + hi);
}

LowerBoundResult lower_bound_experiment(const LowerBoundConfig& cfg)
{
    const WorldParams& p = cfg.params;
    p.validate();
    if (p.v <= 0.0) {
        throw std::invalid_argument("lower_bound_experiment: needs v > 0");
    }
    LowerBoundResult res;
    const double d = cfg.kappa * p.L / std::cbrt(static_cast<double>(p.n));
    if (p.R > d) {
        throw std::invalid_argument("lower_bound_experiment: needs R <= d");
    }
    res.scenario = LowerBoundScenario::at_sw_corner(d);
    res.trials = cfg.trials;
    res.exact_pb = event_b_probability(p.n, p.L, d);
    res.bound = (2.0 * d - p.R) / (2.0 * p.v);
    const std::int64_t horizon =
        cfg.horizon.value_or(4 * static_cast<std::int64_t>(std::ceil(res.bound)) + 10);

    const auto n = static_cast<std::size_t>(p.n);
    std::vector<Point> positions(n);
    for (std::int64_t trial = 0; trial < cfg.trials; ++trial) {
        WorldParams q = p;
        q.seed = derive_seed(p.seed, kLowerBoundSalt, static_cast<std::uint64_t>(trial));
        // Same draws init_population makes first, so a hit can be rebuilt in full.
        parallel_for(n, cfg.threads, [&](std::size_t i) {
            RngStream rng = derive_substream(q.seed, i);
            positions[i] = sample_stationary_position(rng, q.L);
        });
        if (!res.scenario.event_b(positions)) {
            continue;
        }
        ++res.hits;
        if (res.floods >= cfg.max_floods) {
            continue;
        }

        Population pop = init_population(q, InitMode::approx_stationary(), cfg.threads);
        FloodOptions opts;
        opts.max_steps = horizon;
        opts.threads = cfg.threads;
        opts.record_progress = false;
        opts.track_zones = false;
        std::int64_t source = -1;
        double nearest = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            const Point a = pop.positions()[i];
            if (res.scenario.in_F(a)) {
                opts.watch.push_back(static_cast<std::int64_t>(i));
            } else if (std::hypot(a.x, a.y) < nearest) {
                nearest = std::hypot(a.x, a.y);
                source = static_cast<std::int64_t>(i);
            }
        }
        if (source < 0) {
            continue;
        }
        const RunRecord rec = run_flood_from(std::move(pop), source, opts);
        ++res.floods;
        if (rec.watched_first_informed) {
            ++res.f_reached;
            const std::int64_t t = *rec.watched_first_informed;
            res.min_f_time = res.min_f_time ? std::min(*res.min_f_time, t) : t;
            res.violations += static_cast<double>(t) < res.bound ? 1 : 0;
        }
        if (rec.flooding_time) {
            ++res.completed;
            const std::int64_t t = *rec.flooding_time;
            res.min_flooding_time = res.min_flooding_time ? std::min(*res.min_flooding_time, t) : t;
            res.violations += static_cast<double>(t) < res.bound ? 1 : 0;
        }
    }
    res.empirical_pb = cfg.trials > 0 ? static_cast<double>(res.hits) / static_cast<double>(cfg.trials) : 0.0;
    return res;
}

// ---------------------------------------------------------------------------

std::vector<WorldParams> default_sweep(double c1, std::uint64_t seed)
{
    constexpr std::array<double, 3> multipliers{1.0, 2.0, 4.0};
    std::vector<WorldParams> out;
    for (int i = 0; i < 20; ++i) {
        const auto n = static_cast<std::int64_t>(std::llround(1000.0 * std::pow(10.0, i / 19.0)));
        out.push_back(desk_params(n, c1, multipliers[static_cast<std::size_t>(i % 3)], kDefaultC2,
                                  derive_seed(seed, static_cast<std::uint64_t>(i))));
    }
    return out;
}

TurnStats turn_count_statistic(const WorldParams& p, std::int64_t agents, std::int64_t windows_per_agent,
                               unsigned threads)
{
    p.validate();
    TurnStats total;
    if (p.v <= 0.0) {
        return total;
    }
    const auto tau_lo = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(p.L / (p.n * p.v))));
    const auto tau_hi = static_cast<std::int64_t>(std::floor(p.L / (4.0 * p.v)));
    if (tau_hi < tau_lo || agents < 1) {
        return total;
    }
    const std::int64_t horizon = 2 * tau_hi;
    const std::uint64_t seed = derive_seed(p.seed, kTurnSalt);
    std::vector<TurnStats> per(static_cast<std::size_t>(agents));
    parallel_for(per.size(), threads, [&](std::size_t i) {
        RngStream rng = derive_substream(seed, i);
        const AgentState a = approx_stationary_agent(rng, p.L);
        const Trajectory traj = record_trajectory(a, rng, p, horizon);
        for (std::int64_t w = 0; w < windows_per_agent; ++w) {
            const auto tau = tau_lo + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(tau_hi - tau_lo + 1)));
            const auto t = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(horizon - tau + 1)));
            const TurnWindowStats s = count_turns(traj, t, tau);
            ++per[i].windows;
            if (s.turns > turn_count_bound(p.n, p.L, p.v, static_cast<double>(tau))) {
                ++per[i].violations;
            }
        }
    });
    for (const TurnStats& s : per) {
        total.windows += s.windows;
        total.violations += s.violations;
    }
    return total;
}

SweepReport lemma_sweep(std::span<const WorldParams> settings, const SweepOptions& options)
{
    SweepReport rep;
    for (const WorldParams& p : settings) {
        SweepRow row;
        row.params = p;
        std::optional<ZoneMap> z;
        try {
            z = build_zone_map(p);
        } catch (const std::invalid_argument&) {
            row.zones_ok = false;
        }
        if (z) {
            row.m = z->m();
            row.cz_size = z->cz_size();
            row.suburb_size = z->suburb_size();
            row.rows_columns = cz_row_column_counts(*z);
            rep.row_column_violations += row.rows_columns.ok() ? 0 : 1;

            const ExpansionMode mode = z->cz_size() <= 16
                                           ? ExpansionMode::exhaustive()
                                           : ExpansionMode::random(options.expansion_samples,
                                                                   derive_seed(p.seed, kExpansionSalt));
            const ExpansionReport ex = check_expansion(*z, mode);
            row.expansion_checked = ex.subsets_checked;
            row.expansion_violations = ex.violation_count;
            rep.expansion_violations += ex.violation_count;

            row.suburb_violations =
                static_cast<std::int64_t>(check_suburb_diameter(*z, options.suburb_scale * z->S()).size());
            rep.suburb_violations += row.suburb_violations;

            if (options.density_horizon >= 0) {
                Population pop = init_population(p, InitMode::approx_stationary(), options.threads);
                row.density_violations =
                    density_monitor(std::move(pop), *z, options.eta, options.density_horizon, options.threads)
                        .violations;
                rep.density_violations += row.density_violations;
            }
        }
        row.turns = turn_count_statistic(p, options.turn_agents, options.turn_windows_per_agent, options.threads);
        rep.turns.windows += row.turns.windows;
        rep.turns.violations += row.turns.violations;
        rep.rows.push_back(row);
    }
    return rep;
}

} // namespace mrwp
