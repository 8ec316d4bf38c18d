#include "cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include <CLI11.hpp>

#include "mrwp/experiments.hpp"
#include "mrwp/flooding.hpp"
#include "mrwp/stationary.hpp"
#include "mrwp/zones.hpp"
#include "output.hpp"

namespace mrwp::cli {

namespace fs = std::filesystem;

json default_config()
{
    return {
        {"n", 1000},
        {"L", nullptr},
        {"R", nullptr},
        {"v", nullptr},
        {"seed", 1},
        {"init", "warmup"},
        {"warmup_steps", nullptr},
        {"eta", 0.02},
        {"constants", {{"a", 18.0}, {"b", 600.0}, {"c1", 200.0}, {"c2", kDefaultC2}}},
        {"max_steps", nullptr},
        {"output_dir", "mrwp-out"},
        {"source", "random"},
        {"steps", 100},
        {"agents", 10},
        {"bins", 20},
        {"snapshots", 200},
        {"spacing", nullptr},
        {"tv_tolerance", 0.02},
        {"tv_between_tolerance", 0.03},
        {"samples", 100000},
        {"resolution", 100},
        {"origin", nullptr},
        {"scales", {1000, 2000, 4000}},
        {"replicas", 20},
        {"sources", {"cz", "suburb"}},
        {"sweep_c1", 2.0},
        {"radius_multiplier", 1.0},
        {"max_ratio", 5.0},
        {"max_slope", 0.15},
        {"kappa", 1.0},
        {"trials", 10000},
        {"max_floods", 200},
        {"horizon", nullptr},
        {"min_pb", 0.01},
        {"sweep",
         {{"points", 20},
          {"eta", 0.02},
          {"density_horizon", 100},
          {"expansion_samples", 2000},
          {"suburb_scale", 1.0},
          {"turn_agents", 50},
          {"turn_windows_per_agent", 10},
          {"max_turn_rate", 0.01}}},
    };
}

namespace {

void check_keys(const json& defaults, const json& given, const std::string& prefix)
{
    if (!given.is_object()) {
        throw ConfigError("config" + (prefix.empty() ? std::string() : " key '" + prefix + "'") +
                          " must be a JSON object");
    }
    for (const auto& [key, value] : given.items()) {
        const std::string path = prefix.empty() ? key : prefix + "." + key;
        if (!defaults.contains(key)) {
            throw ConfigError("unknown config key '" + path + "'");
        }
        if (defaults[key].is_object()) {
            check_keys(defaults[key], value, path);
        }
    }
}

template <class T>
T get(const json& cfg, const char* key)
{
    try {
        return cfg.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config key '") + key + "' has the wrong type or is missing");
    }
}

template <class T>
std::optional<T> get_optional(const json& cfg, const char* key)
{
    if (!cfg.contains(key) || cfg.at(key).is_null()) {
        return std::nullopt;
    }
    return get<T>(cfg, key);
}

SourceRule source_rule_from(const std::string& s)
{
    if (s == "random") {
        return SourceRule::Random;
    }
    if (s == "cz") {
        return SourceRule::InCentralZone;
    }
    if (s == "suburb") {
        return SourceRule::InSuburb;
    }
    throw ConfigError("source must be one of random, cz, suburb (got '" + s + "')");
}

struct Session {
    json config;
    json meta;
    fs::path out;
    unsigned threads = 1;
    int verbosity = 0;

    void write(const std::string& name, const std::string& contents) const
    {
        try {
            write_file(out / name, contents);
        } catch (const std::runtime_error& e) {
            throw OutputError(e.what());
        }
    }

    void write_json(const std::string& name, json body) const
    {
        body["meta"] = meta;
        write(name, body.dump(2) + "\n");
    }

    void note(const std::string& line) const
    {
        if (verbosity >= 0) {
            std::cout << line << "\n";
        }
    }
};

std::string fmt(double x) { return format_double(x); }

// ---------------------------------------------------------------------------

int cmd_simulate(const Session& s)
{
    const WorldParams p = params_from(s.config);
    const auto steps = get<std::int64_t>(s.config, "steps");
    const auto agents = std::min<std::int64_t>(get<std::int64_t>(s.config, "agents"), p.n);
    if (steps < 0 || agents < 0) {
        throw ConfigError("steps and agents must be non-negative");
    }
    Population pop = init_population(p, init_from(s.config), s.threads);
    CsvWriter csv({"agent", "step", "x", "y", "leg", "heading"}, s.meta);
    auto dump = [&] {
        for (std::int64_t i = 0; i < agents; ++i) {
            const AgentState& a = pop.agents()[static_cast<std::size_t>(i)];
            csv.cell(i).cell(pop.time()).cell(a.position.x).cell(a.position.y).cell(to_string(a.leg))
                .cell(to_string(a.heading));
            csv.end_row();
        }
    };
    dump();
    for (std::int64_t k = 0; k < steps; ++k) {
        pop.advance(s.threads);
        dump();
    }
    s.write("trajectories.csv", csv.str());
    s.write_json("simulate.json", {{"steps", steps}, {"agents_logged", agents}, {"params", to_json(p)},
                                   {"assumptions", to_json(check_assumptions(p))}});
    s.note("simulate: " + std::to_string(steps) + " steps, " + std::to_string(agents) + " trajectories logged");
    return kOk;
}

int cmd_flood(const Session& s)
{
    const WorldParams p = params_from(s.config);
    FloodOptions opts;
    opts.max_steps = get_optional<std::int64_t>(s.config, "max_steps");
    opts.constants = {get<double>(s.config["constants"], "a"), get<double>(s.config["constants"], "b")};
    opts.threads = s.threads;
    const RunRecord rec = run_flood(p, init_from(s.config), source_rule_from(get<std::string>(s.config, "source")), opts);

    CsvWriter csv({"step", "informed_count", "cz_cells_informed", "suburb_informed_count"}, s.meta);
    for (const ProgressRow& r : rec.progress) {
        csv.cell(r.step).cell(r.informed_count).cell(r.cz_cells_informed).cell(r.suburb_informed_count);
        csv.end_row();
    }
    s.write("flood_progress.csv", csv.str());
    s.write_json("flood_summary.json", to_json(rec));

    if (s.verbosity > 0) {
        std::cerr << "wall time " << fmt(rec.wall_seconds) << " s\n";
    }
    s.note("flood: " + std::string(rec.timed_out ? "TIMEOUT after " + std::to_string(rec.steps_run) + " steps"
                                                 : "flooding time " + std::to_string(*rec.flooding_time)) +
           (rec.cz_spread_time ? ", cz spread " + std::to_string(*rec.cz_spread_time) : std::string()));
    const bool bad = rec.violations.frontier > 0 || rec.violations.stability > 0;
    return bad ? kViolation : kOk;
}

int cmd_zones(const Session& s)
{
    const WorldParams p = params_from(s.config);
    ZoneMap z;
    try {
        z = build_zone_map(p);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    CsvWriter csv({"row", "col", "probability", "label", "core_x0", "core_y0", "core_x1", "core_y1"}, s.meta);
    for (int id = 0; id < z.cell_count(); ++id) {
        const Rect c = z.core(id);
        csv.cell(z.row_of(id)).cell(z.col_of(id)).cell(z.probability(id))
            .cell(z.is_central(id) ? "central" : "suburb").cell(c.x0).cell(c.y0).cell(c.x1).cell(c.y1);
        csv.end_row();
    }
    s.write("zones.csv", csv.str());
    s.write("zones.svg", zone_map_svg(z, s.meta));
    const RowColumnCounts rc = cz_row_column_counts(z);
    const auto suburb = check_suburb_diameter(z);
    s.write_json("zones.json", {{"m", z.m()},
                                {"ell", z.ell()},
                                {"S", z.S()},
                                {"cz_size", z.cz_size()},
                                {"suburb_size", z.suburb_size()},
                                {"cz_rows", rc.rows},
                                {"cz_columns", rc.columns},
                                {"row_column_bound", rc.bound},
                                {"suburb_diameter_violations", suburb.size()}});
    s.note("zones: m=" + std::to_string(z.m()) + ", central " + std::to_string(z.cz_size()) + ", suburb " +
           std::to_string(z.suburb_size()));
    return kOk;
}

int cmd_validate_stationary(const Session& s)
{
    StationarityConfig cfg;
    cfg.params = params_from(s.config);
    cfg.bins = get<int>(s.config, "bins");
    cfg.snapshots = get<std::int64_t>(s.config, "snapshots");
    cfg.spacing = get_optional<std::int64_t>(s.config, "spacing");
    cfg.warmup_steps = get_optional<std::int64_t>(s.config, "warmup_steps");
    cfg.threads = s.threads;
    const StationarityReport rep = validate_stationary(cfg);
    const double tol = get<double>(s.config, "tv_tolerance");
    const double tol_between = get<double>(s.config, "tv_between_tolerance");
    const bool ok = rep.tv_warmup <= tol && rep.tv_between <= tol_between;

    CsvWriter csv({"row", "col", "expected", "warmup", "approx"}, s.meta);
    for (int r = 0; r < cfg.bins; ++r) {
        for (int c = 0; c < cfg.bins; ++c) {
            const auto k = static_cast<std::size_t>(r * cfg.bins + c);
            csv.cell(r).cell(c).cell(rep.expected[k]).cell(rep.warmup_freq[k]).cell(rep.approx_freq[k]);
            csv.end_row();
        }
    }
    s.write("stationarity.csv", csv.str());
    s.write_json("stationarity.json", {{"tv_warmup", rep.tv_warmup},
                                       {"tv_approx", rep.tv_approx},
                                       {"tv_between", rep.tv_between},
                                       {"spacing", rep.spacing},
                                       {"tv_tolerance", tol},
                                       {"tv_between_tolerance", tol_between},
                                       {"pass", ok}});
    s.note("validate-stationary: TV warm-up " + fmt(rep.tv_warmup) + ", approx " + fmt(rep.tv_approx) +
           ", between " + fmt(rep.tv_between) + (ok ? " (pass)" : " (FAIL)"));
    return ok ? kOk : kViolation;
}

int cmd_expansion_check(const Session& s)
{
    const WorldParams p = params_from(s.config);
    ZoneMap z;
    try {
        z = build_zone_map(p);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const bool exhaustive = z.cz_size() <= 16;
    const ExpansionMode mode =
        exhaustive ? ExpansionMode::exhaustive() : ExpansionMode::random(get<std::int64_t>(s.config, "samples"), p.seed);
    const ExpansionReport rep = check_expansion(z, mode);
    json violators = json::array();
    for (const ExpansionViolation& v : rep.violations) {
        violators.push_back({{"cells", v.cells}, {"boundary_size", v.boundary_size}, {"required", v.required}});
    }
    s.write_json("expansion.json", {{"mode", exhaustive ? "exhaustive" : "random"},
                                    {"cz_size", z.cz_size()},
                                    {"subsets_checked", rep.subsets_checked},
                                    {"violation_count", rep.violation_count},
                                    {"violations", violators}});
    s.note("expansion-check: " + std::to_string(rep.subsets_checked) + " subsets, " +
           std::to_string(rep.violation_count) + " violations");
    return rep.violation_count == 0 ? kOk : kViolation;
}

int cmd_lemma_sweep(const Session& s)
{
    const json& sw = s.config["sweep"];
    SweepOptions opts;
    opts.eta = get<double>(sw, "eta");
    opts.density_horizon = get<std::int64_t>(sw, "density_horizon");
    opts.expansion_samples = get<std::int64_t>(sw, "expansion_samples");
    opts.suburb_scale = get<double>(sw, "suburb_scale");
    opts.turn_agents = get<std::int64_t>(sw, "turn_agents");
    opts.turn_windows_per_agent = get<std::int64_t>(sw, "turn_windows_per_agent");
    opts.threads = s.threads;
    const auto points = get<std::size_t>(sw, "points");

    std::vector<WorldParams> settings = default_sweep(get<double>(s.config, "sweep_c1"), get<std::uint64_t>(s.config, "seed"));
    settings.resize(std::min(points, settings.size()));
    const SweepReport rep = lemma_sweep(settings, opts);

    CsvWriter csv({"n", "L", "R", "v", "m", "cz_size", "suburb_size", "cz_rows", "cz_columns", "row_column_bound",
                   "expansion_checked", "expansion_violations", "suburb_violations", "density_violations",
                   "turn_windows", "turn_violations"},
                  s.meta);
    json rows = json::array();
    for (const SweepRow& r : rep.rows) {
        csv.cell(r.params.n).cell(r.params.L).cell(r.params.R).cell(r.params.v).cell(r.m).cell(r.cz_size)
            .cell(r.suburb_size).cell(r.rows_columns.rows).cell(r.rows_columns.columns).cell(r.rows_columns.bound)
            .cell(r.expansion_checked).cell(r.expansion_violations).cell(r.suburb_violations)
            .cell(r.density_violations).cell(r.turns.windows).cell(r.turns.violations);
        csv.end_row();
        rows.push_back(to_json(r));
    }
    const double max_rate = get<double>(sw, "max_turn_rate");
    const bool ok = rep.deterministic_violations() == 0 && rep.density_violations == 0 &&
                    rep.turn_violation_rate() <= max_rate;
    s.write("lemma_sweep.csv", csv.str());
    s.write_json("lemma_sweep.json", {{"rows", rows},
                                      {"row_column_violations", rep.row_column_violations},
                                      {"expansion_violations", rep.expansion_violations},
                                      {"suburb_violations", rep.suburb_violations},
                                      {"density_violations", rep.density_violations},
                                      {"turn_windows", rep.turns.windows},
                                      {"turn_violations", rep.turns.violations},
                                      {"turn_violation_rate", rep.turn_violation_rate()},
                                      {"pass", ok}});
    s.note("lemma-sweep: rows/columns " + std::to_string(rep.row_column_violations) + ", expansion " +
           std::to_string(rep.expansion_violations) + ", suburb " + std::to_string(rep.suburb_violations) +
           ", density " + std::to_string(rep.density_violations) + ", turns " + std::to_string(rep.turns.violations) +
           "/" + std::to_string(rep.turns.windows) + (ok ? " (pass)" : " (FAIL)"));
    return ok ? kOk : kViolation;
}

int cmd_scaling(const Session& s)
{
    ScalingConfig cfg;
    cfg.scales = get<std::vector<std::int64_t>>(s.config, "scales");
    cfg.replicas = get<int>(s.config, "replicas");
    cfg.c1 = get<double>(s.config, "sweep_c1");
    cfg.radius_multiplier = get<double>(s.config, "radius_multiplier");
    cfg.c2 = get<double>(s.config["constants"], "c2");
    cfg.eta = get<double>(s.config, "eta");
    cfg.seed = get<std::uint64_t>(s.config, "seed");
    cfg.init = init_from(s.config);
    cfg.constants = {get<double>(s.config["constants"], "a"), get<double>(s.config["constants"], "b")};
    cfg.max_steps = get_optional<std::int64_t>(s.config, "max_steps");
    cfg.threads = s.threads;
    cfg.sources.clear();
    for (const auto& name : get<std::vector<std::string>>(s.config, "sources")) {
        cfg.sources.push_back(source_rule_from(name));
    }
    ScalingResult res;
    try {
        res = scaling_experiment(cfg);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }

    std::error_code ec;
    fs::create_directories(s.out / "runs", ec);
    if (ec) {
        throw OutputError("cannot create output directory " + (s.out / "runs").string());
    }
    for (std::size_t i = 0; i < res.runs.size(); ++i) {
        const RunRecord& r = res.runs[i];
        const std::string name = "runs/run_" + std::to_string(r.params.n) + "_" + std::string(to_string(r.source_rule)) +
                                 "_" + std::to_string(i % static_cast<std::size_t>(cfg.replicas)) + ".json";
        s.write_json(name, to_json(r));
    }

    CsvWriter csv({"n", "source", "R", "v", "m", "S", "bound", "median_T", "median_Tc", "ratio", "spread_constant",
                   "timeouts", "frontier_violations", "stability_violations"},
                  s.meta);
    json rows = json::array();
    std::int64_t frontier = 0;
    for (const ScalingRow& r : res.rows) {
        csv.cell(r.n).cell(to_string(r.source)).cell(r.params.R).cell(r.params.v).cell(r.m).cell(r.S).cell(r.bound)
            .cell(r.median_T).cell(r.median_Tc).cell(r.ratio).cell(r.spread_constant).cell(r.timeouts)
            .cell(r.frontier_violations).cell(r.stability_violations);
        csv.end_row();
        rows.push_back(to_json(r));
        frontier += r.frontier_violations;
    }
    json slopes = json::object();
    const double max_slope = get<double>(s.config, "max_slope");
    bool slopes_ok = true;
    for (const auto& [rule, slope] : res.slopes) {
        slopes[std::string(to_string(rule))] = slope;
        slopes_ok = slopes_ok && std::abs(slope) <= max_slope;
    }
    const bool ok = res.timeouts == 0 && frontier == 0 && res.fitted_C <= get<double>(s.config, "max_ratio") && slopes_ok;
    s.write("scaling.csv", csv.str());
    s.write_json("scaling.json", {{"rows", rows},
                                  {"fitted_C", res.fitted_C},
                                  {"spread_C", std::isfinite(res.spread_C) ? json(res.spread_C) : json(nullptr)},
                                  {"slopes", slopes},
                                  {"timeouts", res.timeouts},
                                  {"pass", ok}});
    s.note("scaling: C = " + fmt(res.fitted_C) + ", C_spread = " + fmt(res.spread_C) + (ok ? " (pass)" : " (FAIL)"));
    return ok ? kOk : kViolation;
}

int cmd_lower_bound(const Session& s)
{
    LowerBoundConfig cfg;
    cfg.params = params_from(s.config);
    const json& kappa = s.config["kappa"];
    if (kappa.is_string() && kappa.get<std::string>() == "best") {
        cfg.kappa = best_kappa(cfg.params.n);
    } else {
        cfg.kappa = get<double>(s.config, "kappa");
    }
    cfg.trials = get<std::int64_t>(s.config, "trials");
    cfg.max_floods = get<std::int64_t>(s.config, "max_floods");
    cfg.horizon = get_optional<std::int64_t>(s.config, "horizon");
    cfg.threads = s.threads;
    LowerBoundResult res;
    try {
        res = lower_bound_experiment(cfg);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const bool ok = res.violations == 0 && res.empirical_pb >= get<double>(s.config, "min_pb");
    json body = to_json(res);
    body["kappa"] = cfg.kappa;
    body["pass"] = ok;
    s.write_json("lower_bound.json", body);
    s.note("lower-bound: P(B) empirical " + fmt(res.empirical_pb) + " (exact " + fmt(res.exact_pb) + "), " +
           std::to_string(res.floods) + " conditional floods, " + std::to_string(res.violations) + " violations" +
           (ok ? " (pass)" : " (FAIL)"));
    return ok ? kOk : kViolation;
}

int cmd_heatmap(const Session& s)
{
    const WorldParams p = params_from(s.config);
    const int k = get<int>(s.config, "resolution");
    if (k < 1 || k > 2000) {
        throw ConfigError("resolution must lie in [1, 2000]");
    }
    const double w = p.L / k;
    std::vector<double> density(static_cast<std::size_t>(k) * static_cast<std::size_t>(k));
    for (int r = 0; r < k; ++r) {
        for (int c = 0; c < k; ++c) {
            density[static_cast<std::size_t>(r * k + c)] = cell_probability({c * w, r * w}, w, p.L);
        }
    }
    s.write("heatmap_density.svg", grayscale_svg(k, k, density, s.meta, std::max(1.0, 600.0 / k)));

    Point origin{0.3 * p.L, 0.6 * p.L};
    if (!s.config["origin"].is_null()) {
        const auto o = get<std::vector<double>>(s.config, "origin");
        if (o.size() != 2) {
            throw ConfigError("origin must be [x, y]");
        }
        origin = {o[0], o[1]};
    }
    DestinationLaw law;
    try {
        law = destination_law(origin, p.L);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    auto overlap = [](double a0, double a1, double b0, double b1) { return std::max(0.0, std::min(a1, b1) - std::max(a0, b0)); };
    std::vector<double> dest(density.size(), 0.0);
    const double ox = origin.x;
    const double oy = origin.y;
    for (int r = 0; r < k; ++r) {
        for (int c = 0; c < k; ++c) {
            const double x0 = c * w, x1 = x0 + w, y0 = r * w, y1 = y0 + w;
            double mass = 0.0;
            mass += law.quadrant_density[static_cast<int>(Quadrant::SW)] * overlap(x0, x1, 0, ox) * overlap(y0, y1, 0, oy);
            mass += law.quadrant_density[static_cast<int>(Quadrant::NE)] * overlap(x0, x1, ox, p.L) * overlap(y0, y1, oy, p.L);
            mass += law.quadrant_density[static_cast<int>(Quadrant::NW)] * overlap(x0, x1, 0, ox) * overlap(y0, y1, oy, p.L);
            mass += law.quadrant_density[static_cast<int>(Quadrant::SE)] * overlap(x0, x1, ox, p.L) * overlap(y0, y1, 0, oy);
            if (ox >= x0 && (ox < x1 || (c == k - 1 && ox <= x1))) {
                if (oy > 0) mass += law.cross.south * overlap(y0, y1, 0, oy) / oy;
                if (oy < p.L) mass += law.cross.north * overlap(y0, y1, oy, p.L) / (p.L - oy);
            }
            if (oy >= y0 && (oy < y1 || (r == k - 1 && oy <= y1))) {
                if (ox > 0) mass += law.cross.west * overlap(x0, x1, 0, ox) / ox;
                if (ox < p.L) mass += law.cross.east * overlap(x0, x1, ox, p.L) / (p.L - ox);
            }
            dest[static_cast<std::size_t>(r * k + c)] = mass;
        }
    }
    s.write("heatmap_destination.svg", grayscale_svg(k, k, dest, s.meta, std::max(1.0, 600.0 / k)));
    s.note("heatmap: wrote stationary and destination maps at " + std::to_string(k) + "x" + std::to_string(k));
    return kOk;
}

} // namespace

// ---------------------------------------------------------------------------

void apply_overrides(json& config, const std::vector<std::string>& overrides)
{
    for (const std::string& item : overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ConfigError("override '" + item + "' is not of the form key=value");
        }
        const std::string key = item.substr(0, eq);
        const std::string raw = item.substr(eq + 1);
        json value;
        try {
            value = json::parse(raw);
        } catch (const json::parse_error&) {
            value = raw;
        }
        json* node = &config;
        std::size_t start = 0;
        for (;;) {
            const auto dot = key.find('.', start);
            const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
            if (part.empty()) {
                throw ConfigError("override key '" + key + "' has an empty component");
            }
            if (!node->is_object()) {
                throw ConfigError("override key '" + key + "' descends into a non-object");
            }
            if (dot == std::string::npos) {
                (*node)[part] = value;
                break;
            }
            node = &(*node)[part];
            if (node->is_null()) {
                *node = json::object();
            }
            start = dot + 1;
        }
    }
}

json resolve_config(const std::optional<json>& user, const std::vector<std::string>& overrides)
{
    const json defaults = default_config();
    json cfg = defaults;
    if (user) {
        check_keys(defaults, *user, "");
        cfg.merge_patch(*user);
        // merge_patch deletes keys set to null; put the defaults back.
        for (const auto& [key, value] : defaults.items()) {
            if (!cfg.contains(key)) {
                cfg[key] = value;
            }
        }
    }
    apply_overrides(cfg, overrides);
    check_keys(defaults, cfg, "");
    for (const char* nested : {"constants", "sweep"}) {
        for (const auto& [key, value] : defaults[nested].items()) {
            if (!cfg[nested].contains(key) || cfg[nested][key].is_null()) {
                cfg[nested][key] = value;
            }
        }
    }

    const auto n = get<std::int64_t>(cfg, "n");
    if (n < 1) {
        throw ConfigError("n must be at least 1");
    }
    if (cfg["L"].is_null()) {
        cfg["L"] = std::sqrt(static_cast<double>(n));
    }
    const double L = get<double>(cfg, "L");
    if (cfg["R"].is_null()) {
        const double thr = radius_threshold(n, L, get<double>(cfg["constants"], "c1"));
        cfg["R"] = std::min(thr > 0.0 ? thr : L, std::sqrt(2.0) * L);
    }
    if (cfg["v"].is_null()) {
        cfg["v"] = get<double>(cfg, "R") / get<double>(cfg["constants"], "c2");
    }
    const auto init = get<std::string>(cfg, "init");
    if (init != "warmup" && init != "approx-stationary") {
        throw ConfigError("init must be \"warmup\" or \"approx-stationary\" (got '" + init + "')");
    }
    source_rule_from(get<std::string>(cfg, "source"));
    return cfg;
}

WorldParams params_from(const json& cfg)
{
    WorldParams p;
    p.n = get<std::int64_t>(cfg, "n");
    p.L = get<double>(cfg, "L");
    p.R = get<double>(cfg, "R");
    p.v = get<double>(cfg, "v");
    p.seed = get<std::uint64_t>(cfg, "seed");
    p.eta = get<double>(cfg, "eta");
    p.c1 = get<double>(cfg["constants"], "c1");
    p.c2 = get<double>(cfg["constants"], "c2");
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return p;
}

InitMode init_from(const json& cfg)
{
    if (get<std::string>(cfg, "init") == "approx-stationary") {
        return InitMode::approx_stationary();
    }
    const auto steps = get_optional<std::int64_t>(cfg, "warmup_steps");
    if (steps && *steps < 1) {
        throw ConfigError("warmup_steps must be at least 1");
    }
    return InitMode::warmup(steps);
}

int run(int argc, char** argv)
{
    CLI::App app{"Flooding over Manhattan Random Way-Point mobility", "mrwp"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::vector<std::string> overrides;
    std::string output_dir;
    unsigned threads = 1;
    int verbose = 0;
    bool quiet = false;
    app.add_option("-c,--config", config_path, "JSON config file");
    app.add_option("-s,--set", overrides, "Override as key=value (dotted keys reach nested objects)");
    app.add_option("-o,--output-dir", output_dir, "Output directory (beats MRWP_OUTPUT_DIR and the config)");
    app.add_option("-j,--threads", threads, "Worker threads; results do not depend on it")->check(CLI::Range(1u, 1024u));
    app.add_flag("-v,--verbose", verbose, "More diagnostics on stderr");
    app.add_flag("-q,--quiet", quiet, "No summary line");

    using Handler = int (*)(const Session&);
    const std::vector<std::tuple<std::string, std::string, Handler>> commands{
        {"simulate", "Trajectories only", cmd_simulate},
        {"flood", "One flooding run: summary JSON and progress CSV", cmd_flood},
        {"zones", "Zone map CSV, SVG and summary", cmd_zones},
        {"validate-stationary", "Histogram tests against the stationary density", cmd_validate_stationary},
        {"expansion-check", "Boundary expansion of central-zone subsets", cmd_expansion_check},
        {"lemma-sweep", "Zone, density and turn checks over the default sweep", cmd_lemma_sweep},
        {"scaling", "Flooding time against the bound across scales", cmd_scaling},
        {"lower-bound", "Corner-trap construction and conditional floods", cmd_lower_bound},
        {"heatmap", "Stationary density and destination-law heatmaps", cmd_heatmap},
    };
    for (const auto& [name, help, fn] : commands) {
        app.add_subcommand(name, help);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        std::optional<json> user;
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) {
                throw ConfigError("cannot read config file " + config_path);
            }
            try {
                user = json::parse(f);
            } catch (const json::parse_error& e) {
                throw ConfigError("malformed config file " + config_path + ": " + e.what());
            }
        }
        Session s;
        s.config = resolve_config(user, overrides);
        s.threads = threads;
        s.verbosity = quiet ? -1 : verbose;

        std::string out = s.config["output_dir"].get<std::string>();
        if (const char* env = std::getenv("MRWP_OUTPUT_DIR"); env != nullptr && *env != '\0') {
            out = env;
        }
        if (!output_dir.empty()) {
            out = output_dir;
        }
        s.out = out;
        json echoed = s.config;
        echoed.erase("output_dir");
        s.meta = metadata(echoed);

        std::error_code ec;
        fs::create_directories(s.out, ec);
        if (ec || !fs::is_directory(s.out)) {
            throw OutputError("cannot create output directory " + s.out.string());
        }

        for (const auto& [name, help, fn] : commands) {
            if (app.got_subcommand(name)) {
                return fn(s);
            }
        }
        throw ConfigError("unknown subcommand");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const OutputError& e) {
        std::cerr << "output error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid parameters: " << e.what() << "\n";
        return kConfigError;
    }
}

} // namespace mrwp::cli
