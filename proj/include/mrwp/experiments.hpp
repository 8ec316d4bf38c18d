#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "mrwp/core.hpp"
#include "mrwp/flooding.hpp"
#include "mrwp/mobility.hpp"
#include "mrwp/zones.hpp"

namespace mrwp {

/// a L/R + b S/v. Throws std::invalid_argument when v == 0 and the Suburb is nonempty.
double theoretical_bound(const WorldParams& p, const ZoneMap& z, BoundConstants constants = {});

/**
 * Desk-scale scenario at n agents: L = sqrt n, R = multiplier * c1 L sqrt(log n / n)
 * clamped to sqrt(2) L, v = R / c2.
 */
WorldParams desk_params(std::int64_t n, double c1, double multiplier, double c2, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Stationarity

struct PositionHistogram {
    int bins = 20;
    double L = 1.0;
    std::int64_t samples = 0;
    std::vector<std::int64_t> counts; ///< row-major, row along y

    PositionHistogram(int bins, double L);
    void add(std::span<const Point> positions);
    std::vector<double> frequencies() const;
};

/// Stationary mass of each histogram bin.
std::vector<double> stationary_bin_masses(int bins, double L);

double total_variation(std::span<const double> a, std::span<const double> b);

struct StationarityConfig {
    WorldParams params;
    int bins = 20;
    std::int64_t snapshots = 200;
    std::optional<std::int64_t> spacing;      ///< steps between snapshots; unset selects ceil(L/v)
    std::optional<std::int64_t> warmup_steps; ///< unset selects ceil(10 L/v)
    unsigned threads = 1;
};

struct StationarityReport {
    double tv_warmup = 0.0; ///< warm-up histogram vs exact bin masses
    double tv_approx = 0.0; ///< approximate initializer vs exact bin masses
    double tv_between = 0.0; ///< warm-up vs approximate initializer
    std::int64_t spacing = 0;
    std::vector<double> warmup_freq;
    std::vector<double> approx_freq;
    std::vector<double> expected;
};

StationarityReport validate_stationary(const StationarityConfig& cfg);

// ---------------------------------------------------------------------------
// Scaling

struct ScalingConfig {
    std::vector<std::int64_t> scales{1000, 2000, 4000};
    int replicas = 20;
    double c1 = 2.0;
    double radius_multiplier = 1.0;
    double c2 = kDefaultC2;
    double eta = 0.02;
    std::uint64_t seed = 1;
    InitMode init = InitMode::warmup();
    std::vector<SourceRule> sources{SourceRule::InCentralZone, SourceRule::InSuburb};
    BoundConstants constants;
    std::optional<std::int64_t> max_steps;
    unsigned threads = 1;
};

struct ScalingRow {
    std::int64_t n = 0;
    SourceRule source = SourceRule::Random;
    WorldParams params;
    int m = 0;
    double S = 0.0;
    double bound = 0.0;
    double median_T = 0.0;
    double median_Tc = 0.0;
    double ratio = 0.0;          ///< median_T / bound
    double spread_constant = 0.0; ///< max T_c R / L over replicas
    int timeouts = 0;
    std::int64_t frontier_violations = 0;
    std::int64_t stability_violations = 0;
    std::int64_t stability_checks = 0;
};

struct ScalingResult {
    std::vector<ScalingRow> rows;
    std::vector<RunRecord> runs; ///< ordered by (scale, source, replica)
    double fitted_C = 0.0;        ///< max ratio over rows
    double spread_C = 0.0;        ///< max T_c R / L over all runs with a central source
    std::vector<std::pair<SourceRule, double>> slopes; ///< log ratio vs log n, per source rule
    int timeouts = 0;
};

ScalingResult scaling_experiment(const ScalingConfig& cfg);

/// Least-squares slope of y against x.
double fit_slope(std::span<const double> x, std::span<const double> y);

double median(std::vector<double> values);

// ---------------------------------------------------------------------------
// Lower bound

struct LowerBoundScenario {
    double d = 0.0;
    Rect F; ///< [0,d]^2
    Rect E; ///< [0,3d]^2

    static LowerBoundScenario at_sw_corner(double d);
    bool in_F(Point p) const { return F.contains(p); }
    bool in_E_minus_F(Point p) const { return E.contains(p) && !F.contains(p); }
    /// At least one agent in F and none in E - F.
    bool event_b(std::span<const Point> positions) const;
};

/// (1 - (P_E - P_F))^n - (1 - P_E)^n for stationary, independent agents.
double event_b_probability(std::int64_t n, double L, double d);

/// kappa maximizing event_b_probability at d = kappa L / n^(1/3).
double best_kappa(std::int64_t n);

struct LowerBoundConfig {
    WorldParams params;
    double kappa = 1.0; ///< d = kappa L / n^(1/3)
    std::int64_t trials = 10'000;
    std::int64_t max_floods = 200;      ///< conditional floods to run
    std::optional<std::int64_t> horizon; ///< steps per conditional flood; unset selects 4 ceil(bound) + 10
    unsigned threads = 1;
};

struct LowerBoundResult {
    LowerBoundScenario scenario;
    std::int64_t trials = 0;
    std::int64_t hits = 0;
    double empirical_pb = 0.0;
    double exact_pb = 0.0;
    double bound = 0.0; ///< (2d - R) / (2v)
    std::int64_t floods = 0;
    std::int64_t f_reached = 0;  ///< floods where some F agent got informed within the horizon
    std::int64_t violations = 0; ///< floods where an F agent was informed before the bound
    std::optional<std::int64_t> min_f_time;
    std::int64_t completed = 0;
    std::optional<std::int64_t> min_flooding_time;
};

/// Throws std::invalid_argument unless R <= d.
LowerBoundResult lower_bound_experiment(const LowerBoundConfig& cfg);

// ---------------------------------------------------------------------------
// Batch checks over a parameter sweep

/// 20 settings with n from 10^3 to 10^4 (log spaced) and R at 1x, 2x, 4x the desk radius threshold.
std::vector<WorldParams> default_sweep(double c1 = 2.0, std::uint64_t seed = 1);

struct TurnStats {
    std::int64_t windows = 0;
    std::int64_t violations = 0;
};

/// Windows of random start and integer tau in [max(1, L/(n v)), L/(4 v)] over `agents` trajectories.
TurnStats turn_count_statistic(const WorldParams& p, std::int64_t agents, std::int64_t windows_per_agent,
                               unsigned threads = 1);

struct SweepOptions {
    double eta = 0.02;
    std::int64_t density_horizon = 100;
    std::int64_t expansion_samples = 2000;
    double suburb_scale = 1.0; ///< checks suburb coordinates against suburb_scale * S
    std::int64_t turn_agents = 50;
    std::int64_t turn_windows_per_agent = 10;
    unsigned threads = 1;
};

struct SweepRow {
    WorldParams params;
    bool zones_ok = true; ///< false when no zone map exists for the setting
    int m = 0;
    int cz_size = 0;
    int suburb_size = 0;
    RowColumnCounts rows_columns;
    std::int64_t expansion_checked = 0;
    std::int64_t expansion_violations = 0;
    std::int64_t suburb_violations = 0;
    std::int64_t density_violations = 0;
    TurnStats turns;
};

struct SweepReport {
    std::vector<SweepRow> rows;
    std::int64_t row_column_violations = 0;
    std::int64_t expansion_violations = 0;
    std::int64_t suburb_violations = 0;
    std::int64_t density_violations = 0;
    TurnStats turns;

    std::int64_t deterministic_violations() const { return row_column_violations + expansion_violations + suburb_violations; }
    double turn_violation_rate() const
    {
        return turns.windows == 0 ? 0.0 : static_cast<double>(turns.violations) / static_cast<double>(turns.windows);
    }
};

SweepReport lemma_sweep(std::span<const WorldParams> settings, const SweepOptions& options = {});

} // namespace mrwp
