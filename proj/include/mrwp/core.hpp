#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace mrwp {

inline constexpr std::string_view kVersion = "0.1.0";

/// Default speed-envelope constant 3(1+sqrt 5).
inline const double kDefaultC2 = 3.0 * (1.0 + std::sqrt(5.0));

/**
 * Scenario parameters shared by every module.
 *
 * n agents on the square [0,L]^2 with transmission radius R and speed v
 * (distance per time step). c1, c2 and eta are the envelope constants of the
 * radius bound, the speed bound and the core density condition.
 */
struct WorldParams {
    std::int64_t n = 1;
    double L = 1.0;
    double R = 1.0;
    double v = 0.0;
    std::uint64_t seed = 1;
    double c1 = 200.0;
    double c2 = kDefaultC2;
    double eta = 0.02;

    /// Throws std::invalid_argument unless n >= 1, L > 0, R > 0, v >= 0.
    void validate() const;

    /// R >= c1 L sqrt(log n / n) and v <= R / c2.
    bool assumptions_hold() const;
};

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline bool inside_square(Point p, double L) { return p.x >= 0.0 && p.x <= L && p.y >= 0.0 && p.y <= L; }

/// Natural logarithm used by every log-n envelope.
inline double log_n(std::int64_t n) { return std::log(static_cast<double>(n)); }

struct AssumptionReport {
    bool radius_ok = false;
    bool speed_ok = false;
    double radius_threshold = 0.0; ///< c1 L sqrt(log n / n)
    double radius_slack = 0.0;     ///< R - threshold
    double speed_limit = 0.0;      ///< R / c2
    double speed_slack = 0.0;      ///< limit - v

    bool all() const { return radius_ok && speed_ok; }
};

AssumptionReport check_assumptions(const WorldParams& p);

/// c1 L sqrt(log n / n).
double radius_threshold(std::int64_t n, double L, double c1);

/**
 * Deterministic pseudo-random stream.
 *
 * Backed by std::mt19937_64, whose output sequence is fixed by the C++
 * standard. Floating-point draws are built from raw 64-bit outputs here rather
 * than through <random> distributions, whose algorithms are
 * implementation-defined.
 */
class RngStream {
public:
    static constexpr std::string_view algorithm_id = "mt19937_64+splitmix64-substreams";

    explicit RngStream(std::uint64_t state_seed) : engine_(state_seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool coin() { return (engine_() >> 63) != 0; }

    /// Uniform integer on [0, bound) by rejection (unbiased).
    std::uint64_t below(std::uint64_t bound);

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

/// Stream for (seed, index); distinct indices give independent streams.
RngStream derive_substream(std::uint64_t seed, std::uint64_t index);

/// Deterministic child seed, used to give replicas disjoint seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

} // namespace mrwp
