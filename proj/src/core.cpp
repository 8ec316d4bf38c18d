#include "mrwp/core.hpp"

#include <stdexcept>
#include <string>

namespace mrwp {

void WorldParams::validate() const
{
    if (n < 1) {
        throw std::invalid_argument("n must be >= 1, got " + std::to_string(n));
    }
    if (!(L > 0.0) || !std::isfinite(L)) {
        throw std::invalid_argument("L must be a positive finite length");
    }
    if (!(R > 0.0) || !std::isfinite(R)) {
        throw std::invalid_argument("R must be a positive finite length");
    }
    if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::invalid_argument("v must be >= 0");
    }
    if (!(c1 > 0.0) || !(c2 > 0.0) || !(eta >= 0.0)) {
        throw std::invalid_argument("envelope constants must satisfy c1 > 0, c2 > 0, eta >= 0");
    }
}

bool WorldParams::assumptions_hold() const { return check_assumptions(*this).all(); }

double radius_threshold(std::int64_t n, double L, double c1)
{
    return c1 * L * std::sqrt(log_n(n) / static_cast<double>(n));
}

AssumptionReport check_assumptions(const WorldParams& p)
{
    AssumptionReport r;
    r.radius_threshold = radius_threshold(p.n, p.L, p.c1);
    r.radius_slack = p.R - r.radius_threshold;
    r.radius_ok = p.R >= r.radius_threshold;
    r.speed_limit = p.R / p.c2;
    r.speed_slack = r.speed_limit - p.v;
    r.speed_ok = p.v <= r.speed_limit;
    return r;
}

std::uint64_t RngStream::below(std::uint64_t bound)
{
    if (bound == 0) {
        throw std::invalid_argument("RngStream::below: bound must be positive");
    }
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    for (;;) {
        const std::uint64_t x = engine_();
        if (x < limit) {
            return x % bound;
        }
    }
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
{
    return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ (b * 0xD1B54A32D192ED03ULL));
}

RngStream derive_substream(std::uint64_t seed, std::uint64_t index)
{
    return RngStream(splitmix64(splitmix64(seed) + splitmix64(index ^ 0xA0761D6478BD642FULL)));
}

} // namespace mrwp
